"""Plain CSV matrix format: comma separated reals, one row per line, no header."""

import numpy as np

from .exceptions import MatrixParseError


def read_matrix_csv(path):
    """Read a rectangular matrix; raises MatrixParseError with the offending line."""
    rows, linenos = [], []
    width = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = [float(tok) for tok in line.split(",")]
            except ValueError as exc:
                raise MatrixParseError(f"non-numeric entry ({exc})", lineno) from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise MatrixParseError(f"expected {width} values, found {len(row)}", lineno)
            rows.append(row)
            linenos.append(lineno)
    if not rows:
        raise MatrixParseError(f"{path}: file contains no data")
    M = np.array(rows, dtype=np.float64)
    bad = np.argwhere(~np.isfinite(M))
    if bad.size:
        raise MatrixParseError("non-finite entry", linenos[int(bad[0, 0])])
    return M


def write_matrix_csv(M, path):
    """Write ``M`` with 17 significant digits so that reading it back is exact."""
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    np.savetxt(path, M, fmt="%.17g", delimiter=",")


def read_labels(path):
    with open(path, encoding="utf-8") as fh:
        return np.array([int(float(line)) for line in fh if line.strip()])


def write_labels(labels, path):
    np.savetxt(path, np.asarray(labels, dtype=int), fmt="%d")
