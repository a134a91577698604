"""Tridiagonal solver used by grid generation, evolution and smoothing."""

import numpy as np

from . import kernels
from .errors import TridiagonalError


def solve_tridiagonal(lower, diag, upper, rhs) -> np.ndarray:
    """Solve a tridiagonal system by forward elimination / back substitution.

    lower and upper are the sub/super-diagonals (length n-1), diag and
    rhs have length n.  All uses in this package are diagonally
    dominant; a zero pivot raises TridiagonalError with the row index.
    """
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    rhs = np.ascontiguousarray(rhs, dtype=np.float64)
    lower = np.ascontiguousarray(lower, dtype=np.float64)
    upper = np.ascontiguousarray(upper, dtype=np.float64)
    n = diag.size
    if n < 1:
        raise ValueError("empty system")
    if rhs.size != n or lower.size != n - 1 or upper.size != n - 1:
        raise ValueError(
            f"inconsistent sizes: diag {n}, rhs {rhs.size}, "
            f"lower {lower.size}, upper {upper.size}"
        )
    x, bad = kernels.thomas_solve(lower, diag, upper, rhs)
    if bad >= 0:
        raise TridiagonalError(int(bad))
    return x
