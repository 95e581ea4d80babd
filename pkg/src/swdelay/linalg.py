"""Dense real matrix primitives under max-norm conventions.

Vectors carry the max-absolute-entry norm and matrices the induced operator
norm (maximum absolute row sum). Matrices are plain 2-D float64
``numpy.ndarray`` values; :func:`as_matrix` is the validating constructor
used at every data-model boundary, so downstream code may assume finite
entries.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotMetzler, SingularMatrix

#: Relative pivot threshold below which elimination reports singularity.
PIVOT_RTOL = 1e-12

#: Slack admitted when testing the sign condition -inv(A) >= 0.
SIGN_TOL = 1e-12


def as_matrix(a, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Validate ``a`` as a finite real matrix and return it as float64.

    Raises DimensionMismatch when a shape constraint is given and violated,
    ValueError on non-finite entries.
    """
    m = np.array(a, dtype=float)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"empty matrix of shape {m.shape}")
    if rows is not None and m.shape[0] != rows:
        raise DimensionMismatch(f"expected {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise DimensionMismatch(f"expected {cols} columns, got {m.shape[1]}")
    if not np.isfinite(m).all():
        raise ValueError("matrix entries must be finite")
    return m


def _square(a) -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def inf_norm(a) -> float:
    """Max-norm: max absolute entry for vectors, max abs row sum for matrices."""
    m = np.asarray(a, dtype=float)
    if m.ndim == 1:
        return float(np.abs(m).max()) if m.size else 0.0
    if m.ndim != 2:
        raise DimensionMismatch(f"expected vector or matrix, got ndim={m.ndim}")
    return float(np.abs(m).sum(axis=1).max())


def metzlerize(a) -> np.ndarray:
    """Keep the diagonal, replace off-diagonal entries by absolute values."""
    m = _square(a)
    out = np.abs(m)
    np.fill_diagonal(out, np.diag(m))
    return out


def is_metzler(a) -> bool:
    """True iff every off-diagonal entry is >= 0."""
    m = _square(a)
    off = m - np.diag(np.diag(m))
    return bool((off >= 0.0).all())


def lu_factor(a, pivot_rtol: float = PIVOT_RTOL):
    """LU factorization with partial pivoting.

    Returns (lu, perm); lu packs L (unit diagonal, below) and U (on and above),
    perm maps factored row -> original row. Raises SingularMatrix when a pivot
    magnitude falls below pivot_rtol * inf_norm(a).
    """
    m = _square(a)
    n = m.shape[0]
    lu = m.copy()
    perm = np.arange(n)
    threshold = pivot_rtol * inf_norm(m)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= threshold:
            raise SingularMatrix(
                f"pivot {abs(lu[p, k]):.3e} below threshold {threshold:.3e} "
                f"at column {k}")
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, perm


def lu_solve(lu, perm, b) -> np.ndarray:
    """Solve A x = b given the packed factorization of A."""
    rhs = np.asarray(b, dtype=float)
    x = rhs[perm] if rhs.ndim == 1 else rhs[perm, :]
    n = lu.shape[0]
    for k in range(1, n):
        x[k] -= lu[k, :k] @ x[:k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - lu[k, k + 1:] @ x[k + 1:]) / lu[k, k]
    return x


def solve(a, b, pivot_rtol: float = PIVOT_RTOL) -> np.ndarray:
    lu, perm = lu_factor(a, pivot_rtol)
    return lu_solve(lu, perm, b)


def invert(a, pivot_rtol: float = PIVOT_RTOL) -> np.ndarray:
    """Inverse via LU with partial pivoting; raises SingularMatrix."""
    m = _square(a)
    return solve(m, np.eye(m.shape[0]), pivot_rtol)


def metzler_is_hurwitz(a, sign_tol: float = SIGN_TOL) -> bool:
    """Hurwitz test for Metzler matrices: invertible with -inv(a) >= 0.

    Raises NotMetzler when the input has a negative off-diagonal entry.
    """
    m = _square(a)
    if not is_metzler(m):
        raise NotMetzler("Hurwitz test requires a Metzler matrix")
    try:
        inv = invert(m)
    except SingularMatrix:
        return False
    return bool((-inv >= -sign_tol).all())
