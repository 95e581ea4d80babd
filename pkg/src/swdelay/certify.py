"""Common linear copositive Lyapunov certificates via linear programming.

A vector xi >> 0 with (metzlerize(A0_k) + V_k) xi << 0 for every subsystem k
certifies exponential stability under arbitrary switching. Feasibility is
decided by a margin-maximization LP: maximize t subject to
envelope_k xi <= -t * 1 and 0 <= xi <= 1. The envelope rows are Metzler, so
any feasible point with t > 0 automatically has xi strictly positive (a zero
component would force its constraint row to be nonnegative), and at the
optimum the box constraint is active, i.e. max(xi) = 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, IterationLimit, NotPositiveBound
from .linalg import invert, metzler_is_hurwitz, metzlerize
from .model import (DelaySubsystem, SwitchedDelaySystem, dominates,
                    envelope_matrix, is_positive_system, variation_matrix)

#: Margins below this are treated as infeasible (the strict cone is open).
MARGIN_TOL = 1e-9

#: Strictness slack for verifying a certificate by direct substitution.
VERIFY_TOL = 1e-12

_PIVOT_EPS = 1e-9
_DEFAULT_MAX_PIVOTS = 10_000


@dataclass(frozen=True, eq=False)
class LpSolution:
    """Outcome of one linear program."""

    status: str                      # "Optimal" | "Infeasible" | "Unbounded"
    objective: float | None = None
    variables: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class LclfCertificate:
    """Common copositive certificate with decay data.

    xi is normalized to max(xi) = 1; margin is the LP optimum; decay_alpha
    satisfies (metzlerize(A0_k) + exp(alpha*h) V_k) xi << -alpha xi for every
    k; envelope_gain exceeds max(xi)/min(xi) and bounds the transient.
    """

    xi: np.ndarray
    margin: float
    decay_alpha: float
    envelope_gain: float


class DegenerateCertificateWarning(UserWarning):
    """xi positivity failed post hoc at the returned LP vertex."""


def lp_solve(objective, constraints, bounds,
             max_pivots: int = _DEFAULT_MAX_PIVOTS) -> LpSolution:
    """Maximize objective . x subject to a . x <= b rows and variable bounds.

    constraints: iterable of (coefficients, rhs) pairs; bounds: one
    (lower, upper) pair per variable, either side None for unbounded. Uses a
    dense two-phase simplex with Bland's rule, so termination is guaranteed
    and optima are reproducible vertex solutions. Raises DimensionMismatch on
    inconsistent sizes and IterationLimit when the pivot budget is exhausted
    (never reported as infeasibility).
    """
    c = np.asarray(objective, dtype=float)
    if c.ndim != 1:
        raise DimensionMismatch("objective must be a vector")
    nv = c.size
    rows = []
    for coeffs, rhs in constraints:
        a = np.asarray(coeffs, dtype=float)
        if a.shape != (nv,):
            raise DimensionMismatch(
                f"constraint row has shape {a.shape}, expected ({nv},)")
        rows.append((a, float(rhs)))
    bounds = list(bounds)
    if len(bounds) != nv:
        raise DimensionMismatch("need one (lower, upper) pair per variable")

    # Substitute every variable by nonnegative ones: shifted for a finite
    # lower bound, mirrored for an upper bound only, split for free.
    cols: list[tuple[int, float]] = []       # (original index, sign)
    shift = np.zeros(nv)
    upper_rows: list[tuple[int, float]] = []  # (column, bound) for y <= bound
    for j, (lo, hi) in enumerate(bounds):
        if lo is not None:
            shift[j] = lo
            if hi is not None:
                if hi < lo:
                    return LpSolution("Infeasible")
                upper_rows.append((len(cols), hi - lo))
            cols.append((j, 1.0))
        elif hi is not None:
            shift[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    ny = len(cols)

    m = len(rows) + len(upper_rows)
    a_mat = np.zeros((m, ny))
    b_vec = np.zeros(m)
    for i, (a, rhs) in enumerate(rows):
        b_vec[i] = rhs - a @ shift
        for col, (j, sign) in enumerate(cols):
            a_mat[i, col] = a[j] * sign
    for i, (col, bnd) in enumerate(upper_rows):
        a_mat[len(rows) + i, col] = 1.0
        b_vec[len(rows) + i] = bnd

    c_y = np.array([c[j] * sign for j, sign in cols])
    offset = float(c @ shift)

    y, status = _two_phase_simplex(a_mat, b_vec, c_y, max_pivots)
    if status != "Optimal":
        return LpSolution(status)
    x = shift.copy()
    for col, (j, sign) in enumerate(cols):
        x[j] += sign * y[col]
    return LpSolution("Optimal", float(c_y @ y) + offset, x)


def _two_phase_simplex(a_mat, b_vec, c_y, max_pivots):
    """Core simplex on max c.y s.t. A y <= b, y >= 0 (b of any sign)."""
    m, ny = a_mat.shape
    neg = b_vec < 0.0
    n_art = int(neg.sum())
    total = ny + m + n_art
    tab = np.zeros((m, total + 1))
    basis = np.empty(m, dtype=int)
    art_cols: list[int] = []
    ai = 0
    for i in range(m):
        row = a_mat[i].copy()
        rhs = b_vec[i]
        slack = 1.0
        if neg[i]:
            row = -row
            rhs = -rhs
            slack = -1.0
        tab[i, :ny] = row
        tab[i, ny + i] = slack
        if neg[i]:
            col = ny + m + ai
            tab[i, col] = 1.0
            basis[i] = col
            art_cols.append(col)
            ai += 1
        else:
            basis[i] = ny + i
        tab[i, total] = rhs

    pivots_used = 0

    def run(cost, allowed):
        nonlocal pivots_used
        # cost row z_j = c_B B^-1 A_j - c_j, maintained incrementally
        z = -cost.copy()
        zb = 0.0
        for i in range(m):
            cb = cost[basis[i]]
            if cb != 0.0:
                z += cb * tab[i, :total]
                zb += cb * tab[i, total]
        while True:
            enter = -1
            for j in range(total):
                if allowed[j] and z[j] < -_PIVOT_EPS:
                    enter = j
                    break                      # Bland: lowest index
            if enter < 0:
                return "Optimal", zb
            leave = -1
            best = math.inf
            for i in range(m):
                aij = tab[i, enter]
                if aij > _PIVOT_EPS:
                    ratio = tab[i, total] / aij
                    if (ratio < best - 1e-12 or
                            (abs(ratio - best) <= 1e-12 and
                             (leave < 0 or basis[i] < basis[leave]))):
                        best = ratio
                        leave = i
            if leave < 0:
                return "Unbounded", zb
            pivots_used += 1
            if pivots_used > max_pivots:
                raise IterationLimit(
                    f"simplex exceeded {max_pivots} pivots")
            piv = tab[leave, enter]
            tab[leave] /= piv
            for i in range(m):
                if i != leave and tab[i, enter] != 0.0:
                    tab[i] -= tab[i, enter] * tab[leave]
            zb -= z[enter] * tab[leave, total]
            z -= z[enter] * tab[leave, :total]
            basis[leave] = enter

    allowed = np.ones(total, dtype=bool)
    if n_art:
        cost1 = np.zeros(total)
        for col in art_cols:
            cost1[col] = -1.0
        status, value = run(cost1, allowed)
        if status != "Optimal" or value < -1e-8:
            return None, "Infeasible"
        # Drive any artificial still basic (at zero level) out of the basis.
        for i in range(m):
            if basis[i] in art_cols:
                pivot_col = -1
                for j in range(ny + m):
                    if abs(tab[i, j]) > _PIVOT_EPS:
                        pivot_col = j
                        break
                if pivot_col < 0:
                    continue               # redundant row, harmless
                piv = tab[i, pivot_col]
                tab[i] /= piv
                for r in range(m):
                    if r != i and tab[r, pivot_col] != 0.0:
                        tab[r] -= tab[r, pivot_col] * tab[i]
                basis[i] = pivot_col
        for col in art_cols:
            allowed[col] = False

    cost2 = np.zeros(total)
    cost2[:ny] = c_y
    status, _ = run(cost2, allowed)
    if status != "Optimal":
        return None, status
    y = np.zeros(ny)
    for i in range(m):
        if basis[i] < ny:
            y[basis[i]] = tab[i, total]
    return y, "Optimal"


def margin_lp(envelopes) -> LpSolution:
    """Maximize t s.t. envelope_k xi <= -t for all rows, 0 <= xi <= 1."""
    envelopes = [np.asarray(e, dtype=float) for e in envelopes]
    n = envelopes[0].shape[0]
    constraints = []
    for env in envelopes:
        if env.shape != (n, n):
            raise DimensionMismatch("all envelopes must be n x n")
        for i in range(n):
            constraints.append((np.append(env[i], 1.0), 0.0))
    objective = np.append(np.zeros(n), 1.0)
    bounds = [(0.0, 1.0)] * n + [(None, None)]
    return lp_solve(objective, constraints, bounds)


def find_common_lclf(sys: SwitchedDelaySystem,
                     margin_tol: float = MARGIN_TOL) -> LclfCertificate | None:
    """Search for a common certificate; None when the LP margin is <= tol."""
    envelopes = [envelope_matrix(s) for s in sys.subsystems]
    sol = margin_lp(envelopes)
    if sol.status != "Optimal" or sol.objective is None:
        return None
    t_star = float(sol.objective)
    if t_star <= margin_tol:
        return None
    xi = sol.variables[:sys.n].copy()
    if xi.min() <= 0.0:
        warnings.warn("LP vertex lost strict positivity of xi; reporting "
                      "infeasible", DegenerateCertificateWarning)
        return None
    xi /= xi.max()
    alpha = _decay_alpha(sys, envelopes, xi, t_star)
    gain = 1.01 * float(xi.max() / xi.min())
    return LclfCertificate(xi=xi, margin=t_star, decay_alpha=alpha,
                           envelope_gain=gain)


def _decay_alpha(sys, envelopes, xi, t_star,
                 rel_tol: float = 1e-6, max_iter: int = 200) -> float:
    """Largest alpha in (0, t_star] keeping the inflated envelopes strict.

    Bisection on the monotone condition
    (metzlerize(A0_k) + exp(alpha*h) V_k) xi + alpha xi <= -VERIFY_TOL.
    """
    h = sys.h
    metz = [metzlerize(s.a0) for s in sys.subsystems]
    variations = [variation_matrix(s) for s in sys.subsystems]

    def feasible(alpha: float) -> bool:
        grow = math.exp(alpha * h)
        for mz, var in zip(metz, variations):
            lhs = (mz + grow * var) @ xi + alpha * xi
            if lhs.max() > -VERIFY_TOL:
                return False
        return True

    hi = t_star / float(xi.max())
    if feasible(hi):
        return hi
    lo = 0.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_tol * max(hi, 1e-300):
            break
    return lo


def verify_certificate(sys: SwitchedDelaySystem, xi,
                       tol: float = VERIFY_TOL):
    """Direct substitution check; returns (ok, slacks).

    slacks has shape (N, n) holding -(envelope_k xi); ok requires xi >> 0 and
    every slack > tol.
    """
    v = np.asarray(xi, dtype=float)
    if v.shape != (sys.n,):
        raise DimensionMismatch(f"xi must have length {sys.n}")
    slacks = np.array([-(envelope_matrix(s) @ v) for s in sys.subsystems])
    ok = bool((v > 0.0).all() and (slacks > tol).all())
    return ok, slacks


def certify_dominated(bound: DelaySubsystem, sys: SwitchedDelaySystem):
    """Certify via a dominating positive subsystem; returns (ok, xi).

    ok is True when the bound's envelope is Hurwitz and the bound dominates
    every subsystem; xi is then -inv(envelope(bound)) @ 1 normalized to
    max 1, a common certificate for the whole family. Raises NotPositiveBound.
    """
    if not is_positive_system(bound):
        raise NotPositiveBound("bounding subsystem must be a positive system")
    env = envelope_matrix(bound)
    if not metzler_is_hurwitz(env):
        return False, None
    for s in sys.subsystems:
        if not dominates(bound, s):
            return False, None
    xi = -invert(env) @ np.ones(bound.n)
    xi /= xi.max()
    return True, xi
