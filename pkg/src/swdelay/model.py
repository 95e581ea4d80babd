"""Data model for switched linear time-delay systems.

A constituent subsystem combines an instantaneous matrix, discrete delayed
terms A_i x(t - h_i), and an optional distributed term given by a
piecewise-linear kernel B on [-span, 0], so the delayed action is

    sum_i A_i x(t - h_i) + integral of B(theta) x(t + theta) dtheta.

Jumps at distinct delays and the absolutely continuous kernel part have
additive total variation, so the variation matrix of a subsystem is computed
exactly for this representation: sum of |A_i| plus the exact integral of
|B(theta)| (each linear segment split at entry sign changes). The value a
jump-type term takes exactly at its own delay instant is never read by any
computed quantity, so the left-continuity convention of the underlying
bounded-variation representation needs no explicit handling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveBound
from .linalg import as_matrix, is_metzler, metzlerize

#: Absolute slack for entrywise matrix comparisons (exact sign conditions
#: relaxed just enough to absorb rounding).
ENTRYWISE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DistributedKernel:
    """Piecewise-linear matrix kernel on [-span, 0].

    grid: strictly increasing time points ending at 0; values: one matrix per
    grid point, linearly interpolated in between.
    """

    grid: tuple[float, ...]
    values: tuple[np.ndarray, ...]

    def __post_init__(self):
        grid = tuple(float(g) for g in self.grid)
        if len(grid) < 2:
            raise ValueError("kernel grid needs at least two points")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("kernel grid must be strictly increasing")
        if grid[-1] != 0.0:
            raise ValueError("kernel grid must end at 0")
        if grid[0] >= 0.0:
            raise ValueError("kernel grid must start below 0")
        if len(self.values) != len(grid):
            raise ValueError("kernel needs one value matrix per grid point")
        mats = tuple(as_matrix(v) for v in self.values)
        shape = mats[0].shape
        for v in mats[1:]:
            if v.shape != shape:
                raise ValueError("kernel value matrices must share one shape")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", mats)

    @property
    def span(self) -> float:
        return -self.grid[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values[0].shape

    def value_at(self, theta: float) -> np.ndarray:
        """Evaluate the kernel at theta; zero outside [-span, 0]."""
        g = self.grid
        if theta < g[0] or theta > 0.0:
            return np.zeros(self.shape)
        hi = int(np.searchsorted(g, theta))
        if hi < len(g) and g[hi] == theta:
            return self.values[hi].copy()
        lo = hi - 1
        w = (theta - g[lo]) / (g[hi] - g[lo])
        return (1.0 - w) * self.values[lo] + w * self.values[hi]

    def integral(self) -> np.ndarray:
        """Exact signed integral of the kernel over its support."""
        out = np.zeros(self.shape)
        for a, b, va, vb in self._segments():
            out += 0.5 * (b - a) * (va + vb)
        return out

    def abs_integral(self) -> np.ndarray:
        """Exact integral of the entrywise absolute value.

        On a segment where an entry changes sign the linear entry is split at
        its root, so each piece integrates exactly.
        """
        out = np.zeros(self.shape)
        for a, b, va, vb in self._segments():
            length = b - a
            same = va * vb >= 0.0
            out += np.where(same, 0.5 * length * (np.abs(va) + np.abs(vb)), 0.0)
            mixed = ~same
            if mixed.any():
                # root at t* = length * va / (va - vb); areas of two triangles
                denom = np.where(mixed, va - vb, 1.0)
                tstar = length * va / denom
                area = 0.5 * (np.abs(va) * tstar + np.abs(vb) * (length - tstar))
                out += np.where(mixed, area, 0.0)
        return out

    def map(self, left: np.ndarray, right: np.ndarray) -> "DistributedKernel":
        """Kernel with every value replaced by left @ value @ right."""
        return DistributedKernel(self.grid,
                                 tuple(left @ v @ right for v in self.values))

    def _segments(self):
        for i in range(len(self.grid) - 1):
            yield self.grid[i], self.grid[i + 1], self.values[i], self.values[i + 1]


def add_kernels(a: DistributedKernel | None,
                b: DistributedKernel | None) -> DistributedKernel | None:
    """Pointwise sum of two piecewise-linear kernels on the union grid."""
    if a is None:
        return b
    if b is None:
        return a
    if a.shape != b.shape:
        raise ValueError("cannot add kernels of different shapes")
    grid = sorted(set(a.grid) | set(b.grid))
    values = tuple(a.value_at(g) + b.value_at(g) for g in grid)
    return DistributedKernel(tuple(grid), values)


@dataclass(frozen=True, eq=False)
class DelaySubsystem:
    """One constituent system: instantaneous matrix, delayed jumps, kernel."""

    a0: np.ndarray
    discrete: tuple[tuple[float, np.ndarray], ...] = ()
    kernel: DistributedKernel | None = None

    def __post_init__(self):
        a0 = as_matrix(self.a0)
        if a0.shape[0] != a0.shape[1]:
            raise ValueError("instantaneous matrix must be square")
        n = a0.shape[0]
        terms = []
        prev = 0.0
        for delay, mat in self.discrete:
            delay = float(delay)
            if delay <= prev:
                raise ValueError("delays must be strictly positive and "
                                 "strictly increasing")
            terms.append((delay, as_matrix(mat, n, n)))
            prev = delay
        if self.kernel is not None and self.kernel.shape != (n, n):
            raise ValueError("kernel matrices must match the state dimension")
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "discrete", tuple(terms))

    @property
    def n(self) -> int:
        return self.a0.shape[0]

    @property
    def max_delay(self) -> float:
        d = self.discrete[-1][0] if self.discrete else 0.0
        k = self.kernel.span if self.kernel is not None else 0.0
        return max(d, k)


@dataclass(frozen=True, eq=False)
class SwitchedDelaySystem:
    """Ordered family of subsystems sharing state dimension and max delay."""

    n: int
    h: float
    subsystems: tuple[DelaySubsystem, ...]

    def __post_init__(self):
        subs = tuple(self.subsystems)
        if len(subs) < 1:
            raise ValueError("a switched system needs at least one subsystem")
        if self.h < 0:
            raise ValueError("max delay h must be nonnegative")
        for i, s in enumerate(subs):
            if s.n != self.n:
                raise ValueError(f"subsystem {i} has dimension {s.n}, "
                                 f"expected {self.n}")
            if s.max_delay > self.h + ENTRYWISE_TOL:
                raise ValueError(f"subsystem {i} has delayed action beyond "
                                 f"the declared max delay {self.h}")
        object.__setattr__(self, "subsystems", subs)

    @property
    def size(self) -> int:
        return len(self.subsystems)


def variation_sum(mats, kernel: DistributedKernel | None,
                  shape: tuple[int, int]) -> np.ndarray:
    """Sum of |M| over jump matrices plus the exact integral of |kernel|."""
    out = np.zeros(shape)
    for m in mats:
        out += np.abs(m)
    if kernel is not None:
        out += kernel.abs_integral()
    return out


def variation_matrix(s: DelaySubsystem) -> np.ndarray:
    """Entrywise total variation of the delayed action of ``s``."""
    return variation_sum((m for _, m in s.discrete), s.kernel, (s.n, s.n))


def envelope_matrix(s: DelaySubsystem) -> np.ndarray:
    """Metzlerized instantaneous matrix plus the variation matrix."""
    return metzlerize(s.a0) + variation_matrix(s)


def characteristic_at_zero(s: DelaySubsystem) -> np.ndarray:
    """Characteristic matrix at s=0: -(a0 + sum of jumps + signed integral)."""
    total = s.a0.copy()
    for _, m in s.discrete:
        total += m
    if s.kernel is not None:
        total += s.kernel.integral()
    return -total


def is_positive_system(s: DelaySubsystem) -> bool:
    """Metzler a0, nonnegative jump matrices, nonnegative kernel values."""
    if not is_metzler(s.a0):
        return False
    if any((m < 0.0).any() for _, m in s.discrete):
        return False
    if s.kernel is not None and any((v < 0.0).any() for v in s.kernel.values):
        return False
    return True


def dominates(bound: DelaySubsystem, s: DelaySubsystem,
              tol: float = ENTRYWISE_TOL) -> bool:
    """True iff the positive ``bound`` dominates ``s``.

    Requires metzlerize(s.a0) <= bound.a0 and variation(s) <= variation(bound)
    entrywise. Raises NotPositiveBound when ``bound`` is not positive.
    """
    if not is_positive_system(bound):
        raise NotPositiveBound("bounding subsystem must be a positive system")
    if bound.n != s.n:
        return False
    if (metzlerize(s.a0) > bound.a0 + tol).any():
        return False
    return not (variation_matrix(s) > variation_matrix(bound) + tol).any()
