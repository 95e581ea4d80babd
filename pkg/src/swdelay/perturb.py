"""Structured affine perturbations of switched delay systems.

Each subsystem k carries a structuring quadruple (D0, E0, D1, E1); a concrete
disturbance supplies a matrix delta0 hitting the instantaneous part as
D0 @ delta0 @ E0 and a delayed disturbance delta1 (jumps at delays plus an
optional kernel, zero instantaneous part) hitting the delayed action as
D1 @ delta1 @ E1 termwise. Disturbance size is measured per subsystem as
norm(delta0) plus the total-variation norm of delta1, maximized over k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import SplitMix64
from .errors import DimensionMismatch
from .linalg import as_matrix, inf_norm
from .model import (DelaySubsystem, DistributedKernel, SwitchedDelaySystem,
                    add_kernels, variation_sum)


@dataclass(frozen=True, eq=False)
class StructureQuad:
    """Structuring matrices (D0, E0, D1, E1) for one subsystem."""

    d0: np.ndarray
    e0: np.ndarray
    d1: np.ndarray
    e1: np.ndarray

    def __post_init__(self):
        d0 = as_matrix(self.d0)
        e0 = as_matrix(self.e0)
        d1 = as_matrix(self.d1)
        e1 = as_matrix(self.e1)
        n = d0.shape[0]
        if e0.shape[1] != n or d1.shape[0] != n or e1.shape[1] != n:
            raise DimensionMismatch(
                "outer dimensions of a structuring quadruple must agree")
        for name, m in (("d0", d0), ("e0", e0), ("d1", d1), ("e1", e1)):
            object.__setattr__(self, name, m)

    @property
    def n(self) -> int:
        return self.d0.shape[0]

    @staticmethod
    def identity(n: int) -> "StructureQuad":
        eye = np.eye(n)
        return StructureQuad(eye, eye, eye, eye)


@dataclass(frozen=True, eq=False)
class PerturbationStructure:
    """One structuring quadruple per subsystem."""

    quads: tuple[StructureQuad, ...]

    def __post_init__(self):
        quads = tuple(self.quads)
        if not quads:
            raise ValueError("need at least one structuring quadruple")
        n = quads[0].n
        if any(q.n != n for q in quads):
            raise DimensionMismatch("all quadruples must share the state "
                                    "dimension")
        object.__setattr__(self, "quads", quads)

    @property
    def size(self) -> int:
        return len(self.quads)

    @staticmethod
    def unstructured(n: int, count: int) -> "PerturbationStructure":
        return PerturbationStructure(tuple(StructureQuad.identity(n)
                                           for _ in range(count)))


@dataclass(frozen=True, eq=False)
class DelayDisturbance:
    """Delayed disturbance: jump matrices at delays plus an optional kernel."""

    jumps: tuple[tuple[float, np.ndarray], ...] = ()
    kernel: DistributedKernel | None = None

    def __post_init__(self):
        jumps = []
        prev = 0.0
        shape = None
        for delay, mat in self.jumps:
            delay = float(delay)
            if delay <= prev:
                raise ValueError("jump delays must be strictly positive and "
                                 "strictly increasing")
            m = as_matrix(mat)
            if shape is None:
                shape = m.shape
            elif m.shape != shape:
                raise DimensionMismatch("jump matrices must share one shape")
            jumps.append((delay, m))
            prev = delay
        if self.kernel is not None:
            if shape is None:
                shape = self.kernel.shape
            elif self.kernel.shape != shape:
                raise DimensionMismatch("kernel shape must match the jumps")
        object.__setattr__(self, "jumps", tuple(jumps))

    @property
    def shape(self) -> tuple[int, int] | None:
        if self.jumps:
            return self.jumps[0][1].shape
        if self.kernel is not None:
            return self.kernel.shape
        return None

    def variation(self) -> np.ndarray | None:
        shape = self.shape
        if shape is None:
            return None
        return variation_sum((m for _, m in self.jumps), self.kernel, shape)


@dataclass(frozen=True, eq=False)
class Disturbance:
    """Concrete disturbance: one (delta0, delta1) pair per subsystem."""

    parts: tuple[tuple[np.ndarray, DelayDisturbance], ...]

    def __post_init__(self):
        parts = tuple((as_matrix(d0), d1) for d0, d1 in self.parts)
        object.__setattr__(self, "parts", parts)

    @property
    def size(self) -> int:
        return len(self.parts)


def disturbance_norm(d: Disturbance) -> float:
    """max over subsystems of norm(delta0) + variation norm of delta1."""
    worst = 0.0
    for delta0, delta1 in d.parts:
        total = inf_norm(delta0)
        var = delta1.variation()
        if var is not None:
            total += inf_norm(var)
        worst = max(worst, total)
    return worst


def structure_gain(p: PerturbationStructure) -> float:
    """max over subsystems and both halves of norm(D) * norm(E)."""
    return max(max(inf_norm(q.d0) * inf_norm(q.e0),
                   inf_norm(q.d1) * inf_norm(q.e1)) for q in p.quads)


def apply(sys: SwitchedDelaySystem, p: PerturbationStructure,
          d: Disturbance) -> SwitchedDelaySystem:
    """Perturbed system with A0_k + D0 delta0 E0 and the delayed terms
    shifted by D1 delta1 E1 (jumps merged at coinciding delays, kernel added
    pointwise on the union grid)."""
    if p.size != sys.size or d.size != sys.size:
        raise DimensionMismatch("structure and disturbance must supply one "
                                "entry per subsystem")
    new_subs = []
    for s, quad, (delta0, delta1) in zip(sys.subsystems, p.quads, d.parts):
        if quad.d0.shape[1] != delta0.shape[0] or \
                quad.e0.shape[0] != delta0.shape[1]:
            raise DimensionMismatch("delta0 does not fit the (D0, E0) pair")
        a0 = s.a0 + quad.d0 @ delta0 @ quad.e0
        terms = {delay: mat.copy() for delay, mat in s.discrete}
        for delay, jump in delta1.jumps:
            if quad.d1.shape[1] != jump.shape[0] or \
                    quad.e1.shape[0] != jump.shape[1]:
                raise DimensionMismatch("delta1 does not fit the (D1, E1) "
                                        "pair")
            mapped = quad.d1 @ jump @ quad.e1
            if delay in terms:
                terms[delay] = terms[delay] + mapped
            else:
                terms[delay] = mapped
        kernel = s.kernel
        if delta1.kernel is not None:
            if quad.d1.shape[1] != delta1.kernel.shape[0] or \
                    quad.e1.shape[0] != delta1.kernel.shape[1]:
                raise DimensionMismatch("delta1 kernel does not fit the "
                                        "(D1, E1) pair")
            kernel = add_kernels(kernel,
                                 delta1.kernel.map(quad.d1, quad.e1))
        discrete = tuple(sorted(terms.items()))
        new_subs.append(DelaySubsystem(a0, discrete, kernel))
    return SwitchedDelaySystem(sys.n, sys.h, tuple(new_subs))


def sample_disturbance(p: PerturbationStructure, target_norm: float,
                       seed: int, *,
                       jump_delays=None) -> Disturbance:
    """Deterministic pseudo-random disturbance of the given norm.

    Entries are drawn uniform on [-1, 1] from a splitmix64 stream, then each
    subsystem's (delta0, delta1) pair is rescaled so its norm equals
    target_norm exactly. jump_delays optionally gives, per subsystem, the
    delays at which delta1 places its jumps (default: one jump at delay 1.0).
    """
    if target_norm < 0:
        raise ValueError("target_norm must be nonnegative")
    rng = SplitMix64(seed)
    if jump_delays is None:
        jump_delays = tuple((1.0,) for _ in range(p.size))
    if len(jump_delays) != p.size:
        raise DimensionMismatch("need one delay tuple per subsystem")
    parts = []
    for quad, delays in zip(p.quads, jump_delays):
        r, q = quad.d0.shape[1], quad.e0.shape[0]
        s, pp = quad.d1.shape[1], quad.e1.shape[0]
        delta0 = np.array([[rng.uniform(-1.0, 1.0) for _ in range(q)]
                           for _ in range(r)])
        jumps = tuple(
            (delay, np.array([[rng.uniform(-1.0, 1.0) for _ in range(pp)]
                              for _ in range(s)]))
            for delay in delays)
        delta1 = DelayDisturbance(jumps=jumps)
        current = inf_norm(delta0)
        var = delta1.variation()
        if var is not None:
            current += inf_norm(var)
        if current == 0.0:
            if target_norm > 0.0:
                raise ValueError("sampled an all-zero pair; cannot scale to "
                                 "a positive norm")
            scale = 0.0
        else:
            scale = target_norm / current
        delta0 = scale * delta0
        delta1 = DelayDisturbance(
            jumps=tuple((delay, scale * mat) for delay, mat in delta1.jumps))
        parts.append((delta0, delta1))
    return Disturbance(tuple(parts))
