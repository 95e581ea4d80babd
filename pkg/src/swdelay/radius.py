"""Bounds on the stability radius of switched delay systems.

The radius is the smallest disturbance size (max over subsystems of
norm(delta0_k) + norm(delta1_k)) able to destroy exponential stability under
some admissible switching. It is sandwiched between a certificate-based lower
bound (the optimal margin of the common-certificate LP divided by the
structure gain) and the smallest single-subsystem radius; exact subsystem
radii are computable for positive subsystems with nonnegative structure. A
dominating positive bound gives the cruder but assumption-light lower bound
1 / (M0 * norm(inv(H0) @ 1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certify import find_common_lclf
from .errors import (DominationViolated, NegativeStructure, NotHurwitzBound,
                     NotPositive, NotStable, SingularMatrix,
                     StructureNotDominating)
from .linalg import inf_norm, invert, metzler_is_hurwitz
from .model import (DelaySubsystem, SwitchedDelaySystem, characteristic_at_zero,
                    dominates, envelope_matrix, is_positive_system)
from .perturb import PerturbationStructure, StructureQuad, structure_gain

#: Entrywise slack for the nonnegative-inverse stability test.
STABLE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class RadiusReport:
    """Lower/upper radius bounds with provenance; None marks Unavailable."""

    lower: float | None
    upper: float | None
    lower_method: str | None
    upper_method: str | None
    certificate_xi: np.ndarray | None = None


def _characteristic_inverse(s: DelaySubsystem) -> np.ndarray:
    """inv(P(0)) for a positive, exponentially stable subsystem.

    P(0) = -(A0 + sum of jumps + signed kernel integral); for a positive
    subsystem stability is equivalent to inv(P(0)) >= 0, checked here.
    """
    if not is_positive_system(s):
        raise NotPositive("subsystem radius formulas require a positive "
                          "subsystem")
    p0 = characteristic_at_zero(s)
    try:
        p0_inv = invert(p0)
    except SingularMatrix as exc:
        raise NotStable("characteristic matrix at 0 is singular") from exc
    if (p0_inv < -STABLE_TOL).any():
        raise NotStable("positive subsystem is not exponentially stable")
    return p0_inv


def subsystem_radius_positive(s: DelaySubsystem, quad: StructureQuad):
    """Radius band (lower, upper) of one positive subsystem.

    With gains g_ij = norm(E_i @ inv(P(0)) @ D_j) the radius lies in
    [1/max_ij g_ij, 1/max_i g_ii]; when D0 = D1 or E0 = E1 the band collapses
    and the upper value is exact. Raises NotPositive, NotStable,
    NegativeStructure.
    """
    for name, m in (("D0", quad.d0), ("E0", quad.e0),
                    ("D1", quad.d1), ("E1", quad.e1)):
        if (m < 0.0).any():
            raise NegativeStructure(f"{name} must be entrywise nonnegative")
    p0_inv = _characteristic_inverse(s)
    es = (quad.e0, quad.e1)
    ds = (quad.d0, quad.d1)
    gains = [[inf_norm(es[i] @ p0_inv @ ds[j]) for j in range(2)]
             for i in range(2)]
    full = max(gains[0][0], gains[0][1], gains[1][0], gains[1][1])
    diag = max(gains[0][0], gains[1][1])
    lower = 1.0 / full if full > 0.0 else math.inf
    upper = 1.0 / diag if diag > 0.0 else math.inf
    return lower, upper


def subsystem_radius_exact(s: DelaySubsystem, quad: StructureQuad) -> float | None:
    """Exact radius when D0 = D1 or E0 = E1, else None."""
    if not (np.array_equal(quad.d0, quad.d1) or
            np.array_equal(quad.e0, quad.e1)):
        return None
    _, upper = subsystem_radius_positive(s, quad)
    return upper


def subsystem_radius_unstructured(s: DelaySubsystem) -> float:
    """Exact unperturbed-structure radius 1 / norm(inv(A0 + eta(0)))."""
    p0_inv = _characteristic_inverse(s)
    return 1.0 / inf_norm(p0_inv)


def radius_bounds_theorem2(sys: SwitchedDelaySystem,
                           p: PerturbationStructure) -> RadiusReport:
    """Certificate sandwich: LP margin / M0 below, min subsystem radius above.

    The lower half is Unavailable when no common certificate exists; the
    upper half is Unavailable unless every subsystem is positive with
    nonnegative structure and an exact-radius structure (D0 = D1 or E0 = E1).
    """
    cert = find_common_lclf(sys)
    lower = None
    xi = None
    if cert is not None:
        m0 = structure_gain(p)
        lower = cert.margin / m0 if m0 > 0.0 else math.inf
        xi = cert.xi
    upper = None
    values = []
    for s, quad in zip(sys.subsystems, p.quads):
        try:
            exact = subsystem_radius_exact(s, quad)
        except (NotPositive, NotStable, NegativeStructure):
            exact = None
        if exact is None:
            values = None
            break
        values.append(exact)
    if values:
        upper = min(values)
    return RadiusReport(
        lower=lower,
        upper=upper,
        lower_method="Theorem2-LP" if lower is not None else None,
        upper_method="SubsystemMin" if upper is not None else None,
        certificate_xi=xi)


def radius_lower_theorem3(sys: SwitchedDelaySystem, p: PerturbationStructure,
                          bound: DelaySubsystem,
                          bound_quad: StructureQuad) -> float:
    """Domination lower bound 1 / (M0(bound) * norm(-inv(H0) @ 1)).

    Requires: the positive bound's characteristic matrix H0 Hurwitz, every
    subsystem dominated by the bound, and every structure dominated entrywise
    (|D_k| <= D_bound, |E_k| <= E_bound with shared inner dimensions).
    """
    env0 = envelope_matrix(bound)
    if not metzler_is_hurwitz(env0):
        raise NotHurwitzBound("bounding system's characteristic matrix must "
                              "be Hurwitz")
    for i, s in enumerate(sys.subsystems):
        if not dominates(bound, s):
            raise DominationViolated(f"subsystem {i} is not dominated by the "
                                     "bounding system")
    for name, bm in (("d0", bound_quad.d0), ("e0", bound_quad.e0),
                     ("d1", bound_quad.d1), ("e1", bound_quad.e1)):
        if (bm < 0.0).any():
            raise StructureNotDominating(
                f"bounding {name} must be entrywise nonnegative")
        for i, q in enumerate(p.quads):
            m = getattr(q, name)
            if m.shape != bm.shape:
                raise StructureNotDominating(
                    f"subsystem {i} {name} has shape {m.shape}, bound has "
                    f"{bm.shape}")
            if (np.abs(m) > bm + STABLE_TOL).any():
                raise StructureNotDominating(
                    f"subsystem {i} {name} exceeds the bounding structure")
    xi0 = -invert(env0) @ np.ones(bound.n)
    m0 = max(inf_norm(bound_quad.d0) * inf_norm(bound_quad.e0),
             inf_norm(bound_quad.d1) * inf_norm(bound_quad.e1))
    return 1.0 / (m0 * inf_norm(xi0))


def radius_bounds_corollary5(sys: SwitchedDelaySystem,
                             bound: DelaySubsystem) -> RadiusReport:
    """Unstructured sandwich for a dominated positive family.

    lower = 1 / norm(inv(H0)) from the bound, upper = the smallest subsystem
    unstructured radius 1 / max_k norm(inv(H_k)).
    """
    if not is_positive_system(bound):
        raise NotPositive("bounding subsystem must be positive")
    env0 = envelope_matrix(bound)
    if not metzler_is_hurwitz(env0):
        raise NotHurwitzBound("bounding system's characteristic matrix must "
                              "be Hurwitz")
    for i, s in enumerate(sys.subsystems):
        if not is_positive_system(s):
            raise NotPositive(f"subsystem {i} is not positive")
        if not dominates(bound, s):
            raise DominationViolated(f"subsystem {i} is not dominated by the "
                                     "bounding system")
    lower = 1.0 / inf_norm(invert(env0))
    upper = min(subsystem_radius_unstructured(s) for s in sys.subsystems)
    return RadiusReport(lower=lower, upper=upper,
                        lower_method="Corollary5-H0",
                        upper_method="Corollary5-Hk")
