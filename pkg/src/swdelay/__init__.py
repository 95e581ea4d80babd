"""Switched linear time-delay systems: certificates, radii, simulation.

Public surface re-exported here:

- model types (:class:`DelaySubsystem`, :class:`SwitchedDelaySystem`,
  :class:`DistributedKernel`) and their envelope/variation operations,
- matrix primitives under the max-row-sum norm (:mod:`swdelay.linalg`),
- common-certificate search (:func:`find_common_lclf`) and verification,
- structured perturbations and disturbances (:mod:`swdelay.perturb`),
- stability-radius bounds (:mod:`swdelay.radius`),
- the fixed-step switched-delay simulator (:mod:`swdelay.simulate`), whose
  hot loop runs compiled when the extension is built and falls back to a
  bit-identical pure-Python twin otherwise.
"""

from .certify import (LclfCertificate, LpSolution, certify_dominated,
                      find_common_lclf, lp_solve, margin_lp,
                      verify_certificate)
from .errors import (DimensionMismatch, DominationViolated, IterationLimit,
                     NegativeStructure, NotHurwitzBound, NotMetzler,
                     NotPositive, NotPositiveBound, NotStable, SingularMatrix,
                     StepMismatch, StructureNotDominating, SwdelayError)
from .linalg import (inf_norm, invert, is_metzler, metzler_is_hurwitz,
                     metzlerize)
from .model import (DelaySubsystem, DistributedKernel, SwitchedDelaySystem,
                    characteristic_at_zero, dominates, envelope_matrix,
                    is_positive_system, variation_matrix)
from .perturb import (DelayDisturbance, Disturbance, PerturbationStructure,
                      StructureQuad, apply, disturbance_norm,
                      sample_disturbance, structure_gain)
from .radius import (RadiusReport, radius_bounds_corollary5,
                     radius_bounds_theorem2, radius_lower_theorem3,
                     subsystem_radius_positive, subsystem_radius_unstructured)
from .simulate import (Constant, Periodic, RandomDwell, Trajectory,
                       decay_envelope_check, positivity_check, simulate,
                       stepper_backend, trajectory_to_csv)
from .sysfile import SystemFile, SystemFileError, load_system_file

__version__ = "0.1.0"

__all__ = [
    "Constant", "DelayDisturbance", "DelaySubsystem", "DimensionMismatch",
    "DistributedKernel", "Disturbance", "DominationViolated",
    "IterationLimit", "LclfCertificate", "LpSolution", "NegativeStructure",
    "NotHurwitzBound", "NotMetzler", "NotPositive", "NotPositiveBound",
    "NotStable", "Periodic", "PerturbationStructure", "RadiusReport",
    "RandomDwell", "SingularMatrix", "StepMismatch", "StructureQuad",
    "StructureNotDominating", "SwdelayError", "SwitchedDelaySystem",
    "SystemFile", "SystemFileError", "Trajectory", "apply",
    "certify_dominated", "characteristic_at_zero", "decay_envelope_check",
    "disturbance_norm", "dominates", "envelope_matrix", "find_common_lclf",
    "inf_norm", "invert", "is_metzler", "is_positive_system",
    "load_system_file", "lp_solve", "margin_lp", "metzler_is_hurwitz",
    "metzlerize", "positivity_check", "radius_bounds_corollary5",
    "radius_bounds_theorem2", "radius_lower_theorem3", "sample_disturbance",
    "simulate", "stepper_backend", "structure_gain",
    "subsystem_radius_positive", "subsystem_radius_unstructured",
    "trajectory_to_csv", "variation_matrix", "verify_certificate",
]
