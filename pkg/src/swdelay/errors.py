"""Exception types shared across the analysis modules."""


class SwdelayError(Exception):
    """Base class for all analysis errors raised by this package."""


class SingularMatrix(SwdelayError):
    """A pivot fell below the singularity threshold during elimination."""


class NotMetzler(SwdelayError):
    """An operation requiring a Metzler matrix received a non-Metzler one."""


class NotPositiveBound(SwdelayError):
    """The supplied bounding subsystem is not a positive system."""


class DimensionMismatch(SwdelayError):
    """Matrix or vector dimensions are inconsistent."""


class IterationLimit(SwdelayError):
    """The LP solver exceeded its pivot budget; result is indeterminate."""


class NotPositive(SwdelayError):
    """A subsystem required to be positive is not."""


class NotStable(SwdelayError):
    """A positive subsystem required to be exponentially stable is not."""


class NegativeStructure(SwdelayError):
    """Structuring matrices required to be entrywise nonnegative are not."""


class DominationViolated(SwdelayError):
    """A subsystem is not dominated by the supplied bounding system."""


class NotHurwitzBound(SwdelayError):
    """The bounding system's characteristic matrix is not Hurwitz."""


class StructureNotDominating(SwdelayError):
    """A bounding structure does not dominate every subsystem structure."""


class StepMismatch(SwdelayError):
    """The integration step does not divide a delay, horizon or duration."""
