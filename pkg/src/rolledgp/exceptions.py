"""Exception types raised by rolledgp."""


class RolledGPError(Exception):
    """Base class for all computation errors in this package."""


class CutLocusError(RolledGPError):
    """An inverse exponential or transport was requested across a cut locus."""


class NotPositiveDefiniteError(RolledGPError, ValueError):
    pass


class NoConvergenceError(RolledGPError):
    pass


class DegenerateError(RolledGPError):
    """A covariance update produced a (numerically) singular factor."""


class RankDeficientError(RolledGPError, ValueError):
    pass


class InvalidSpecError(RolledGPError, ValueError):
    pass


class NonUnitError(RolledGPError, ValueError):
    pass
