"""Exception types shared across the library."""


class NckLabError(Exception):
    """Base class for all library errors."""


class NegativePowerOfSingular(NckLabError):
    """Negative fractional power requested for a matrix with a zero eigenvalue."""


class NotPositiveSemidefinite(NckLabError):
    """Matrix has an eigenvalue below the PSD clipping tolerance."""


class EnumerationTooLarge(NckLabError):
    """Exact sign enumeration would exceed the 2^n budget."""


class NotInRange(NckLabError):
    """Element is not in the range of the Jordan multiplier."""


class NonCommuting(NckLabError):
    """Unitary does not commute with the density within tolerance."""


class DegenerateInstance(NckLabError):
    """Ratio undefined because the denominator vanishes."""


class QuadratureNotConverged(NckLabError):
    """Boundary quadrature truncation tail exceeds the requested tolerance."""


class ConfigInvalid(NckLabError):
    """Experiment configuration failed validation."""
