"""Domain errors shared across the package.

Every error carries a stable ``code`` string that the CLI surfaces verbatim
in its machine-readable error records.
"""


class GwbError(Exception):
    """Base class for all domain errors."""

    code = "GwbError"


class NonMonotone(GwbError):
    """A step function with decreasing values was used where a quantile is required."""

    code = "NonMonotone"


class InvalidGrid(GwbError):
    """Grid size below the minimum of 2."""

    code = "InvalidGrid"


class PartitionMismatch(GwbError):
    """Two weighted step functions live on incompatible domains."""

    code = "PartitionMismatch"


class WeightSumInvalid(GwbError):
    """Signed weights of a family do not sum to 1 within tolerance."""

    code = "WeightSumInvalid"


class StdOrder(GwbError):
    """Gaussian pair violates the sigma_1 > sigma_2 hypothesis."""

    code = "StdOrder"


class CollisionBeforeS(GwbError):
    """Extrapolation base time s exceeds the first collision time."""

    code = "CollisionBeforeS"


class DimensionMismatch(GwbError):
    """Operands live in different ambient dimensions."""

    code = "DimensionMismatch"


class TooLarge(GwbError):
    """Problem size exceeds the exact solver's cap."""

    code = "TooLarge"
