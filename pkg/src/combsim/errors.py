"""Exception types shared across the simulator modules."""


class CombsimError(Exception):
    """Base class for all package-specific errors."""


class NotHermitianError(CombsimError):
    """Matrix handed to a Hermitian-only routine is not Hermitian."""


class NonUnitaryError(CombsimError):
    """Gate or dense operator is not unitary within tolerance."""


class DimensionMismatchError(CombsimError):
    """Operands act on incompatible Hilbert-space dimensions."""


class QubitOutOfRangeError(CombsimError):
    """Qubit index outside the register."""


class OutOfRangeError(CombsimError):
    """Scalar argument outside its documented domain."""


class ZeroNormProjectionError(CombsimError):
    """Measurement projected onto a zero-probability outcome."""


class StaleRecordError(CombsimError):
    """Reset fed a measurement record for a different qubit set."""


class UnsupportedCouplingError(CombsimError):
    """Requested coupling mode has no gate-level realization."""


class TooLargeError(CombsimError):
    """Register too large for a dense all-matrix operation."""


class DivergedError(CombsimError):
    """Iterative search exceeded its cap without converging."""


class EmptySearchSpaceError(CombsimError):
    """Optimizer invoked with nothing to sample."""


class ConfigError(CombsimError):
    """Invalid or inconsistent configuration; message names the fields."""
