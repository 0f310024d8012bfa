"""Exception types shared across the library."""


class CfdmError(Exception):
    """Base class for all library errors."""


class DataError(CfdmError, ValueError):
    """Input data is malformed (wrong shape, non-finite entries, ...)."""


class ParameterError(CfdmError, ValueError):
    """A function argument is out of its valid range."""


class DegeneracyError(CfdmError, ValueError):
    """A degree, row sum, or weight that must be positive is zero."""


class PartitionError(CfdmError, ValueError):
    """A partition is invalid (empty region, bad assignment, ...)."""


class SamplingError(CfdmError, ValueError):
    """Weighted sampling cannot produce the requested sample."""


class SpectrumError(CfdmError, ValueError):
    """The operator spectrum violates an expected structural property."""


class VerificationError(CfdmError, ValueError):
    """An exact mathematical identity failed to hold within tolerance."""


class SolverError(CfdmError, RuntimeError):
    """The iterative eigensolver failed to converge.

    Carries the worst residual of the partially converged eigenpairs when
    available, otherwise ``None``.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConfigError(CfdmError, ValueError):
    """An experiment configuration violates the schema.

    ``field`` names the offending configuration entry when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DatasetError(CfdmError, ValueError):
    """A dataset file cannot be parsed."""
