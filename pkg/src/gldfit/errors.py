"""Exception types shared across the package."""


class DataError(ValueError):
    """Input data cannot be used (missing column, too few rows, bad values)."""


class DegenerateSampleError(DataError):
    """Sample carries no scale information (e.g. all values equal)."""


class EstimationError(DataError):
    """Estimation produced no usable result from the given data."""


class NumericError(RuntimeError):
    """A numeric procedure failed in a way retries could not repair."""
