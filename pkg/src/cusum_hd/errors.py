"""Exception and warning types shared across the package."""


class CusumHdError(Exception):
    """Base class for all package errors."""


class IngestError(CusumHdError):
    """Raised when a CSV cell or row cannot be parsed.

    Carries the 1-based (row, column) position of the offending cell when
    known; column is None for structural problems such as ragged rows.
    """

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class TooShort(CusumHdError):
    """Panel has fewer than the minimum number of time points."""


class InvalidLayout(CusumHdError):
    """Requested block layout is impossible for the given sample size."""


class InvalidTrim(CusumHdError):
    """Trimming parameter leaves no admissible time indices."""


class InvalidLag(CusumHdError):
    """Autocovariance lag out of range."""


class InvalidBandwidth(CusumHdError):
    """Variance bandwidth not compatible with the series length."""


class InvalidLevel(CusumHdError):
    """Significance level outside (0, 1)."""


class InsufficientReplicates(CusumHdError):
    """Monte Carlo size below the supported minimum."""


class DegenerateVariance(CusumHdError):
    """A scale estimate is zero or negative where positivity is required."""

    def __init__(self, message, coordinate=None):
        super().__init__(message)
        self.coordinate = coordinate


class SplitTooShort(CusumHdError):
    """A split subsample is too short for the requested bandwidth."""

    def __init__(self, message, coordinate=None):
        super().__init__(message)
        self.coordinate = coordinate


class DegenerateFiltering(CusumHdError):
    """Block filtering removed every block of a coordinate."""

    def __init__(self, message, coordinate=None):
        super().__init__(message)
        self.coordinate = coordinate


class UnstableModel(CusumHdError):
    """Simulation model parameters violate a stationarity condition."""


class DegenerateModel(CusumHdError):
    """Simulation model has no effective weight after truncation."""


class InvalidPlan(CusumHdError):
    """Change plan is inconsistent (duplicate coordinates, bad grid)."""


class ConfigError(CusumHdError):
    """Run configuration is internally inconsistent."""


class UnderResolvedTail(UserWarning):
    """Quantile requested beyond the resolution of the Monte Carlo sample."""


class DegenerateReplicate(UserWarning):
    """A bootstrap replicate had zero conditional variance and was redrawn."""
