"""Exception hierarchy shared by every module of the package."""


class SplitGofError(Exception):
    """Base class for all errors raised by splitgof."""


class InvalidSplitError(SplitGofError, ValueError):
    pass


class DegenerateResidualsError(SplitGofError):
    pass


class ModelMismatchError(SplitGofError):
    pass


class LagOutOfRangeError(SplitGofError, IndexError):
    pass


class GridOutOfRangeError(SplitGofError, ValueError):
    pass


class KernelMemoryError(SplitGofError, MemoryError):
    pass


class InvalidLevelError(SplitGofError, ValueError):
    pass


class EstimationError(SplitGofError):
    """Raised when a model cannot be fitted to the supplied data."""


class SingularDesignError(EstimationError):
    pass


class NonConvergenceError(EstimationError):
    pass


class ConstraintViolationError(EstimationError):
    pass


class NoAdmissibleThresholdError(EstimationError):
    pass


class DegenerateDataError(EstimationError):
    pass


class BootstrapEstimationFailure(SplitGofError):
    pass


class ExplosivePathError(SplitGofError):
    pass


class HarnessAbort(SplitGofError):
    """Too many failed replications; the partial report rides along."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
