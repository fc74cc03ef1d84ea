"""Exception types shared across the package."""


class NonlocalLabError(Exception):
    """Base class for all package errors."""


class NegativeKernelError(NonlocalLabError):
    """A kernel sample was negative beyond tolerance."""


class DivergentMomentError(NonlocalLabError):
    """An operation required a finite second moment but got a divergent one."""


class DimMismatchError(NonlocalLabError):
    """Kernel / grid / field dimensions are inconsistent."""


class PadInsufficientError(NonlocalLabError):
    """Kernel mass outside the convolution pad exceeds the allowed fraction."""


class NonFiniteSampleError(NonlocalLabError):
    """A sampled value was NaN or infinite."""


class AsymmetricDiffusionError(NonlocalLabError):
    """The diffusion matrix is not symmetric at some sample point."""


class NonFiniteReactionError(NonlocalLabError):
    """The reaction term produced a non-finite value inside its box."""


class TimeOrderError(NonlocalLabError):
    """Fundamental-solution evaluation with the wrong time ordering."""


class StepDivergedError(NonlocalLabError):
    """The time-marching solution grew beyond the divergence threshold."""

    def __init__(self, message, reached_time=None, partial=None):
        super().__init__(message)
        self.reached_time = reached_time
        self.partial = partial


class SolverSingularError(NonlocalLabError):
    """The implicit linear system could not be solved."""


class UnstableTimestepError(NonlocalLabError):
    """dt fails the pre-flight explicit-stability check for the reaction."""


class UnsupportedFamilyError(NonlocalLabError):
    """Requested closed-form family is not available."""


class QuadratureUnderresolvedError(NonlocalLabError):
    """Quadrature resolution is insufficient near a kernel singularity."""


class BoundFailedError(NonlocalLabError):
    """A Gaussian envelope bound failed at a sample point."""


class NuInsufficientError(NonlocalLabError):
    """The auxiliary-transform rate did not make the transformed constant test negative."""

    def __init__(self, message, max_value=None):
        super().__init__(message)
        self.max_value = max_value


class BoundViolatedError(NonlocalLabError):
    """An invariant-region bound was violated."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NoExceedanceError(NonlocalLabError):
    """The counterexample run never exceeded the threshold before the horizon."""

    def __init__(self, message, max_value=None):
        super().__init__(message)
        self.max_value = max_value


class ConfigError(NonlocalLabError):
    """Scenario configuration is malformed or incomplete."""


class InternalInconsistencyError(NonlocalLabError):
    """A principle conclusion was violated although every hypothesis passed."""
