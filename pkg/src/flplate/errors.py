"""Exception hierarchy shared by all modules."""


class FlplateError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(FlplateError, ValueError):
    """Invalid parameters or scenario configuration."""


class NumericalError(FlplateError, ArithmeticError):
    """A computation could not reach its accuracy contract."""


class BranchPointProximity(NumericalError):
    pass


class DegenerateRoots(NumericalError):
    pass


class NonconvergentQuadrature(NumericalError):
    pass


class UnderResolvedOscillation(NumericalError):
    pass


class IllConditionedDeconvolution(NumericalError):
    pass


class HingeViolation(FlplateError, ValueError):
    """Profile derivatives at the hinge x=0 do not vanish to the required order."""


class ClosureUnavailable(ConfigError):
    pass
