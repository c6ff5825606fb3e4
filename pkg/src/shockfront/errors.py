"""Exception hierarchy shared by every module."""


class ShockfrontError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 3


class DomainError(ShockfrontError, ValueError):
    exit_code = 1


class GridError(ShockfrontError, ValueError):
    exit_code = 1


class ConfigError(ShockfrontError, ValueError):
    exit_code = 1


class NotApplicable(ShockfrontError):
    exit_code = 1


class SingularParameter(ShockfrontError):
    exit_code = 2


class HypothesisViolated(ShockfrontError):
    exit_code = 2


class CompatibilityError(HypothesisViolated):
    pass


class OutOfValidity(ShockfrontError):
    exit_code = 2


class ValidityLost(ShockfrontError):
    exit_code = 2


class DegenerateShock(ShockfrontError):
    exit_code = 2


class HorizonExceeded(ShockfrontError):
    exit_code = 2


class ConvergenceError(ShockfrontError):
    pass


class QuadratureFailure(ShockfrontError):
    pass


class StepFailure(ShockfrontError):
    pass


class BlowupDetected(ShockfrontError):
    def __init__(self, msg, t=None, bracket=None):
        super().__init__(msg)
        self.t = t
        self.bracket = bracket


class VacuumApproached(ShockfrontError):
    pass


class DomainShrunk(ShockfrontError):
    pass


class PathTooShort(ShockfrontError):
    exit_code = 1


class OutOfDomain(ShockfrontError):
    """Raised when a traced path leaves its field; ``path`` holds the part computed."""

    def __init__(self, msg, path=None):
        super().__init__(msg)
        self.path = path


class DegenerateJumpWarning(UserWarning):
    pass
