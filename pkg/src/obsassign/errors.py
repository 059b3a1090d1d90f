"""Exception hierarchy shared by every module of the package."""


class ObsAssignError(Exception):
    """Base class for all package errors."""


class CollisionError(ObsAssignError, ValueError):
    """A sensor sits (numerically) on top of the target position."""


class EmptySetError(ObsAssignError, ValueError):
    """An operation that needs at least one sensor got none."""


class DuplicateSensorError(ObsAssignError, ValueError):
    pass


class SingularCovarianceError(ObsAssignError, ValueError):
    pass


class InfeasibleError(ObsAssignError):
    """No assignment or matching satisfies the hard constraints."""


class TooFewSensorsError(InfeasibleError):
    pass


class TooFewPairsError(InfeasibleError):
    pass


class InstanceTooLargeError(ObsAssignError, ValueError):
    pass


class ConfigError(ObsAssignError, ValueError):
    """Invalid scenario or sweep configuration.

    ``problems`` holds ``(path, message)`` tuples, one per offending field.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [("", problems)]
        self.problems = list(problems)
        text = "; ".join(f"{p}: {m}" if p else m for p, m in self.problems)
        super().__init__(text)
