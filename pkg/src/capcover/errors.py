class CapError(Exception):
    """Base class for all errors raised by capcover."""


class MapFormatError(CapError, ValueError):
    pass


class ContractError(CapError, ValueError):
    """A caller broke an operation's precondition."""


class InfeasibleTour(CapError):
    """Some required tour node cannot be reached from the others."""


class GenerationError(CapError):
    pass


class PlannerError(CapError, RuntimeError):
    """The planner reached an internally inconsistent state."""
