"""Exception taxonomy shared across the simulator."""


class ArenaError(Exception):
    """Base class for every error raised by this package."""


class GeometryDomainError(ArenaError):
    """Degenerate or out-of-domain geometric input."""


class ProtocolError(ArenaError):
    """Violation of an interface contract: palettes, activation sets, wire messages."""


class CapabilityError(ArenaError):
    """An algorithm or light write used information its model does not grant."""


class UnreachableStateError(ArenaError):
    """A state was observed that the algorithm's rules deliberately leave undefined."""


class PreconditionError(ArenaError):
    """Input outside an operation's stated precondition."""


class ConstraintError(ArenaError):
    """Problem-generator constraint violated; the message names the constraint."""


class ScheduleExhausted(ArenaError):
    """A scripted schedule ran out before the run finished."""


class ConfigError(ArenaError):
    """Invalid run configuration; carries the offending field name."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class InsufficientInformation(ArenaError):
    """Raised by an algorithm whose snapshot cannot support any decision.

    Not a simulator failure: the engine records which robot reported it and
    the run ends with an insufficient-information verdict.
    """
