"""Exception hierarchy shared by every package of the lab."""


class LabError(Exception):
    """Base class for all errors raised by the lab."""


class ConfigError(LabError):
    """Config file missing or not parseable."""


class ConfigValidationError(ConfigError):
    """Config parsed but violates the schema.

    Attributes:
        field: Dotted path of the offending field (e.g. ``resonator.coupling_efficiency``)
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class PreconditionError(LabError, ValueError):
    """An operation was called with inputs outside its documented domain."""


class PulseOverlapError(PreconditionError):
    """Two pulses of a sequence overlap in time."""


class SamplingError(PreconditionError):
    """Sample grid too coarse for the detuning span it must represent."""


class ModeSearchError(LabError):
    """No whispering-gallery resonance could be bracketed.

    Attributes:
        bracket: Search state at failure (scan window, sign pattern, candidates)
    """

    def __init__(self, message: str, bracket: dict | None = None):
        self.bracket = bracket or {}
        super().__init__(f"{message} (bracket state: {self.bracket})")


class ConvergenceError(LabError):
    """An iterative refinement did not reach its tolerance."""


class RootResolutionError(LabError):
    """Root bracketing could not resolve all roots of the steady-state equation."""


class FitError(LabError):
    """A fit cannot be attempted on the given data."""


class ScenarioError(LabError):
    """Unknown scenario or malformed scenario request."""
