from typing import List, Optional


class PolaritonError(ValueError):
    """Base class for all input and evaluation errors raised by the package."""


class InvalidParameterError(PolaritonError):
    """A physical parameter is outside the modeled range."""


class DegenerateCouplingError(PolaritonError):
    """|f| is too small for the mixing formulas; use the decoupled assignment."""


class PoleError(PolaritonError):
    """The probe frequency sits on an undamped branch pole."""

    def __init__(self, message: str, branch: Optional[int] = None):
        super().__init__(message)
        self.branch = branch


class SingularSystemError(PolaritonError):
    """The 2x2 scattering system has a vanishing determinant."""


class SweepSpecError(PolaritonError):
    """A sweep specification (grid, unit, fixed parameter) is invalid."""


class UnknownPresetError(PolaritonError):
    """The requested figure preset does not exist."""


class ConfigValidationError(PolaritonError):
    """The JSON config failed validation; ``problems`` lists every offending key."""

    def __init__(self, problems: List[str]):
        self.problems = list(problems)
        super().__init__("invalid config: " + "; ".join(self.problems))
