"""Exception types shared across the package."""


class ModqedError(Exception):
    """Base class for all errors raised by this package."""


class ScheduleDomainError(ModqedError):
    """Time argument outside the domain of a bounded schedule."""


class BracketError(ModqedError):
    """Root bracket does not enclose a sign change."""


class IntegrationError(ModqedError):
    """An ODE integration failed; the message carries the failure time."""


class ValidationError(ModqedError):
    """Invalid input state or parameters."""


class ResonanceError(ValidationError):
    """Harmonic resonance conditions violated; message lists both sides."""


class NoModeError(ModqedError):
    """No plasmon mode exists on the requested bracket."""


class UnsupportedModelError(ModqedError):
    """Requested noise/relaxation model is outside the engine's scope."""


class ConfigError(ModqedError):
    """Scenario configuration is invalid; carries a list of field errors."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(self.issues))
