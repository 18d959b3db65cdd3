"""Exception hierarchy shared by all solver modules."""


class ResonanceError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ResonanceError, ValueError):
    """Argument outside the region where an operation is defined."""


class NonAnalyticError(ResonanceError):
    """A non-analytic potential was evaluated off the real axis."""


class ExpressionSyntaxError(ResonanceError, ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(ExpressionSyntaxError):
    pass


class NonConvergenceError(ResonanceError):
    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history or []


class EscapeError(NonConvergenceError):
    """Root iteration left the half-plane Re z > 0."""


class UnboundedError(ResonanceError):
    """A supremum grows without bound up to the sampling cutoff."""


class StepUnderflowError(ResonanceError):
    pass


class MaxStepsError(ResonanceError):
    pass


class RiccatiPoleError(ResonanceError):
    """The Riccati variable blew up: the underlying solution vanished."""


class DecayViolationError(ResonanceError):
    """The potential does not decay fast enough against e^{2 z x}."""


class ZeroOnContourError(ResonanceError):
    pass


class CollapseError(ResonanceError):
    """Two roots of a cluster coincide within tolerance."""


class SmallDenominatorError(ResonanceError):
    pass


class UnsupportedProblemError(ResonanceError):
    pass


class KappaPoleError(ResonanceError):
    """Reflection coefficient of the half-line Green's function is singular."""


class DerivativeNoiseError(ResonanceError):
    pass


class ConfigError(ResonanceError, ValueError):
    pass
