"""Exception types raised by the wga package."""


class WgaError(Exception):
    """Base class for all wga errors."""


class InvalidParams(WgaError, ValueError):
    """A parameter set failed validation."""


class NonPositiveGamma(InvalidParams):
    pass


class NonFiniteValue(InvalidParams):
    pass


class NegativeDissipation(InvalidParams):
    pass


class ZeroCoupling(WgaError):
    """The atom couples to neither resonator mode, so the A/B transform is undefined."""


class NotSingleMode(WgaError):
    """A closed-form single-mode result was requested in the two-mode regime."""


class NumericalFailure(WgaError):
    """Base class for failures of the numerical core (mapped to CLI exit code 3)."""


class DefectiveMatrix(NumericalFailure):
    pass


class SingularShift(NumericalFailure):
    pass


class DivergentAmplitude(NumericalFailure):
    pass


class OnShellPole(NumericalFailure):
    pass


class VanishingBackground(NumericalFailure):
    pass


class DegenerateJC(NumericalFailure):
    pass


class UnknownColumns(WgaError):
    pass


class ConvergenceWarning(UserWarning):
    pass
