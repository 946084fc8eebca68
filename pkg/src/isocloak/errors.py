"""Exception hierarchy shared by all modules."""


class CloakError(Exception):
    """Base class for every error raised by :mod:`isocloak`."""


class DomainError(CloakError, ValueError):
    """Argument outside the domain of a map or profile (e.g. ``|x| > 3``)."""


class SingularMapError(CloakError, ValueError):
    """Push-forward requested at a point where the radial map is singular."""


class InfeasibleLaminateError(CloakError, ValueError):
    """The two-phase mean conditions admit no positive solution."""


class SingularMediumError(CloakError, ValueError):
    """A material eigenvalue vanishes where the radial ODE divides by it."""


class SpecialFunctionRangeError(CloakError, OverflowError):
    """Riccati-Bessel argument outside the supported range."""


class StiffnessError(CloakError, RuntimeError):
    """Adaptive integrator step size collapsed.

    Attributes
    ----------
    radius : float
        Radius at which the integrator gave up.
    """

    def __init__(self, message, radius):
        super().__init__(f"{message} (at r = {radius:.6g})")
        self.radius = radius


class ResonanceError(CloakError, ArithmeticError):
    """The boundary value of the regular solution is (numerically) zero.

    Attributes
    ----------
    mode : object
        The offending mode, when known.
    """

    def __init__(self, message, mode=None):
        super().__init__(message if mode is None else f"{message} [mode {mode}]")
        self.mode = mode


class ConfigError(CloakError, ValueError):
    """Configuration document failed validation.

    Attributes
    ----------
    problems : list of str
        One entry per offending field.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))
