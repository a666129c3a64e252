"""Exception hierarchy shared by all modules."""


class ItpLabError(Exception):
    """Base class for all package errors."""


class DomainError(ItpLabError, ValueError):
    """An argument lies outside the domain of an operation."""


class UnsupportedCaseError(ItpLabError, ValueError):
    """The requested case (e.g. a degenerate medium pair) is not supported."""


class IntegrationError(ItpLabError, RuntimeError):
    """The radial ODE integrator failed.

    Attributes
    ----------
    radius : float
        Radius at which the integrator stopped.
    reason : str
        ``"step underflow"`` or ``"step budget"``.
    """

    def __init__(self, message, radius=float("nan"), reason=""):
        super().__init__(message)
        self.radius = radius
        self.reason = reason


class DtnPoleError(ItpLabError, ZeroDivisionError):
    """The boundary value of a mode vanishes, so its DtN eigenvalue is a pole."""


class NearSingularError(ItpLabError, RuntimeError):
    """A boundary value problem is (nearly) singular.

    Attributes
    ----------
    condition : float
        Estimated condition number of the solve.
    """

    def __init__(self, message, condition=float("inf")):
        super().__init__(message)
        self.condition = condition


class ContourProximityError(ItpLabError, RuntimeError):
    """A zero of the function lies too close to a contour.

    Attributes
    ----------
    min_abs : float
        Smallest sampled modulus on the contour.
    median_abs : float
        Median sampled modulus on the contour.
    """

    def __init__(self, message, min_abs=0.0, median_abs=0.0):
        super().__init__(message)
        self.min_abs = min_abs
        self.median_abs = median_abs


class ConvergenceError(ItpLabError, RuntimeError):
    """An iterative method exhausted its budget.

    Attributes
    ----------
    gap : float
        Relative change between the last two iterates.
    """

    def __init__(self, message, gap=float("nan")):
        super().__init__(message)
        self.gap = gap


class UsageError(ItpLabError):
    """Invalid command-line usage or configuration."""
