"""Exception hierarchy shared by all modules."""


class EntropometerError(ValueError):
    """Base class for every error raised by the library."""


class SpectrumError(EntropometerError):
    """Invalid or unreadable spectrum definition."""


class DomainError(EntropometerError):
    """Energy (or beta) outside the admissible open interval of a spectrum.

    ``bound`` names the violated side: ``"lower"`` (at or below the ground
    energy) or ``"upper"`` (at or above the infinite-temperature energy).
    """

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class RangeError(EntropometerError):
    """Requested entropy change is not attainable on a finite spectrum.

    ``attainable`` is the open interval of entropy changes (units of k) that
    the target system can absorb from its current state.
    """

    def __init__(self, message, attainable=None):
        super().__init__(message)
        self.attainable = attainable


class StepUnderflowError(EntropometerError):
    """Finite-difference step collapsed below a meaningful size."""


class QuadratureError(EntropometerError):
    """Adaptive quadrature did not reach the requested tolerance."""


class MeasurementMismatch(EntropometerError):
    """Operational and analytic entropy routes disagree beyond tolerance."""


class GraphError(EntropometerError):
    """Malformed accessibility graph or query on an unsupported node."""


class InconsistentGraphError(GraphError):
    """Graph contradicts entropy non-decrease."""
