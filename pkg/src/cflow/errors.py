"""Exception hierarchy shared by all numeric modules."""


class CflowError(Exception):
    """Base class for every error raised by this package."""


class PoleError(CflowError):
    """Evaluation requested at a pole of the function."""


class NonConvergence(CflowError):
    """Series or continued fraction failed to converge within the term budget."""


class BranchCut(CflowError):
    """Evaluation requested exactly on a branch cut."""


class Overflow(CflowError):
    """Result exceeds the representable floating-point range."""


class DomainError(CflowError):
    """Input outside the real domain of the requested operation."""


class RangeError(CflowError):
    """Integer argument outside its allowed range."""


class SingularSystem(CflowError):
    """Truncated linear system for the series coefficients is rank deficient."""


class StepSizeUnderflow(CflowError):
    """Adaptive integrator reduced the step below the representable minimum."""


class NoConvergence(CflowError):
    """Iterative solver exhausted its iteration budget."""


class CollisionError(CflowError):
    """Two roots approached within the collision threshold."""


class SingularFlow(CflowError):
    """Flow contour hit a singular point of the flow equation."""


class BranchCollision(CflowError):
    """Implicit recursion step degenerated (vanishing discriminant)."""


class BlowUp(CflowError):
    """Flow diverged at finite flow parameter.

    The divergence location is available as ``tau_star``.
    """

    def __init__(self, message, tau_star=None):
        super().__init__(message)
        self.tau_star = tau_star


class ExceptionalPoint(CflowError):
    """Correction formulas evaluated at the exceptional point g_inv = gamma**2."""


class DivisionByZero(CflowError):
    """A continued-fraction denominator vanished; carries (site, depth)."""

    def __init__(self, message, site=None, depth=None):
        super().__init__(message)
        self.site = site
        self.depth = depth


class DegenerateTrajectory(CflowError):
    """All trajectory points coincide; no cycle diagnostics possible."""


class DimensionMismatch(CflowError):
    """Vector/matrix dimensions are inconsistent."""


class ParseError(CflowError):
    """Config file could not be parsed; carries the offending line number."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class ValidationError(CflowError):
    """Config value violates an invariant; carries the offending key."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class SchemaError(CflowError):
    """CSV input does not match the documented column schema."""


class TruncationWarning(UserWarning):
    """Last retained series term is not negligible against the partial sum."""
