"""Exception taxonomy shared across the package.

Every failure mode that callers are expected to handle has a named class so
the CLI can map it to an exit code (numerical trouble vs. bad configuration)
without string matching.
"""


class ThinflowError(Exception):
    """Base class for all package errors."""


class ConfigError(ThinflowError):
    """Invalid or inconsistent run configuration (CLI exit code 3)."""


class NumericalError(ThinflowError):
    """Numerical failure in an otherwise valid run (CLI exit code 2)."""


# --- kernel ---------------------------------------------------------------

class QuadratureDivergence(NumericalError):
    """Tail-truncation error estimate of the Fourier quadrature too large."""


class UnsupportedDimension(ConfigError):
    """Dimension outside {1, 2}."""


class FitFailure(NumericalError):
    """Envelope fit impossible (too few local maxima in the window)."""


# --- spectral --------------------------------------------------------------

class GridMismatch(ConfigError):
    """Operands sampled on different grids."""


class OrderExceeded(ConfigError):
    """Requested derivative order beyond the tabulated maximum."""


class BoundaryContamination(NumericalError):
    """Operator stencil touches the truncation boundary where the field
    is not yet negligible."""


# --- semigroup ---------------------------------------------------------------

class TailTooFat(NumericalError):
    """Initial data does not decay below tail_tol at the grid boundary."""


class InterpolationOutOfRange(NumericalError):
    """Convolution pulled a sample from outside the tabulated kernel."""


class InsufficientDecay(NumericalError):
    """Norms hit the floating-point floor before enough fit points."""


# --- branching ---------------------------------------------------------------

class ThickNodalSet(NumericalError):
    """Near-zero set of the log combination exceeds the measure threshold
    (violates the transversality convention)."""


class VanishingDenominator(NumericalError):
    """Solvability denominator below denom_tol; ratio undefined."""


class DegenerateQuadratic(NumericalError):
    """Quadratic coefficient below tolerance; fell back to the linear case."""


class AllZeroQuadraticPart(NumericalError):
    """All three quadratic-form coefficients vanish."""


class IllConditionedResultant(NumericalError):
    """Resultant roots too ill-conditioned for certified enclosures."""


class ContinuumDetected(NumericalError):
    """System degenerates to identical/indistinguishable equations: a
    continuum of solutions rather than isolated roots."""


# --- profiles ---------------------------------------------------------------

class ShootingNoConvergence(NumericalError):
    """Bisection/secant shooting failed to converge."""


class StiffnessFailure(NumericalError):
    """Integrator step collapsed near the degenerate interface."""


class WrongBundle(NumericalError):
    """Fitted growth exponent lies on the rejected |y|^(4/n) bundle."""


class SecantStall(NumericalError):
    """Secant iteration on the nonlinear eigenvalue stalled."""
