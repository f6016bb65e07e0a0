"""Exception hierarchy shared across the package."""


class MvLevyError(Exception):
    """Base class for all package-specific errors."""


class DivergentMoment(MvLevyError):
    """Requested jump-measure moment integral diverges."""


class InvalidRegion(MvLevyError):
    """Region parameter (e.g. radius l) is out of range."""


class InfiniteOverlap(MvLevyError):
    """Overlap mass is infinite (x = 0 with an infinite-activity measure)."""


class DimensionMismatch(MvLevyError):
    """Operands live in different dimensions."""


class EmptyMeasure(MvLevyError):
    """An empirical measure with no points was supplied."""


class Blowup(MvLevyError):
    """Trajectory escaped the admissible region.

    Carries the step index at which the guard tripped.
    """

    def __init__(self, step, value):
        super().__init__(f"trajectory exceeded guard at step {step}: |x| = {value:.3e}")
        self.step = step
        self.value = value


class NotInTheta(MvLevyError):
    """The (eps1, eps2, r0, l) tuple is outside the admissible index set."""


class CaseViolation(MvLevyError):
    """Lyapunov parameters satisfy neither threshold case."""


class QuadratureFailure(MvLevyError):
    """Adaptive quadrature failed to reach its tolerance."""


class GridTooCoarse(MvLevyError):
    """Root scan grid cannot separate adjacent roots."""


class NoTransition(MvLevyError):
    """Root-count transition not found in the scanned interval."""


class SigmaViolatesH2(MvLevyError):
    """Piecewise-linear sigma fails positivity, monotonicity, concavity, or domination."""


class ZeroOverlap(MvLevyError):
    """J(kappa) = 0, so the coupling constants are undefined."""


class NoiseFloorExceedsTol(MvLevyError):
    """Fixed-point tolerance is below the Monte Carlo noise floor."""


class UnsupportedFamily(MvLevyError):
    """Drift family or parameter combination is not supported."""
