"""Exception hierarchy shared by all pointlike modules."""


class PointlikeError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(PointlikeError):
    """Evaluation requested at a point where the quantity is undefined."""


class QuadratureError(PointlikeError):
    """An adaptive quadrature failed to meet its tolerance."""


class StiffnessError(PointlikeError):
    """The ODE integrator's step size collapsed below the floor."""


class GuardBandError(PointlikeError):
    """Not enough data outside the node guard band to match a solution."""


class FitError(PointlikeError):
    """A least-squares fit was too ill-conditioned or had no valid data."""


class NoConvergence(PointlikeError):
    """An iterative scheme did not converge within its budget."""


class BracketError(PointlikeError):
    """A root scan hit its ceiling before finding the requested roots."""


class TruncationError(PointlikeError):
    """A mode truncation target could not be reached within the budget."""


class ModelMismatch(PointlikeError):
    """Modes passed to an operation do not belong to the given model."""


class NoPointMass(PointlikeError):
    """Operation requires the point-mass channel but the model has nu = 0."""
