"""Exception types shared across the package."""


class ProjectionError(Exception):
    """Base class for domain errors raised by this package."""


class NoRoot(ProjectionError):
    """The residual function has no root in the requested regime."""


class DegeneratePiece(ProjectionError):
    """A quadratic piece collapsed to a constant (count equals t**2)."""


class DegenerateInput(ProjectionError):
    """The input vector is too degenerate for the operation (e.g. constant)."""


class PreconditionFailed(ProjectionError):
    """A bracket construction hypothesis does not hold for this input."""


class NonConvergence(ProjectionError):
    """An iterative solver hit its iteration cap before terminating."""


class InvalidRadius(ProjectionError):
    """The l1 radius is outside the admissible range for the problem."""


class Infeasible(ProjectionError):
    """No feasible point exists for the requested construction."""


class TooLarge(ProjectionError):
    """The instance exceeds the brute-force enumeration size cap."""


class GenerationExhausted(ProjectionError):
    """Instance generation failed the acceptance filter too many times."""
