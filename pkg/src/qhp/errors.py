"""Exception hierarchy shared across the package."""


class QhpError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(QhpError):
    """A step distribution (or a walk-spec file) is malformed."""


class ClassError(QhpError):
    """An operation was called on a walk outside its drift regime."""


class DomainError(QhpError):
    """A numerical operation was evaluated outside its mathematical domain."""


class NoExplicitGluing(QhpError):
    """No explicit conformal gluing construction is known for this walk.

    Callers should fall back to the grid solver or Monte Carlo.
    """


class PoleOnPath(QhpError):
    """The integrand of the contour representation has a pole on the
    integration segment for the requested evaluation point."""


class NonConvergence(QhpError):
    """An iterative numerical procedure failed to reach its tolerance."""


class PoleError(QhpError):
    """A function was evaluated exactly at one of its poles."""
