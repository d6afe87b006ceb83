"""Exception types shared across the library.

Every error raised on purpose by this package derives from CoopMotionError,
so callers (notably the CLI) can separate expected failure modes from bugs.
"""


class CoopMotionError(Exception):
    """Base class for all errors raised by this package."""


class NotNormalized(CoopMotionError):
    """Total probability mass differs from 1 beyond the construction tolerance."""


class NegativeMass(CoopMotionError):
    """A probability weight or atom is negative."""


class EmptyGrid(CoopMotionError):
    """A sup-distance evaluation grid contains no points."""


class WindowOverflow(CoopMotionError):
    """Evolution would grow the support window past the configured cap."""


class BudgetExceeded(CoopMotionError):
    """The tree sampler would exceed its node budget."""


class WindowTooSmall(CoopMotionError):
    """A mesh window is too short to hold a meaningful stencil."""


class MeshTooCoarse(CoopMotionError):
    """A mesh violates the resolution preconditions of the sandwich argument."""


class CapExceeded(CoopMotionError):
    """An iteration cap was reached before the monitored event occurred."""


class SupportEscape(CoopMotionError):
    """A test function's support sticks out of the quadrature grid."""


class InvalidPi(CoopMotionError):
    """A residue-class probability vector does not sum to 1."""


class DomainError(CoopMotionError):
    """An argument lies outside the mathematical domain of an operation."""
