"""Exception types raised across the package."""


class DomainError(ValueError):
    """A point lies on or outside the unit circle."""


class DegenerateError(ValueError):
    """A geometric construction is undefined (e.g. an element fixes the center)."""


class OutOfRegionError(ValueError):
    """A curve, ball or sample leaves the unmasked part of a grid."""


class GroupMismatchError(ValueError):
    """Two surface points refer to different groups."""


class InadmissibleDensityError(ValueError):
    """A density fails the admissibility condition for a curve family."""


class NeighborhoodError(RuntimeError):
    """No normal neighborhood could be certified around a point."""
