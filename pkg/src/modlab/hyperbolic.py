"""Poincare-disk metric, hyperbolic balls, grid regions and area.

The disk carries the metric ``h(z1, z2) = log((1 + t) / (1 - t))`` with
``t = |z1 - z2| / |1 - z1 conj(z2)|``, whose length element is
``2 |dz| / (1 - |z|^2)`` and whose area element is ``4 dm / (1 - |z|^2)^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError

METRIC_MODES = ("hyperbolic", "euclidean")


def check_mode(mode: str) -> str:
    if mode not in METRIC_MODES:
        raise ValueError(f"unknown metric mode {mode!r}; expected one of {METRIC_MODES}")
    return mode


def as_disk_points(z, name="z"):
    """Return ``z`` as a complex array, raising DomainError unless ``|z| < 1``."""
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)) or np.any(np.abs(arr) >= 1.0):
        raise DomainError(f"{name} must lie strictly inside the unit disk")
    return arr


def _pair_terms(z1, z2):
    # |1 - z1 conj(z2)|^2 = P + |z1 - z2|^2 with P = (1 - |z1|^2)(1 - |z2|^2),
    # both pieces free of cancellation near the unit circle
    z1 = as_disk_points(z1, "z1")
    z2 = as_disk_points(z2, "z2")
    r1, r2 = np.abs(z1), np.abs(z2)
    P = (1.0 - r1) * (1.0 + r1) * (1.0 - r2) * (1.0 + r2)
    d2 = np.abs(z1 - z2) ** 2
    return P, d2


def pseudo_distance(z1, z2):
    """Pseudo-hyperbolic distance ``|z1 - z2| / |1 - z1 conj(z2)|``."""
    P, d2 = _pair_terms(z1, z2)
    return np.sqrt(d2 / (P + d2))


def hyp_distance(z1, z2):
    """Hyperbolic distance between points of the unit disk.

    Broadcasts over array arguments. Uses ``2 artanh(t)`` for small
    pseudo-distance ``t`` and ``log((1 + t)^2 / (1 - t^2))`` with
    ``1 - t^2 = P / (P + |z1 - z2|^2)`` otherwise, which stays accurate for
    points close to the unit circle.
    """
    P, d2 = _pair_terms(z1, z2)
    t = np.sqrt(d2 / (P + d2))
    with np.errstate(divide="ignore", invalid="ignore"):
        far = 2.0 * np.log1p(t) - np.log(P) + np.log(P + d2)
    d = np.where(t < 0.5, 2.0 * np.arctanh(np.minimum(t, 0.5)), far)
    return float(d) if np.ndim(d) == 0 else d


def length_density(z, mode="hyperbolic"):
    """Length element factor: ``2 / (1 - |z|^2)`` or 1 in Euclidean mode."""
    z = np.asarray(z, dtype=complex)
    if check_mode(mode) == "euclidean":
        return np.ones(z.shape)
    return 2.0 / (1.0 - np.abs(z) ** 2)


def area_density(z, mode="hyperbolic"):
    """Area element factor: ``4 / (1 - |z|^2)^2`` or 1 in Euclidean mode."""
    return length_density(z, mode) ** 2


def euclidean_disk_of_ball(center, radius):
    """Euclidean center and radius of the hyperbolic ball ``B_h(center, radius)``."""
    c = complex(as_disk_points(center, "center"))
    t = np.tanh(radius / 2.0)
    denom = 1.0 - t * t * abs(c) ** 2
    return c * (1.0 - t * t) / denom, t * (1.0 - abs(c) ** 2) / denom


@dataclass(frozen=True)
class HyperbolicBall:
    """Open ball ``{y : h(center, y) < radius}``."""

    center: complex
    radius: float

    def __post_init__(self):
        as_disk_points(self.center, "center")
        if not self.radius >= 0:
            raise ValueError("radius must be nonnegative")

    def contains(self, z):
        return np.asarray(hyp_distance(self.center, z)) < self.radius

    def euclidean_disk(self):
        return euclidean_disk_of_ball(self.center, self.radius)


@dataclass(frozen=True, eq=False)
class GridRegion:
    """Rectangular grid of square cells with a per-cell inside flag.

    Cell ``(j, i)`` (row ``j``, column ``i``) has center
    ``x0 + (i + 1/2) h + 1j * (y0 + (j + 1/2) h)``. Cells whose center has
    ``|z| > 1 - h`` are always masked out.
    """

    x0: float
    y0: float
    cell_size: float
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.cell_size > 0:
            raise ValueError("cell_size must be positive")
        mask = np.array(self.mask, dtype=bool)
        if mask.ndim != 2:
            raise ValueError("mask must be two-dimensional")
        object.__setattr__(self, "mask", mask)
        mask &= np.abs(self.centers) <= 1.0 - self.cell_size
        mask.setflags(write=False)

    @classmethod
    def from_bounds(cls, xmin, xmax, ymin, ymax, cell_size):
        nx = max(1, int(np.ceil((xmax - xmin) / cell_size - 1e-9)))
        ny = max(1, int(np.ceil((ymax - ymin) / cell_size - 1e-9)))
        return cls(xmin, ymin, cell_size, np.ones((ny, nx), dtype=bool))

    @classmethod
    def square(cls, half_width, n, center=0j):
        """``n x n`` grid covering the square of the given half width."""
        h = 2.0 * half_width / n
        center = complex(center)
        return cls(center.real - half_width, center.imag - half_width, h,
                   np.ones((n, n), dtype=bool))

    @property
    def shape(self):
        return self.mask.shape

    @property
    def nx(self):
        return self.mask.shape[1]

    @property
    def ny(self):
        return self.mask.shape[0]

    @property
    def bounds(self):
        h = self.cell_size
        return (self.x0, self.x0 + self.nx * h, self.y0, self.y0 + self.ny * h)

    @property
    def centers(self):
        h = self.cell_size
        x = self.x0 + (np.arange(self.nx) + 0.5) * h
        y = self.y0 + (np.arange(self.ny) + 0.5) * h
        return x[None, :] + 1j * y[:, None]

    def restrict(self, predicate):
        """Copy with the mask intersected with ``predicate(centers)``."""
        keep = np.asarray(predicate(self.centers), dtype=bool)
        return GridRegion(self.x0, self.y0, self.cell_size, self.mask & keep)

    def with_mask(self, mask):
        return GridRegion(self.x0, self.y0, self.cell_size, mask)

    def area_elements(self, mode="hyperbolic"):
        """Per-cell area weights for midpoint integration; 0 on masked cells."""
        w = area_density(self.centers, mode) * self.cell_size ** 2
        return np.where(self.mask, w, 0.0)

    def same_grid(self, other):
        return (self.x0 == other.x0 and self.y0 == other.y0
                and self.cell_size == other.cell_size and self.shape == other.shape)

    def __eq__(self, other):
        if not isinstance(other, GridRegion):
            return NotImplemented
        return self.same_grid(other) and np.array_equal(self.mask, other.mask)

    __hash__ = None


def hyp_area(region: GridRegion) -> float:
    """Hyperbolic area of the unmasked cells (midpoint rule)."""
    return float(region.area_elements("hyperbolic").sum())


def _pair_bound(r, r0):
    # h(z1, z2) <= 2 artanh(t) with t bounded by the two pseudo-distance caps
    # available inside B(0, r0): r / (1 - r0^2) and the diameter 2 r0 / (1 + r0^2).
    t = np.minimum(r / (1.0 - r0 ** 2), 2.0 * r0 / (1.0 + r0 ** 2))
    return 2.0 * np.arctanh(t)


def comparison_constant(r0: float) -> float:
    """Constant ``C1`` with ``C1 h(z1, z2) <= |z1 - z2|`` on ``B(0, r0)``.

    Built the way the classical argument does: an upper bound ``B(r)`` for
    ``h`` in terms of ``r = |z1 - z2|``, a slope bound ``M`` on a short
    interval ``(0, r1)`` and the supremum of ``B(r) / r`` on ``[r1, 2 r0]``;
    ``1 / C1`` is the larger of the two. The result is valid, not optimal.

    Raises
    ------
    ValueError
        If ``r0`` is not in ``(0, 1/2)``.
    """
    r0 = float(r0)
    if not 0.0 < r0 < 0.5:
        raise ValueError("r0 must lie in (0, 1/2)")
    kink = 2.0 * r0 * (1.0 - r0 ** 2) / (1.0 + r0 ** 2)
    r1 = kink / 2.0
    # B(r)/r increases up to the kink, so on (0, r1) it is dominated by its value at r1.
    slope = _pair_bound(r1, r0) / r1
    grid = np.concatenate([np.linspace(r1, 2.0 * r0, 2001), [kink]])
    sup = float(np.max(_pair_bound(grid, r0) / grid))
    return 1.0 / max(slope, sup)


def lower_bound_check(r: float) -> bool:
    """Check ``log((1 + r/2) / (1 - r/2)) >= r`` for ``r`` in ``(0, 1)``."""
    if not 0.0 < r < 1.0:
        raise ValueError("r must lie in (0, 1)")
    # 2 artanh(r/2) is the same logarithm, free of cancellation for small r
    return bool(2.0 * np.arctanh(r / 2.0) >= r)
