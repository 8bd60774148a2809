"""Quotient metric on D/G, Dirichlet polygons and normal neighborhoods.

A point of the surface is represented by one point of its orbit. Since the
disk metric is invariant under the group, the distance between two orbits
is ``min_g h(z1, g z2)`` over the (truncated) group.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateError, GroupMismatchError, NeighborhoodError
from .hyperbolic import as_disk_points, hyp_distance
from .mobius import GroupPresentation, MobiusTransform

SAME_POINT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SurfacePoint:
    representative: complex
    group: GroupPresentation

    def __post_init__(self):
        object.__setattr__(self, "representative",
                           complex(as_disk_points(self.representative, "representative")))

    def __eq__(self, other):
        if not isinstance(other, SurfacePoint):
            return NotImplemented
        if self.group != other.group:
            return False
        images = self.group.images(other.representative)
        return bool(np.min(np.abs(images - self.representative)) < SAME_POINT_TOL)

    __hash__ = None


def project(z, group: GroupPresentation) -> SurfacePoint:
    """The natural projection ``z -> G z``."""
    return SurfacePoint(z, group)


@dataclass(frozen=True)
class QuotientDistance:
    value: float
    word_length: int
    at_truncation_boundary: bool


def quotient_distance_info(p1: SurfacePoint, p2: SurfacePoint) -> QuotientDistance:
    """Quotient distance with the word length of the minimizing element.

    ``at_truncation_boundary`` is set when the minimizer has the maximal
    enumerated word length, i.e. a longer word might still do better.
    """
    if p1.group != p2.group:
        raise GroupMismatchError("surface points belong to different groups")
    group = p1.group
    d = hyp_distance(p1.representative, group.images(p2.representative))
    k = int(np.argmin(d))
    length = len(group.elements[k].word)
    boundary = (not group.exhausted) and length == group.max_word_length
    return QuotientDistance(float(d[k]), length, boundary)


def quotient_distance(p1: SurfacePoint, p2: SurfacePoint) -> float:
    return quotient_distance_info(p1, p2).value


@dataclass(frozen=True)
class DirichletPolygon:
    """Intersection of the half-planes ``H_g(center)`` over the truncated group."""

    center: complex
    constraints: tuple

    @classmethod
    def from_group(cls, group: GroupPresentation, center):
        center = complex(as_disk_points(center, "center"))
        gs = tuple(e.transform for e in group.non_identity())
        for g in gs:
            if hyp_distance(center, g(center)) < 1e-14:
                raise DegenerateError("a group element fixes the center")
        return cls(center, gs)

    def contains(self, z, tol=1e-12):
        """Membership test, vectorized over ``z``; boundary points are outside."""
        z = as_disk_points(z)
        flat = z.ravel()
        inside = np.ones(flat.shape, dtype=bool)
        if self.constraints:
            images = np.array([g(self.center) for g in self.constraints])
            d0 = hyp_distance(flat, self.center)
            for start in range(0, images.size, 256):
                dg = hyp_distance(flat[None, :], images[start:start + 256, None])
                inside &= np.all(d0[None, :] < dg - tol, axis=0)
        out = inside.reshape(z.shape)
        return bool(out) if out.ndim == 0 else out

    def raster(self, region):
        """Boolean membership of the cell centers; masked cells are False."""
        centers = region.centers
        out = np.zeros(region.shape, dtype=bool)
        out[region.mask] = self.contains(centers[region.mask])
        return out


def dirichlet_contains(poly: DirichletPolygon, z):
    return poly.contains(z)


def min_orbit_separation(z0, group: GroupPresentation) -> float:
    """``min h(z0, g z0)`` over enumerated non-identity elements (inf if none)."""
    if len(group.elements) <= 1:
        return np.inf
    return float(np.min(hyp_distance(z0, group.images(z0)[1:])))


def _ball_samples(z0, r, rng, n_random, n_angles):
    phi = MobiusTransform.translation(z0)  # 0 -> z0
    s = np.concatenate([np.full(n_angles, r * (1 - 1e-9)), r * rng.random(n_random) ** 0.25])
    ang = np.concatenate([2 * np.pi * np.arange(n_angles) / n_angles,
                          2 * np.pi * rng.random(n_random)])
    return phi(np.tanh(s / 2.0) * np.exp(1j * ang))


def normal_neighborhood_radius(p0: SurfacePoint, cap=2.0, min_probe=1e-3, n_random=2000,
                               n_angles=720, rtol=1e-4, seed=0, tol=1e-9) -> float:
    """Radius of a ball around ``p0`` on which the quotient metric is the disk metric.

    A radius ``r`` is certified when every sampled ``z`` in ``B_h(z0, r)``
    (a ring of ``n_angles`` points at the boundary plus ``n_random`` random
    points) satisfies ``d(z0, z) = h(z0, z)`` within ``tol``; the largest
    certified radius up to ``cap`` is found by bisection and is never more
    than half the minimal orbit separation at ``z0``.

    Raises
    ------
    NeighborhoodError
        If even ``min_probe`` fails or the orbit gap is below it, which
        signals an accumulating orbit.
    """
    z0 = p0.representative
    group = p0.group
    rng = np.random.default_rng(seed)

    def certified(r):
        z = _ball_samples(z0, r, rng, n_random, n_angles)
        h = hyp_distance(z0, z)
        d = np.min(hyp_distance(z0, group.images(z)), axis=0)
        return bool(np.all(h - d <= tol))

    bound = min(cap, min_orbit_separation(z0, group) / 2.0)
    if bound < min_probe:
        raise NeighborhoodError(f"orbit points within {2 * bound:.3g} of each other; "
                                "no neighborhood of the probe size exists")
    if certified(bound):
        return float(bound)
    if not certified(min_probe):
        raise NeighborhoodError("quotient metric differs from the disk metric at the smallest probe")
    lo, hi = min_probe, bound
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if certified(mid):
            lo = mid
        else:
            hi = mid
    return float(lo)
