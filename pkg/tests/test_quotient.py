import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import disk_points
from modlab import (DegenerateError, DirichletPolygon, GridRegion, GroupMismatchError,
                    GroupPresentation, MobiusTransform, NeighborhoodError, project,
                    quotient_distance)
from modlab.hyperbolic import hyp_distance
from modlab.mobius import bisector_half_plane_contains
from modlab.quotient import (dirichlet_contains, min_orbit_separation,
                             normal_neighborhood_radius, quotient_distance_info)

CYCLIC = GroupPresentation((MobiusTransform.translation(0.5),), 6)
TWO_GEN = GroupPresentation((MobiusTransform.translation(0.6), MobiusTransform.translation(0.6j)), 3)
TRIVIAL = GroupPresentation()


def brute_force_distance(z1, z2, group):
    # every element applied to each side, both orders
    best = np.inf
    for e in group.elements:
        for f in group.elements:
            best = min(best, hyp_distance(e.transform(z1), f.transform(z2)))
    return best


def test_trivial_group_distance_is_disk_distance():
    assert quotient_distance(project(0.1, TRIVIAL), project(-0.4j, TRIVIAL)) == \
        pytest.approx(hyp_distance(0.1, -0.4j), abs=1e-15)


def test_cyclic_example():
    info = quotient_distance_info(project(0, CYCLIC), project(0.25, CYCLIC))
    assert info.value == pytest.approx(hyp_distance(0, 0.25), abs=1e-9)
    assert info.value == pytest.approx(np.log(1.25 / 0.75), abs=1e-12)
    assert info.word_length == 0 and not info.at_truncation_boundary
    assert info.value == pytest.approx(brute_force_distance(0, 0.25, CYCLIC.truncated(3)), abs=1e-12)


def test_same_orbit_distance_zero():
    assert quotient_distance(project(0, CYCLIC), project(0.5, CYCLIC)) == pytest.approx(0, abs=1e-12)
    assert project(0, CYCLIC) == project(0.8, CYCLIC)
    assert project(0, CYCLIC) != project(0.1, CYCLIC)


def test_group_mismatch():
    with pytest.raises(GroupMismatchError):
        quotient_distance(project(0, CYCLIC), project(0, TWO_GEN))


def test_truncation_flag():
    # z2 = g^6(0) needs the longest word to be reached
    far = complex(CYCLIC.elements[-1].transform(0))
    info = quotient_distance_info(project(0, CYCLIC), project(far, CYCLIC))
    assert info.at_truncation_boundary


@given(disk_points(0.9), disk_points(0.9))
def test_single_sided_covers_two_sided(z1, z2):
    # words of length <= 2 contain every g1^-1 g2 with |g1|, |g2| <= 1
    one_sided = lambda k: quotient_distance(project(z1, TWO_GEN.truncated(k)),
                                            project(z2, TWO_GEN.truncated(k)))
    two_sided = brute_force_distance(z1, z2, TWO_GEN.truncated(1))
    assert one_sided(2) <= two_sided + 1e-12
    assert two_sided <= one_sided(1) + 1e-12


@given(disk_points(0.9), disk_points(0.9), disk_points(0.9))
def test_quotient_metric_properties(z1, z2, z3):
    p1, p2, p3 = (project(z, TWO_GEN) for z in (z1, z2, z3))
    d12 = quotient_distance(p1, p2)
    assert d12 <= hyp_distance(z1, z2) + 1e-12
    assert abs(d12 - quotient_distance(p2, p1)) < 1e-9
    # the composite word in the triangle has length up to 6, so check on points near 0
    if max(abs(z1), abs(z2), abs(z3)) < 0.3:
        assert quotient_distance(p1, p3) <= d12 + quotient_distance(p2, p3) + 1e-9


@given(disk_points(0.9), disk_points(0.9))
def test_distance_monotone_in_word_length(z1, z2):
    values = [quotient_distance(project(z1, TWO_GEN.truncated(k)), project(z2, TWO_GEN.truncated(k)))
              for k in range(4)]
    assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))


def test_dirichlet_examples():
    poly = DirichletPolygon.from_group(CYCLIC, 0)
    assert dirichlet_contains(poly, 0)
    assert dirichlet_contains(poly, 0.1)
    assert not dirichlet_contains(poly, 0.3)
    assert not dirichlet_contains(poly, (np.sqrt(3) - 1) / (np.sqrt(3) + 1))


def test_dirichlet_matches_half_planes(rng):
    poly = DirichletPolygon.from_group(TWO_GEN, 0.05)
    z = 0.9 * np.sqrt(rng.random(300)) * np.exp(2j * np.pi * rng.random(300))
    expected = np.ones(z.size, bool)
    for e in TWO_GEN.non_identity():
        expected &= bisector_half_plane_contains(e.transform, 0.05, z)
    assert np.array_equal(poly.contains(z), expected)


def test_dirichlet_degenerate_center():
    rot = GroupPresentation((MobiusTransform.rotation(np.pi / 2),), 4)
    with pytest.raises(DegenerateError):
        DirichletPolygon.from_group(rot, 0)


def test_interior_points_map_outside_their_half_plane(rng):
    poly = DirichletPolygon.from_group(TWO_GEN, 0)
    z = 0.6 * np.sqrt(rng.random(400)) * np.exp(2j * np.pi * rng.random(400))
    z = z[poly.contains(z)]
    assert z.size > 10
    for e in TWO_GEN.non_identity():
        g = e.transform
        assert not np.any(bisector_half_plane_contains(g, 0, g(z)))


def test_polygon_shrinks_with_word_length():
    reg = GridRegion.square(0.95, 96)
    rasters = [DirichletPolygon.from_group(TWO_GEN.truncated(k), 0.02).raster(reg) for k in range(4)]
    for big, small in zip(rasters, rasters[1:]):
        assert not np.any(small & ~big)


def test_raster_excludes_masked_cells():
    reg = GridRegion.square(0.95, 32).restrict(lambda z: z.real > 0)
    ras = DirichletPolygon.from_group(CYCLIC, 0.0).raster(reg)
    assert not np.any(ras & ~reg.mask)


def test_normal_neighborhood_cyclic():
    r = normal_neighborhood_radius(project(0, CYCLIC))
    assert r == pytest.approx(np.log(3) / 2, rel=0.1)
    assert min_orbit_separation(0, CYCLIC) == pytest.approx(np.log(3), abs=1e-12)


def test_normal_neighborhood_cap():
    assert normal_neighborhood_radius(project(0.2, TRIVIAL), cap=1.5) == 1.5
    assert normal_neighborhood_radius(project(0, CYCLIC), cap=0.2) == 0.2


def test_normal_neighborhood_is_certified(rng):
    z0 = 0.1 + 0.2j
    r = normal_neighborhood_radius(project(z0, TWO_GEN))
    # fresh samples inside the ball: quotient and disk distances coincide
    s = r * np.sqrt(rng.random(2000))
    z = MobiusTransform.translation(z0)(np.tanh(s / 2) * np.exp(2j * np.pi * rng.random(2000)))
    qd = np.array([quotient_distance(project(z0, TWO_GEN), project(w, TWO_GEN)) for w in z])
    assert np.allclose(qd, hyp_distance(z0, z), atol=1e-9)


def test_normal_neighborhood_accumulation():
    # generator moving 0 by about 1e-4: orbit points crowd the probe ball
    tiny = GroupPresentation((MobiusTransform.translation(1e-4),), 3)
    with pytest.raises(NeighborhoodError):
        normal_neighborhood_radius(project(0, tiny), min_probe=1e-3)
