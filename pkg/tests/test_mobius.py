import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import disk_points, mobius_params
from modlab import DegenerateError, DomainError, GroupPresentation, MobiusTransform
from modlab.hyperbolic import hyp_distance
from modlab.mobius import apply, bisector_half_plane_contains, compose, enumerate_orbit, inverse

G_HALF = MobiusTransform(-0.5)   # z -> (z + 0.5) / (1 + 0.5 z), so g(0) = 0.5
CYCLIC = GroupPresentation((G_HALF,), 6)


def test_apply_sends_a_to_zero():
    assert apply(MobiusTransform(0.5), 0.5) == pytest.approx(0)


def test_identity():
    assert apply(MobiusTransform.identity(), 0.3 + 0.1j) == 0.3 + 0.1j


def test_direct_substitution():
    assert apply(G_HALF, 0.5) == pytest.approx(0.8, abs=1e-15)


def test_translation_constructor():
    assert MobiusTransform.translation(0.5) == G_HALF
    assert MobiusTransform.translation(0.3j)(0) == pytest.approx(0.3j)


def test_compose_examples():
    g = MobiusTransform(0.5, 0.4)
    assert compose(MobiusTransform.identity(), g).param_distance(g) < 1e-14
    assert compose(g, inverse(g)).is_identity(1e-12)
    # by hand: g(g(0)) with g(z) = (z + 0.5) / (1 + 0.5 z)
    assert compose(G_HALF, G_HALF)(0) == pytest.approx(0.8, abs=1e-15)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        MobiusTransform(1.0)
    with pytest.raises(DomainError):
        G_HALF(1.2)


def test_theta_is_wrapped():
    assert MobiusTransform(0, 3 * np.pi).theta == pytest.approx(np.pi)


@given(mobius_params(), mobius_params(), disk_points(0.99))
def test_compose_agrees_with_sequential_application(p1, p2, z):
    g1, g2 = MobiusTransform(*p1), MobiusTransform(*p2)
    g = compose(g1, g2)
    assert abs(g.a) < 1
    assert g(z) == pytest.approx(g1(g2(z)), abs=1e-9)


@given(mobius_params(0.98), disk_points(0.99))
def test_inverse_round_trip(p, z):
    g = MobiusTransform(*p)
    assert g.inverse()(g(z)) == pytest.approx(z, abs=1e-9)
    assert compose(g, g.inverse()).is_identity(1e-10)


@given(mobius_params(), disk_points(0.999))
def test_maps_disk_into_disk(p, z):
    assert abs(MobiusTransform(*p)(z)) < 1


@given(mobius_params(), disk_points(0.9))
def test_derivative_matches_difference_quotient(p, z):
    g = MobiusTransform(*p)
    e = 1e-6
    fd = (g(z + e) - g(z - e)) / (2 * e)
    assert g.derivative(z) == pytest.approx(fd, rel=1e-6)


def test_serialization_round_trip():
    grp = GroupPresentation((MobiusTransform(0.2 - 0.1j, 0.3), G_HALF), 4)
    back = GroupPresentation.from_json(grp.to_json())
    assert back == grp


def test_trivial_orbit():
    assert enumerate_orbit(GroupPresentation(), 0.2).points == (0.2,)


def test_cyclic_orbit_word_length_two():
    orbit = enumerate_orbit(CYCLIC.truncated(2), 0)
    assert np.allclose(orbit.points, [0, 0.5, -0.5, 0.8, -0.8], atol=1e-14)
    assert orbit.word_lengths == (0, 1, 1, 2, 2)


def test_cyclic_orbit_word_length_zero():
    assert enumerate_orbit(CYCLIC.truncated(0), 0.3).points == (0.3,)


def test_finite_group_enumeration_closes():
    rot = GroupPresentation((MobiusTransform.rotation(2 * np.pi / 5),), 10)
    assert len(rot.elements) == 5
    assert rot.exhausted
    assert not CYCLIC.exhausted


def test_elements_are_distinct():
    grp = GroupPresentation((MobiusTransform(-0.5), MobiusTransform(-0.5j)), 3)
    a = np.array([e.transform.a for e in grp.elements])
    r = np.exp(1j * np.array([e.transform.theta for e in grp.elements]))
    gaps = np.abs(a[:, None] - a[None]) + np.abs(r[:, None] - r[None]) + np.eye(a.size)
    assert gaps.min() >= 1e-10
    # free group on two letters has 1 + 4 + 12 + 36 reduced words of length <= 3
    assert len(grp.elements) == 53


def test_words_spell_their_elements():
    grp = GroupPresentation((MobiusTransform(-0.4), MobiusTransform(0.3j, 0.2)), 3)
    for e in grp.elements:
        g = MobiusTransform.identity()
        for letter in reversed(e.word):
            g = compose(grp.letters[letter], g)
        assert g.param_distance(e.transform) < 1e-10


@pytest.mark.parametrize("k,m", [(1, 1), (2, 1), (2, 2), (1, 3)])
def test_orbit_of_orbit_points_is_in_longer_orbit(k, m):
    grp = GroupPresentation((MobiusTransform(-0.3), MobiusTransform(-0.3j)), k + m)
    z0 = 0.1 + 0.05j
    big = enumerate_orbit(grp, z0).as_array()
    for w in enumerate_orbit(grp.truncated(k), z0).points:
        for v in enumerate_orbit(grp.truncated(m), w).points:
            assert np.min(np.abs(big - v)) < 1e-9


def test_orbit_discreteness_witness():
    pts = enumerate_orbit(CYCLIC, 0).as_array()
    d = hyp_distance(pts[:, None], pts[None, :]) + np.diag(np.full(pts.size, np.inf))
    assert d.min() >= hyp_distance(0, 0.5) - 1e-9


def test_bisector_examples():
    assert bisector_half_plane_contains(G_HALF, 0, 0)
    assert not bisector_half_plane_contains(G_HALF, 0, 0.5)
    # 0.25 is the hyperbolic midpoint of [0, 0.5]
    mid = (np.sqrt(3) - 1) / (np.sqrt(3) + 1)
    assert abs(hyp_distance(mid, 0) - hyp_distance(mid, 0.5)) < 1e-12
    assert not bisector_half_plane_contains(G_HALF, 0, mid)


def test_bisector_at_quarter():
    # h(0.25, 0) < h(0.25, 0.5): 0.25 sits on the zeta side
    assert hyp_distance(0.25, 0) < hyp_distance(0.25, 0.5)
    assert bisector_half_plane_contains(G_HALF, 0, 0.25)


def test_bisector_degenerate_element():
    with pytest.raises(DegenerateError):
        bisector_half_plane_contains(MobiusTransform.rotation(1.0), 0, 0.1)


@given(mobius_params(), disk_points(0.8), disk_points(0.99))
def test_bisector_is_distance_comparison(p, zeta, z):
    g = MobiusTransform(*p)
    if hyp_distance(zeta, g(zeta)) < 1e-6:
        return
    inside = bisector_half_plane_contains(g, zeta, z)
    assert inside == (hyp_distance(z, zeta) < hyp_distance(z, g(zeta)) - 1e-12)
