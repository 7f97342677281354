import math

import numpy as np
import pytest

from fracperim import models as geo
from fracperim.errors import (
    DimensionMismatchError,
    InvalidInputError,
    SamplingError,
    UnsupportedRegionError,
)
from fracperim.special import normal_tail

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# distances


def test_euclidean_pythagoras():
    assert geo.distance(geo.euclidean(2), [0, 0], [3, 4]) == pytest.approx(5.0)


def test_torus_wraparound():
    d = geo.distance(geo.flat_torus([TWO_PI]), [0.1], [6.2])
    assert d == pytest.approx(TWO_PI - 6.1, rel=1e-12)


def test_sphere_antipodal():
    s2 = geo.sphere(2, 1.0)
    assert geo.distance(s2, [0, 0, 1], [0, 0, -1]) == pytest.approx(math.pi)


def test_hyperbolic_radial_distance():
    h3 = geo.hyperbolic3()
    # geodesic balls at the origin are Euclidean balls of radius tanh(rho/2)
    p = [math.tanh(0.7 / 2.0), 0.0, 0.0]
    assert geo.distance(h3, [0, 0, 0], p) == pytest.approx(0.7, rel=1e-12)


def test_distance_axioms_random_probes():
    rng = geo.rng_stream(123, 0)
    models = [
        geo.euclidean(3),
        geo.flat_torus([2.0, 3.0]),
        geo.sphere(2, 1.5),
        geo.hyperbolic3(),
        geo.gaussian_space(2),
    ]
    for model in models:
        pts = [geo.sample_region(model, _finite_patch(model), rng) for _ in range(6)]
        for x in pts:
            assert geo.distance(model, x, x) == 0.0
            for y in pts:
                assert geo.distance(model, x, y) == pytest.approx(geo.distance(model, y, x), abs=1e-14)
                for z in pts:
                    assert geo.distance(model, x, z) <= geo.distance(model, x, y) + geo.distance(model, y, z) + 1e-12


def _finite_patch(model):
    if model.finite_volume:
        return geo.FullSpace()
    if model.kind == "hyperbolic3":
        return geo.Ball((0.0, 0.0, 0.0), 2.0)
    return geo.Ball(tuple(0.0 for _ in range(model.dim)), 2.0)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        geo.distance(geo.euclidean(2), [0, 0], [1, 2, 3])


# ---------------------------------------------------------------------------
# measures


def test_arc_measure():
    assert geo.region_measure(geo.flat_torus([TWO_PI]), geo.Arc([(0.0, math.pi)])) == pytest.approx(math.pi)


def test_hemisphere_measure():
    s2 = geo.sphere(2, 1.0)
    cap = geo.Cap((0, 0, 1), math.pi / 2)
    assert geo.region_measure(s2, cap) == pytest.approx(2.0 * math.pi, rel=1e-12)


def test_gaussian_halfspace_measure():
    g1 = geo.gaussian_space(1)
    assert geo.region_measure(g1, geo.HalfSpace((1.0,), 0.0)) == pytest.approx(0.5)
    assert geo.region_measure(g1, geo.HalfSpace((2.0,), 2.0)) == pytest.approx(normal_tail(1.0), rel=1e-12)


def test_gaussian_fullspace_unit_mass():
    assert geo.region_measure(geo.gaussian_space(3), geo.FullSpace()) == 1.0


def test_ball_measures():
    assert geo.region_measure(geo.euclidean(2), geo.Ball((0.3, 0.1), 2.0)) == pytest.approx(4 * math.pi)
    assert geo.region_measure(geo.euclidean(3), geo.Ball((0, 0, 0), 1.0)) == pytest.approx(4 * math.pi / 3)
    h3 = geo.hyperbolic3()
    assert geo.region_measure(h3, geo.Ball((0, 0, 0), 1.0)) == pytest.approx(
        math.pi * (math.sinh(2.0) - 2.0), rel=1e-12
    )


def test_complement_involution_finite_volume():
    tor = geo.flat_torus([TWO_PI, 4.0])
    region = geo.Arc([(0.2, 1.0), (0.5, 2.0)])
    total = geo.region_measure(tor, region) + geo.region_measure(tor, geo.Complement(region))
    assert total == pytest.approx(tor.volume, rel=1e-14)


def test_intersection_measures_plane():
    e2 = geo.euclidean(2)
    cone = geo.Cone((1.0, 0.0), math.pi / 4)
    ball = geo.Ball((0.0, 0.0), 1.0)
    assert geo.region_measure(e2, geo.Intersection(cone, ball)) == pytest.approx(math.pi / 4)
    assert geo.region_measure(e2, geo.Intersection(geo.Complement(cone), ball)) == pytest.approx(3 * math.pi / 4)
    hp = geo.HalfSpace((0.0, 1.0), 0.0)
    assert geo.region_measure(e2, geo.Intersection(hp, ball)) == pytest.approx(math.pi / 2)


def test_intersection_measures_line_and_gauss():
    e1 = geo.euclidean(1)
    E = geo.Ball((0.5,), 0.5)
    Om = geo.Ball((0.0,), 2.0)
    assert geo.region_measure(e1, geo.Intersection(E, Om)) == pytest.approx(1.0)
    assert geo.region_measure(e1, geo.Intersection(geo.Complement(E), Om)) == pytest.approx(3.0)
    g1 = geo.gaussian_space(1)
    E = geo.HalfSpace((1.0,), 0.0)
    Om = geo.Ball((0.0,), 1.0)
    from fracperim.special import normal_cdf

    assert geo.region_measure(g1, geo.Intersection(E, Om)) == pytest.approx(normal_cdf(1.0) - 0.5, rel=1e-12)
    assert geo.region_measure(g1, geo.Intersection(geo.Complement(E), geo.Complement(Om))) == pytest.approx(
        normal_cdf(-1.0), rel=1e-12
    )


def test_annulus_measure():
    e2 = geo.euclidean(2)
    ann = geo.Intersection(geo.Ball((0, 0), 5.0), geo.Complement(geo.Ball((0, 0), 2.0)))
    assert geo.region_measure(e2, ann) == pytest.approx(math.pi * (25 - 4))


def test_unsupported_measure_rejected():
    e2 = geo.euclidean(2)
    offcenter = geo.Intersection(geo.Ball((5.0, 0.0), 1.0), geo.Ball((5.5, 0.0), 1.0))
    with pytest.raises(UnsupportedRegionError):
        geo.region_measure(e2, offcenter)


def test_union_requires_disjoint():
    e1 = geo.euclidean(1)
    with pytest.raises(InvalidInputError):
        geo.region_measure(e1, geo.Union(geo.Ball((0.0,), 1.0), geo.Ball((0.5,), 1.0)))


# ---------------------------------------------------------------------------
# membership


def test_cone_membership():
    e2 = geo.euclidean(2)
    cone = geo.Cone((1.0, 0.0), math.pi / 4)
    assert geo.region_contains(e2, cone, [1.0, 0.5])
    assert not geo.region_contains(e2, cone, [-1.0, 0.1])


def test_complement_ball_membership():
    e2 = geo.euclidean(2)
    region = geo.Complement(geo.Ball((0.0, 0.0), 1.0))
    assert not geo.region_contains(e2, region, [0.5, 0.0])
    assert geo.region_contains(e2, region, [2.0, 0.0])


def test_intersection_membership():
    e2 = geo.euclidean(2)
    region = geo.Intersection(geo.HalfSpace((1.0, 0.0), 0.0), geo.Ball((0.0, 0.0), 2.0))
    assert geo.region_contains(e2, region, [1.0, 1.0])
    assert not geo.region_contains(e2, region, [-1.0, 1.0])
    assert not geo.region_contains(e2, region, [1.9, 1.9])


def test_arc_membership_wraps():
    tor = geo.flat_torus([TWO_PI])
    arc = geo.Arc([(5.5, 2.0)])  # wraps through 0
    assert geo.region_contains(tor, arc, [6.0])
    assert geo.region_contains(tor, arc, [0.5])
    assert not geo.region_contains(tor, arc, [3.0])


# ---------------------------------------------------------------------------
# sampling


def test_sample_arc_membership():
    tor = geo.flat_torus([TWO_PI])
    arc = geo.Arc([(0.0, math.pi)])
    rng = geo.rng_stream(42, 0)
    for _ in range(200):
        p = geo.sample_region(tor, arc, rng)
        assert geo.region_contains(tor, arc, p)


def test_ball_sample_mean_clt():
    e2 = geo.euclidean(2)
    rng = geo.rng_stream(7, 1)
    n = 100_000
    pts = np.array([geo.sample_region(e2, geo.Ball((0.0, 0.0), 1.0), rng) for _ in range(n)])
    sigma = 1.0 / (2.0 * math.sqrt(n))
    assert abs(pts[:, 0].mean()) < 3.2 * sigma
    assert abs(pts[:, 1].mean()) < 3.2 * sigma


def test_gaussian_halfspace_conditional_tail():
    g1 = geo.gaussian_space(1)
    rng = geo.rng_stream(11, 3)
    n = 100_000
    pts = np.array([geo.sample_region(g1, geo.HalfSpace((1.0,), 0.0), rng)[0] for _ in range(n)])
    assert (pts > 0).all()
    frac = float((pts > 1.0).mean())
    target = 2.0 * normal_tail(1.0)  # P(x > 1 | x > 0)
    se = math.sqrt(target * (1 - target) / n)
    assert abs(frac - target) < 4 * se


def test_empirical_subregion_measure_within_4se():
    tor = geo.flat_torus([TWO_PI])
    region = geo.Arc([(0.0, 5.0)])
    sub = geo.Arc([(1.0, 2.0)])
    rng = geo.rng_stream(5, 9)
    n = 100_000
    hits = sum(geo.region_contains(tor, sub, geo.sample_region(tor, region, rng)) for _ in range(n))
    p_true = 2.0 / 5.0
    se = math.sqrt(p_true * (1 - p_true) / n)
    assert abs(hits / n - p_true) < 4 * se


def test_sphere_cap_sampling():
    s2 = geo.sphere(2, 2.0)
    cap = geo.Cap((1.0, 1.0, 0.0), 0.7)
    rng = geo.rng_stream(3, 2)
    for _ in range(300):
        p = geo.sample_region(s2, cap, rng)
        assert geo.region_contains(s2, cap, p)


def test_h3_ball_sampling_radial_cdf():
    h3 = geo.hyperbolic3()
    rng = geo.rng_stream(17, 4)
    R = 1.5
    n = 40_000
    rhos = np.array([geo.distance(h3, np.zeros(3), geo.sample_region(h3, geo.Ball((0, 0, 0), R), rng)) for _ in range(n)])
    assert rhos.max() <= R + 1e-9
    # volume fraction inside rho=1 matches the closed form
    frac = float((rhos <= 1.0).mean())
    target = (math.sinh(2.0) - 2.0) / (math.sinh(2 * R) - 2 * R)
    se = math.sqrt(target * (1 - target) / n)
    assert abs(frac - target) < 4 * se


def test_infinite_region_sampling_rejected():
    with pytest.raises(SamplingError):
        geo.sample_region(geo.euclidean(2), geo.FullSpace(), geo.rng_stream(1, 1))


def test_sampling_deterministic_given_stream():
    e2 = geo.euclidean(2)
    ball = geo.Ball((0.0, 0.0), 1.0)
    a = [geo.sample_region(e2, ball, geo.rng_stream(99, 5)) for _ in range(3)]
    b = [geo.sample_region(e2, ball, geo.rng_stream(99, 5)) for _ in range(3)]
    assert all((x == y).all() for x, y in zip(a, b))


def test_sphere_point_validation():
    s2 = geo.sphere(2, 1.0)
    with pytest.raises(InvalidInputError):
        geo.distance(s2, [0, 0, 1.001], [0, 0, 1])


def test_rejection_inefficiency_error():
    # a tiny ball far from the origin forces rejection from a huge enclosing
    # ball; the acceptance rate collapses below 1e-4
    h3 = geo.hyperbolic3()
    far = math.tanh(5.0 / 2.0)
    region = geo.Ball((far, 0.0, 0.0), 0.02)
    with pytest.raises(SamplingError, match="acceptance rate"):
        geo.sample_region(h3, region, geo.rng_stream(1, 2))
