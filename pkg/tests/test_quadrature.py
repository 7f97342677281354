import math

import numpy as np
import pytest

from fracperim import models as geo
from fracperim.errors import InvalidInputError, PrecisionError
from fracperim.quadrature import (
    IntegralEstimate,
    QuadConfig,
    TailClass,
    adaptive_1d,
    integrate_pair,
    integrate_region,
    integrate_time,
)
from fracperim.singkernel import beta_ns


def test_quadconfig_validation():
    with pytest.raises(InvalidInputError):
        QuadConfig(rel_tol=0.0)
    with pytest.raises(InvalidInputError):
        QuadConfig(mc_samples=10)


def test_adaptive_polynomial_exact():
    v, e, _ = adaptive_1d(lambda x: x**6, 0.0, 2.0, 1e-12, 1e-14)
    assert v == pytest.approx(2.0**7 / 7.0, rel=1e-13)


def test_adaptive_singular_endpoint():
    # integrable endpoint singularity x^-0.5
    v, e, _ = adaptive_1d(lambda x: x**-0.5, 1e-12, 1.0, 1e-9, 1e-12)
    assert v == pytest.approx(2.0 - 2e-6, rel=1e-8)


def test_adaptive_precision_error_carries_estimate():
    with pytest.raises(PrecisionError) as err:
        adaptive_1d(lambda x: np.abs(x - math.pi / 7) ** -0.9, 0.0, 1.0, 1e-12, 1e-14, max_depth=8)
    assert err.value.estimate is not None


def test_integrate_time_power_tail_exact(quad):
    # f == 1 with declared limit 1: the part over [1, inf) is exactly 4 at s = 0.5
    est = integrate_time(lambda t: np.ones_like(t), 0.5, quad, TailClass(limit=1.0), t_start=1.0)
    assert est.value == pytest.approx(4.0, rel=1e-9)


def test_integrate_time_exp_small_time(quad):
    # int_0^1 exp(-1/t) t^-1.25 dt = (upper incomplete) Gamma(1/4, 1)
    est = integrate_time(lambda t: np.exp(-1.0 / t), 0.5, quad, TailClass(), t_start=0.0, t_end=1.0)
    # oracle: dense trapezoid on a log grid (independent discretization)
    u = np.linspace(math.log(1e-8), 0.0, 400_001)
    t = np.exp(u)
    oracle = float(np.trapezoid(np.exp(-1.0 / t) * t ** (-0.25), u))
    assert oracle == pytest.approx(0.246255529193, rel=1e-6)
    assert est.value == pytest.approx(oracle, rel=1e-7)


def test_integrate_time_validates_index(quad):
    with pytest.raises(InvalidInputError):
        integrate_time(lambda t: np.ones_like(t), 2.5, quad, TailClass())


def test_integrate_region_ball_area(quad):
    e2 = geo.euclidean(2)
    est = integrate_region(e2, geo.Ball((0.0, 0.0), 1.0), lambda pts: np.ones(len(pts)), quad)
    assert est.value == pytest.approx(math.pi, rel=1e-8)


def test_integrate_region_odd_symmetry(quad):
    e2 = geo.euclidean(2)
    est = integrate_region(e2, geo.Ball((0.0, 0.0), 1.0), lambda pts: pts[:, 0], quad)
    assert abs(est.value) <= max(est.error_bound, 1e-9)


def test_integrate_region_matches_indicator_mass(quad):
    from fracperim.heatkernel import semigroup_indicator, hk_distance_matrix

    tor = geo.flat_torus([2 * math.pi])
    p = np.array([math.pi / 2])
    arc = geo.Arc([(0.0, math.pi)])

    def g(pts):
        d = np.array([geo.distance(tor, p, x) for x in pts])
        vals, _ = hk_distance_matrix(tor, d, [1.0])
        return vals[:, 0]

    est = integrate_region(tor, arc, g, quad)
    ref = semigroup_indicator(tor, arc, p, 1.0, quad)
    assert est.value == pytest.approx(ref, abs=1e-7)


def test_integrate_region_infinite_rejected(quad):
    with pytest.raises(InvalidInputError):
        integrate_region(geo.euclidean(1), geo.FullSpace(), lambda p: np.ones(len(p)), quad)


# ---------------------------------------------------------------------------
# generic pair integrals


def _power_kernel(s):
    def k(X, Y):
        d = np.linalg.norm(np.atleast_2d(X) - np.atleast_2d(Y), axis=1)
        return beta_ns(1, s) * d ** (-1.0 - s)

    return k


def test_pair_1d_closed_form(quad):
    e1 = geo.euclidean(1)
    A = geo.Ball((0.5,), 0.5)
    B = geo.Ball((1.5,), 0.5)
    s = 0.5
    est = integrate_pair(e1, A, B, _power_kernel(s), s, quad)
    # exact double antiderivative: beta * (2 - 2^(1-s)) / (s (1-s))
    exact = beta_ns(1, s) * (2.0 - 2.0 ** (1.0 - s)) / (s * (1.0 - s))
    assert exact == pytest.approx(0.4673899545, rel=1e-9)
    assert est.value == pytest.approx(exact, rel=2e-4)


def test_pair_swap_symmetric(quad):
    e1 = geo.euclidean(1)
    A = geo.Ball((0.5,), 0.5)
    B = geo.Ball((2.0,), 0.5)
    k = _power_kernel(0.3)
    a = integrate_pair(e1, A, B, k, 0.3, quad)
    b = integrate_pair(e1, B, A, k, 0.3, quad)
    assert a.value == pytest.approx(b.value, rel=1e-10)


def test_pair_separated_no_singularity(quad):
    e1 = geo.euclidean(1)
    A = geo.Ball((0.0,), 0.5)
    B = geo.Ball((3.0,), 0.5)
    est = integrate_pair(e1, A, B, lambda X, Y: np.ones(len(np.atleast_2d(X))), 0.5, quad)
    assert est.value == pytest.approx(1.0, rel=1e-9)  # product of lengths


def test_pair_requires_one_finite(quad):
    e1 = geo.euclidean(1)
    with pytest.raises(InvalidInputError):
        integrate_pair(
            e1, geo.HalfSpace((1.0,), 1.0), geo.HalfSpace((-1.0,), 1.0),
            _power_kernel(0.5), 0.5, quad,
        )


def test_pair_index_range(quad):
    e1 = geo.euclidean(1)
    with pytest.raises(InvalidInputError):
        integrate_pair(e1, geo.Ball((0.0,), 0.5), geo.Ball((2.0,), 0.5), _power_kernel(0.5), 1.2, quad)


def test_determinism_bit_identical(quad):
    e1 = geo.euclidean(1)
    A = geo.Ball((0.5,), 0.5)
    B = geo.Ball((1.5,), 0.5)
    k = _power_kernel(0.5)
    a = integrate_pair(e1, A, B, k, 0.5, quad)
    b = integrate_pair(e1, A, B, k, 0.5, quad)
    assert a == b  # bit-identical dataclasses


def test_estimate_algebra():
    a = IntegralEstimate(1.0, 0.1, "adaptive", 10)
    b = IntegralEstimate(2.0, 0.2, "adaptive", 20)
    c = a.plus(b).scaled(2.0)
    assert c.value == pytest.approx(6.0)
    assert c.error_bound == pytest.approx(0.6)
    assert c.n_evals == 30


def test_integrate_region_mc_fallback(quad):
    # hyperbolic balls have exact measures and samplers but no deterministic
    # grid; the Monte Carlo path must agree within its 3-sigma bound
    from dataclasses import replace

    h3 = geo.hyperbolic3()
    ball = geo.Ball((0.0, 0.0, 0.0), 1.0)
    est = integrate_region(h3, ball, lambda pts: np.ones(len(pts)), replace(quad, mc_samples=20000))
    assert est.method == "mc"
    vol = geo.region_measure(h3, ball)
    assert est.value == pytest.approx(vol, abs=max(est.error_bound, 1e-6))
