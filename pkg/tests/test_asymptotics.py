import math

import numpy as np
import pytest

from fracperim import asymptotics as asy
from fracperim import models as geo
from fracperim.errors import DegenerateInversionError, InvalidInputError, UnsupportedRegionError

TWO_PI = 2.0 * math.pi
SHORT = asy.SSchedule((0.2, 0.1, 0.05))


def test_schedule_validation():
    with pytest.raises(InvalidInputError):
        asy.SSchedule((0.4, 0.2))  # too short
    with pytest.raises(InvalidInputError):
        asy.SSchedule((0.2, 0.4, 0.1))  # not decreasing
    with pytest.raises(InvalidInputError):
        asy.SSchedule((1.2, 0.4, 0.1))  # outside (0,1)
    assert asy.SSchedule().values == (0.4, 0.3, 0.2, 0.1, 0.05, 0.025)


def test_extrapolate_exact_linear():
    sched = asy.SSchedule((0.4, 0.2, 0.1, 0.05))
    vals = [(3.0 + 2.0 * s, 0.0) for s in sched.values]
    limit, err = asy.extrapolate_limit(sched, vals)
    assert limit == pytest.approx(3.0, abs=1e-12)


def test_extrapolate_constant():
    vals = [(1.7, 0.0)] * 6
    limit, err = asy.extrapolate_limit(asy.SSchedule(), vals)
    assert limit == pytest.approx(1.7, abs=1e-12)
    assert err < 1e-12


def test_extrapolate_log_model():
    # v(s) = 1 + s log(1/s): slow approach; the fit lands within 0.05 and the
    # error bar covers the true discrepancy
    sched = asy.SSchedule()
    vals = [(1.0 + s * math.log(1.0 / s), 0.0) for s in sched.values]
    limit, err = asy.extrapolate_limit(sched, vals)
    assert abs(limit - 1.0) < 0.05
    assert err >= abs(limit - 1.0)


def test_extrapolate_needs_three_points():
    with pytest.raises(InvalidInputError):
        asy.extrapolate_limit(asy.SSchedule((0.3, 0.2, 0.1)), [(1.0, 0.0)] * 2)


# ---------------------------------------------------------------------------
# predicted limits


def test_predicted_finite_torus_cases():
    tor = geo.flat_torus([TWO_PI])
    E = geo.Arc([(0.0, math.pi)])
    assert asy.predicted_limit_finite(tor, E, geo.FullSpace()) == pytest.approx(math.pi / 2)
    Om = geo.Arc([(0.5, math.pi / 2)])  # inside E
    assert asy.predicted_limit_finite(tor, E, Om) == pytest.approx(math.pi / 4)


def test_predicted_finite_gauss_halfspace():
    g1 = geo.gaussian_space(1)
    E = geo.HalfSpace((1.0,), 0.0)
    assert asy.predicted_limit_finite(g1, E, geo.FullSpace()) == pytest.approx(0.25)


def test_predicted_finite_requires_finite_volume():
    with pytest.raises(InvalidInputError):
        asy.predicted_limit_finite(geo.euclidean(1), geo.Ball((0.0,), 1.0), geo.FullSpace())


def test_predicted_infinite_cases():
    assert asy.predicted_limit_infinite(0.0, 1.0, 3.0) == pytest.approx(1.0)
    assert asy.predicted_limit_infinite(0.25, math.pi / 4, 3 * math.pi / 4) == pytest.approx(3 * math.pi / 8)
    for theta in (0.0, 0.3, 1.0):
        assert asy.predicted_limit_infinite(theta, math.pi / 2, math.pi / 2) == pytest.approx(math.pi / 2)
    with pytest.raises(InvalidInputError):
        asy.predicted_limit_infinite(1.5, 1.0, 1.0)


def test_theta_inverse_examples_and_roundtrip():
    assert asy.theta_inverse(1.0, 1.0, 3.0) == pytest.approx(0.0)
    assert asy.theta_inverse(3 * math.pi / 8, math.pi / 4, 3 * math.pi / 4) == pytest.approx(0.25)
    for theta in (0.1, 0.5, 0.9):
        lim = asy.predicted_limit_infinite(theta, 1.0, 2.0)
        assert asy.theta_inverse(lim, 1.0, 2.0) == pytest.approx(theta, rel=1e-12)
    with pytest.raises(DegenerateInversionError):
        asy.theta_inverse(1.0, 2.0, 2.0)


# ---------------------------------------------------------------------------
# heat density


def test_analytic_heat_density():
    e2 = geo.euclidean(2)
    assert asy.analytic_heat_density(e2, geo.FullSpace()) == 1.0
    assert asy.analytic_heat_density(e2, geo.Ball((0.0, 0.0), 3.0)) == 0.0
    assert asy.analytic_heat_density(e2, geo.HalfSpace((1.0, 0.0), 0.0)) == 0.5
    assert asy.analytic_heat_density(e2, geo.Cone((1.0, 0.0), math.pi / 4)) == 0.25
    assert asy.analytic_heat_density(e2, geo.Complement(geo.Cone((1.0, 0.0), math.pi / 4))) == 0.75
    with pytest.raises(InvalidInputError):
        asy.analytic_heat_density(geo.flat_torus([TWO_PI]), geo.FullSpace())


def test_heat_density_fullspace(quad):
    for model in (geo.euclidean(1), geo.euclidean(2), geo.hyperbolic3()):
        p = np.zeros(model.ambient)
        th = asy.heat_density(model, geo.FullSpace(), p, [1.0], SHORT, quad)
        assert th.theta == pytest.approx(1.0, abs=0.02)


def test_heat_density_bounded_set_vanishes(quad):
    e2 = geo.euclidean(2)
    th = asy.heat_density(e2, geo.Ball((0.3, 0.0), 1.0), np.zeros(2), [2.0], SHORT, quad)
    assert th.theta == 0.0


def test_heat_density_halfplane(quad):
    e2 = geo.euclidean(2)
    th = asy.heat_density(e2, geo.HalfSpace((0.0, 1.0), 0.0), np.zeros(2), [1.0, 2.0], SHORT, quad)
    assert th.theta == pytest.approx(0.5, abs=0.01)
    assert th.r_consistent
    assert th.r_values_checked == (1.0, 2.0)


def test_heat_density_radius_independence(quad):
    e1 = geo.euclidean(1)
    th = asy.heat_density(e1, geo.FullSpace(), np.zeros(1), [1.0, 2.0], asy.SSchedule(), quad)
    assert th.r_consistent


def test_heat_density_finite_volume_rejected(quad):
    with pytest.raises(InvalidInputError):
        asy.heat_density(geo.flat_torus([TWO_PI]), geo.FullSpace(), [0.0], [1.0], SHORT, quad)


def test_heat_density_needs_anchored_point(quad):
    e2 = geo.euclidean(2)
    with pytest.raises(UnsupportedRegionError):
        asy.heat_density(e2, geo.HalfSpace((0.0, 1.0), 0.0), np.array([0.0, 1.0]), [1.0], SHORT, quad)


def test_monotone_density_bound(quad):
    # the kernel mass of a subset never exceeds the full-space mass
    e2 = geo.euclidean(2)
    for s in SHORT.values:
        sub, _ = asy.theta_sweep_value(e2, geo.HalfSpace((1.0, 0.0), 0.0), np.zeros(2), 1.0, s, quad)
        full, _ = asy.theta_sweep_value(e2, geo.FullSpace(), np.zeros(2), 1.0, s, quad)
        assert sub <= full + 1e-10


# ---------------------------------------------------------------------------
# experiment runner


def test_experiment_torus_window(quad):
    tor = geo.flat_torus([TWO_PI])
    E = geo.Arc([(0.0, math.pi)])
    Om = geo.Arc([(0.5, math.pi / 2)])
    rep = asy.run_asymptotic_experiment(tor, E, Om, asy.SSchedule(), quad, tolerance=0.02)
    assert rep.verdict == "pass"
    assert rep.predicted_limit == pytest.approx(math.pi / 4)
    assert abs(rep.extrapolated_limit - math.pi / 4) / (math.pi / 4) < 0.02
    assert rep.runtime_seconds > 0
    assert len(rep.per_s) == 6


def test_experiment_infinite_needs_bounded_window_or_bounded_set(quad):
    e1 = geo.euclidean(1)
    # full window with a bounded set: the limit is its measure
    rep = asy.run_asymptotic_experiment(e1, geo.Ball((0.5,), 0.5), geo.FullSpace(), SHORT, quad, tolerance=0.05)
    assert rep.predicted_limit == pytest.approx(1.0)
    with pytest.raises(InvalidInputError):
        asy.run_asymptotic_experiment(e1, geo.HalfSpace((1.0,), 0.0), geo.FullSpace(), SHORT, quad)


def test_experiment_verdict_fail_on_wrong_tolerance(quad):
    tor = geo.flat_torus([TWO_PI])
    E = geo.Arc([(0.0, math.pi)])
    rep = asy.run_asymptotic_experiment(tor, E, geo.FullSpace(), SHORT, quad, tolerance=1e-6)
    assert rep.verdict == "fail"
