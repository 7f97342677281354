import math

import numpy as np
import pytest

from fracperim import models as geo
from fracperim import singkernel as sk
from fracperim.errors import InvalidInputError, SingularInputError

TWO_PI = 2.0 * math.pi


def test_gamma_norm_values():
    assert sk.gamma_norm(1.0) == pytest.approx(1.0 / (2.0 * math.sqrt(math.pi)), rel=1e-13)
    assert sk.gamma_norm(0.5) == pytest.approx(0.25 / math.gamma(0.75), rel=1e-13)
    assert sk.gamma_norm(0.5) == pytest.approx(0.2040122348, rel=1e-9)


def test_gamma_norm_small_index_asymptotics():
    s = 1e-6
    assert sk.gamma_norm(s) / (s / 2.0) == pytest.approx(1.0, abs=1e-5)


def test_gamma_norm_range():
    with pytest.raises(InvalidInputError):
        sk.gamma_norm(2.0)
    with pytest.raises(InvalidInputError):
        sk.gamma_norm(0.0)


def test_beta_values():
    assert sk.beta_ns(1, 0.5) == pytest.approx(0.5 * 2**-0.5 / math.sqrt(math.pi), rel=1e-12)
    assert sk.beta_ns(1, 0.5) == pytest.approx(0.1994711402, rel=1e-9)
    ref = 0.5 * 2**-0.5 * math.gamma(1.25) / (math.pi * math.gamma(0.75))
    assert sk.beta_ns(2, 0.5) == pytest.approx(ref, rel=1e-12)
    assert sk.beta_ns(2, 0.5) == pytest.approx(0.0832419839, rel=1e-9)


def test_beta_small_index_sphere_normalization():
    # beta * (unit-sphere area) / s -> 1
    for n in (1, 2, 3):
        alpha = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
        for s in (1e-4, 1e-6):
            assert sk.beta_ns(n, s) * alpha / s == pytest.approx(1.0, abs=1e-3)


def test_beta_range():
    with pytest.raises(InvalidInputError):
        sk.beta_ns(1, 1.0)
    with pytest.raises(InvalidInputError):
        sk.beta_ns(0, 0.5)


def test_kernel_euclidean_grid(quad):
    worst = 0.0
    for n in (1, 2, 3):
        model = geo.euclidean(n)
        for s in (0.1, 0.5, 0.9):
            for r in (0.5, 1.0, 2.0):
                x, y = np.zeros(n), np.zeros(n)
                y[0] = r
                kv = sk.kernel_Ks(model, x, y, s, quad)
                ref = sk.beta_ns(n, s) / r ** (n + s)
                worst = max(worst, abs(kv.value - ref) / ref)
    assert worst < 1e-6


def test_kernel_symmetry_bit_identical(quad):
    tor = geo.flat_torus([TWO_PI])
    a = sk.kernel_Ks(tor, [0.3], [2.0], 0.4, quad)
    b = sk.kernel_Ks(tor, [2.0], [0.3], 0.4, quad)
    assert a.value == b.value


def test_kernel_diagonal_rejected(quad):
    with pytest.raises(SingularInputError):
        sk.kernel_Ks(geo.euclidean(1), [0.5], [0.5], 0.5, quad)


def test_kernel_doubled_index(quad):
    # seminorm convention passes indices up to 2
    kv = sk.kernel_Ks(geo.euclidean(1), [0.0], [1.0], 1.4, quad)
    ref = sk.beta_power(1, 1.4)
    assert kv.value == pytest.approx(ref, rel=1e-8)
    with pytest.raises(InvalidInputError):
        sk.kernel_Ks(geo.euclidean(1), [0.0], [1.0], 2.1, quad)


def test_dilation_covariance(quad):
    model = geo.euclidean(2)
    s = 0.6
    lam = 2.5
    x, y = np.array([0.2, -0.1]), np.array([1.0, 0.7])
    a = sk.kernel_Ks(model, x, y, s, quad).value
    b = sk.kernel_Ks(model, lam * x, lam * y, s, quad).value
    assert b == pytest.approx(lam ** (-2.0 - s) * a, rel=1e-8)


def test_positivity_probes(quad):
    rng = geo.rng_stream(31, 2)
    for model in (geo.flat_torus([TWO_PI]), geo.sphere(2, 1.0), geo.hyperbolic3(), geo.gaussian_space(1)):
        patch = geo.FullSpace() if model.finite_volume else geo.Ball((0.0, 0.0, 0.0), 1.5)
        for _ in range(2):
            x = geo.sample_region(model, patch, rng)
            y = geo.sample_region(model, patch, rng)
            if geo.distance(model, x, y) < 1e-3:
                continue
            assert sk.kernel_Ks(model, x, y, 0.35, quad).value > 0.0


def test_nonnegative_curvature_bracket(quad):
    # s(2-s) / (r^s * |B_r|) brackets the kernel within loose dimensional factors
    for model in (geo.euclidean(1), geo.euclidean(2), geo.flat_torus([TWO_PI])):
        for s in (0.2, 0.6):
            for r in (0.3, 1.0, 2.0):
                if model.kind == "flat_torus" and r >= math.pi:
                    continue
                x = np.zeros(model.dim)
                y = np.zeros(model.dim)
                y[0] = r
                ball_vol = geo.region_measure(model, geo.Ball(tuple(x), r))
                scale = s * (2.0 - s) / (r**s * ball_vol)
                kv = sk.kernel_Ks(model, x, y, s, quad).value
                assert 1e-2 * scale <= kv <= 1e2 * scale


def test_hyperbolic_local_flatness(quad):
    # at fixed small separation the kernel tracks the flat power law as s falls
    d = 0.05
    model = geo.hyperbolic3()
    x = np.zeros(3)
    y = np.array([math.tanh(d / 2.0), 0.0, 0.0])
    for s in (0.4, 0.2, 0.1, 0.05):
        ratio = sk.kernel_Ks(model, x, y, s, quad).value * d ** (3 + s) / sk.beta_ns(3, s)
        assert 0.5 <= ratio <= 2.0


def test_profile_matches_pointwise(quad):
    tor = geo.flat_torus([TWO_PI])
    prof = sk.distance_kernel(tor, 0.35, quad, 1e-3, math.pi)
    for d in (0.01, 0.3, 1.0, 2.5):
        direct = sk.kernel_Ks(tor, [0.0], [d], 0.35, quad).value
        interp = float(prof.values(np.array([d]))[0])
        assert interp == pytest.approx(direct, rel=5e-6)


def test_profile_extension_continuity(quad):
    e2 = geo.euclidean(2)
    prof = sk.distance_kernel(e2, 0.4, quad, 1e-3, 10.0)
    below = float(prof.values_extended(np.array([5e-4]))[0])
    assert below == pytest.approx(sk.beta_ns(2, 0.4) * 5e-4 ** (-2.4), rel=1e-4)
    beyond = float(prof.values_extended(np.array([20.0]))[0])
    assert beyond == pytest.approx(sk.beta_ns(2, 0.4) * 20.0 ** (-2.4), rel=1e-6)


def test_gauss_pair_kernel_matches_pointwise(quad):
    g1 = geo.gaussian_space(1)
    ker = sk.gauss_pair_kernel(g1, 0.3, quad, 1e-3)
    xs = np.array([[0.2], [-1.0]])
    ys = np.array([[0.9], [0.5]])
    vals, errs = ker.values(xs, ys)
    for (x,), (y,), v in zip(xs, ys, vals):
        direct = sk.kernel_Ks(g1, [x], [y], 0.3, quad).value
        assert v == pytest.approx(direct, rel=1e-6)
