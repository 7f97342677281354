import math

import pytest

from fracperim import special
from fracperim.errors import InvalidInputError


def test_gamma_reference_points():
    assert special.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert special.gamma(1.0) == pytest.approx(1.0, rel=1e-13)
    assert special.gamma(1.5) == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-13)


def test_gamma_matches_libm_across_range():
    for z in [0.01, 0.1, 0.3, 0.75, 1.25, 2.0, 3.7, 5.5, 10.0, 20.5, -0.5, -1.3, -2.7]:
        assert special.gamma(z) == pytest.approx(math.gamma(z), rel=1e-12)


def test_gamma_pole():
    with pytest.raises(InvalidInputError):
        special.gamma(0.0)
    with pytest.raises(InvalidInputError):
        special.gamma(-3.0)


def test_lower_incomplete_gamma_against_quadrature():
    import numpy as np

    for a, x in [(0.25, 1.0), (0.75, 0.3), (1.5, 2.0), (2.25, 5.0)]:
        # log-substitution oracle: t^a e^{-t} integrated in u = log t
        u = np.linspace(math.log(x) - 40.0 / a, math.log(x), 400_001)
        t = np.exp(u)
        ref = float(np.trapezoid(t**a * np.exp(-t), u))
        assert special.lower_incomplete_gamma(a, x) == pytest.approx(ref, rel=1e-6)


def test_lower_incomplete_gamma_full_mass():
    # gamma(a, x) -> Gamma(a) as x grows
    assert special.lower_incomplete_gamma(1.5, 40.0) == pytest.approx(math.gamma(1.5), rel=1e-12)


def test_normal_cdf_symmetry_and_tails():
    assert special.normal_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    assert special.normal_cdf(1.0) == pytest.approx(0.8413447460685429, rel=1e-12)
    assert special.normal_tail(1.0) == pytest.approx(0.15865525393145705, rel=1e-12)
    assert special.normal_cdf(-3.0) + special.normal_cdf(3.0) == pytest.approx(1.0, abs=1e-15)
