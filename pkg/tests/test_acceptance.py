"""Acceptance gate: every criterion of the verification suite must pass.

Each test invokes one criterion runner (the same code behind the `suite`
subcommand) and prints its one-line verdict.
"""

from fracperim import suite


def _run(criterion):
    res = criterion()
    print(f"{'PASS' if res.passed else 'FAIL'}  {res.name}  [{res.seconds:.1f}s]  {res.detail}")
    assert res.passed, f"{res.name}: {res.detail}"


def test_criterion_01_euclidean_kernel_closed_form():
    _run(suite.euclidean_kernel_closed_form)


def test_criterion_02_torus_finite_volume_limits():
    _run(suite.torus_finite_volume_limits)


def test_criterion_03_sphere_finite_volume_limit():
    _run(suite.sphere_finite_volume_limit)


def test_criterion_04_gaussian_space_limits():
    _run(suite.gaussian_space_limits)


def test_criterion_05_full_space_heat_density():
    _run(suite.full_space_heat_density)


def test_criterion_06_bounded_set_asymptotics():
    _run(suite.bounded_set_asymptotics)


def test_criterion_07_cone_heat_density_limit():
    _run(suite.cone_heat_density_limit)


def test_criterion_08_equal_measure_window():
    _run(suite.equal_measure_window)


def test_criterion_09_density_inversion_roundtrip():
    _run(suite.density_inversion_roundtrip)


def test_criterion_10_laplacian_equivalence_battery():
    _run(suite.laplacian_equivalence_battery)


def test_criterion_11_property_battery():
    _run(suite.property_battery)


def test_criterion_12_hyperbolic_kernel_envelope():
    _run(suite.hyperbolic_kernel_envelope)
