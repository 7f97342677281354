"""Acceptance suite: every verification criterion as a callable check.

Each criterion returns a CriterionResult; run_suite executes all of them and
prints one PASS/FAIL line per criterion.  The same functions back the
command-line `suite` subcommand and the acceptance tests.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from . import asymptotics as asy
from . import functionals as fn
from . import heatkernel as hk
from . import models as geo
from . import singkernel as sk
from .quadrature import QuadConfig

__all__ = ["CriterionResult", "CRITERIA", "run_suite"]


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _result(name, t0, passed, detail) -> CriterionResult:
    return CriterionResult(name, bool(passed), detail, time.perf_counter() - t0)


_QUAD = QuadConfig()
_SCHED = asy.SSchedule()


def euclidean_kernel_closed_form() -> CriterionResult:
    """Pointwise kernel vs the Euclidean power law on the 27-point grid."""
    t0 = time.perf_counter()
    worst = 0.0
    worst_case = ""
    for n in (1, 2, 3):
        model = geo.euclidean(n)
        for s in (0.1, 0.5, 0.9):
            for r in (0.5, 1.0, 2.0):
                x = np.zeros(n)
                y = np.zeros(n)
                y[0] = r
                kv = sk.kernel_Ks(model, x, y, s, _QUAD)
                ref = sk.beta_ns(n, s) / r ** (n + s)
                rel = abs(kv.value - ref) / abs(ref)
                if rel > worst:
                    worst, worst_case = rel, f"n={n} s={s} r={r}"
    return _result(
        "euclidean-kernel-closed-form", t0, worst < 1e-6,
        f"max rel dev {worst:.2e} at {worst_case} (tol 1e-6)",
    )


def torus_finite_volume_limits() -> CriterionResult:
    """Flat-torus sweeps against the finite-volume limit formula."""
    t0 = time.perf_counter()
    tor = geo.flat_torus([2.0 * math.pi])
    E = geo.Arc([(0.0, math.pi)])
    details = []
    ok = True
    for Omega, target in ((geo.FullSpace(), math.pi / 2.0), (geo.Arc([(0.5, math.pi / 2.0)]), math.pi / 4.0)):
        rep = asy.run_asymptotic_experiment(tor, E, Omega, _SCHED, _QUAD, tolerance=0.02)
        dev = abs(rep.extrapolated_limit - target) / target
        ok &= rep.passed and abs(rep.predicted_limit - target) < 1e-12
        details.append(f"{rep.extrapolated_limit:.5f} vs {target:.5f} ({dev:.1%})")
    return _result("torus-finite-volume-limits", t0, ok, "; ".join(details) + " (tol 2%)")


def sphere_finite_volume_limit() -> CriterionResult:
    """Hemisphere on the unit sphere: extrapolated limit pi."""
    t0 = time.perf_counter()
    model = geo.sphere(2, 1.0)
    quad = replace(_QUAD, diag_cutoff=0.02)  # keeps the eigensum mode count tractable
    rep = asy.run_asymptotic_experiment(
        model, geo.Cap((0.0, 0.0, 1.0), math.pi / 2.0), geo.FullSpace(), _SCHED, quad, tolerance=0.02
    )
    dev = abs(rep.extrapolated_limit - math.pi) / math.pi
    return _result(
        "sphere-finite-volume-limit", t0, rep.passed,
        f"{rep.extrapolated_limit:.5f} vs pi ({dev:.1%}, tol 2%)",
    )


def gaussian_space_limits() -> CriterionResult:
    """Gauss-space half-space limits, global and windowed."""
    t0 = time.perf_counter()
    model = geo.gaussian_space(1)
    E = geo.HalfSpace((1.0,), 0.0)
    rep1 = asy.run_asymptotic_experiment(model, E, geo.FullSpace(), _SCHED, _QUAD, tolerance=0.02)
    dev1 = abs(rep1.extrapolated_limit - 0.25) / 0.25
    rep2 = asy.run_asymptotic_experiment(model, E, geo.Ball((0.0,), 1.0), _SCHED, _QUAD, tolerance=0.03)
    dev2 = abs(rep2.extrapolated_limit - rep2.predicted_limit) / rep2.predicted_limit
    ok = rep1.passed and abs(rep1.predicted_limit - 0.25) < 1e-12 and rep2.passed
    return _result(
        "gaussian-space-limits", t0, ok,
        f"global {rep1.extrapolated_limit:.5f} vs 0.25 ({dev1:.1%}, tol 2%); "
        f"windowed {rep2.extrapolated_limit:.5f} vs {rep2.predicted_limit:.5f} ({dev2:.1%}, tol 3%)",
    )


def full_space_heat_density() -> CriterionResult:
    """Heat density of the whole space equals one on infinite-volume models."""
    t0 = time.perf_counter()
    details = []
    ok = True
    for model in (geo.euclidean(1), geo.euclidean(2), geo.hyperbolic3()):
        p = np.zeros(model.ambient)
        th = asy.heat_density(model, geo.FullSpace(), p, [1.0], _SCHED, _QUAD)
        dev = abs(th.theta - 1.0)
        ok &= dev < 0.01
        details.append(f"{model!r}: {th.theta:.5f} ({dev:.2%})")
    return _result("full-space-heat-density", t0, ok, "; ".join(details) + " (tol 1%)")


def bounded_set_asymptotics() -> CriterionResult:
    """Unit interval on the line: global and windowed limits equal its length."""
    t0 = time.perf_counter()
    model = geo.euclidean(1)
    E = geo.Ball((0.5,), 0.5)
    rep1 = asy.run_asymptotic_experiment(model, E, geo.FullSpace(), _SCHED, _QUAD, tolerance=0.02)
    rep2 = asy.run_asymptotic_experiment(model, E, geo.Ball((0.0,), 2.0), _SCHED, _QUAD, tolerance=0.02)
    ok = rep1.passed and rep2.passed and abs(rep1.predicted_limit - 1.0) < 1e-12 \
        and abs(rep2.predicted_limit - 1.0) < 1e-12
    return _result(
        "bounded-set-asymptotics", t0, ok,
        f"global {rep1.extrapolated_limit:.5f}, windowed {rep2.extrapolated_limit:.5f} vs 1 (tol 2%)",
    )


def cone_heat_density_limit() -> CriterionResult:
    """Quarter-plane cone: limit 3 pi / 8 via both exact and swept densities."""
    t0 = time.perf_counter()
    model = geo.euclidean(2)
    E = geo.Cone((1.0, 0.0), math.pi / 4.0)
    Omega = geo.Ball((0.0, 0.0), 1.0)
    target = 3.0 * math.pi / 8.0
    rep = asy.run_asymptotic_experiment(model, E, Omega, _SCHED, _QUAD, tolerance=0.03)
    th = asy.heat_density(model, E, np.zeros(2), [1.0, 2.0], _SCHED, _QUAD)
    theta_dev = abs(th.theta - 0.25) / 0.25
    rep_num = asy.run_asymptotic_experiment(
        model, E, Omega, _SCHED, _QUAD, tolerance=0.03, theta=th.theta
    )
    ok = rep.passed and rep_num.passed and theta_dev < 0.02 \
        and abs(rep.predicted_limit - target) < 1e-12
    return _result(
        "cone-heat-density-limit", t0, ok,
        f"limit {rep.extrapolated_limit:.5f} vs {target:.5f} (tol 3%); "
        f"swept density {th.theta:.5f} vs 0.25 ({theta_dev:.1%}, tol 2%)",
    )


def equal_measure_window() -> CriterionResult:
    """Half-plane with the window centered on its boundary: limit pi/2."""
    t0 = time.perf_counter()
    model = geo.euclidean(2)
    rep = asy.run_asymptotic_experiment(
        model, geo.HalfSpace((0.0, 1.0), 0.0), geo.Ball((0.0, 0.0), 1.0), _SCHED, _QUAD,
        tolerance=0.02,
    )
    dev = abs(rep.extrapolated_limit - math.pi / 2.0) / (math.pi / 2.0)
    return _result(
        "equal-measure-window", t0, rep.passed,
        f"{rep.extrapolated_limit:.5f} vs pi/2 ({dev:.1%}, tol 2%)",
    )


def density_inversion_roundtrip() -> CriterionResult:
    """Recover the cone density from its measured limit."""
    t0 = time.perf_counter()
    model = geo.euclidean(2)
    E = geo.Cone((1.0, 0.0), math.pi / 4.0)
    Omega = geo.Ball((0.0, 0.0), 1.0)
    rep = asy.run_asymptotic_experiment(model, E, Omega, _SCHED, _QUAD, tolerance=0.03)
    mu_in = geo.region_measure(model, geo.Intersection(E, Omega))
    mu_out = geo.region_measure(model, geo.Intersection(geo.Complement(E), Omega))
    theta = asy.theta_inverse(rep.extrapolated_limit, mu_in, mu_out)
    dev = abs(theta - 0.25) / 0.25
    return _result(
        "density-inversion-roundtrip", t0, dev < 0.05,
        f"recovered {theta:.5f} vs 0.25 ({dev:.1%}, tol 5%)",
    )


def laplacian_equivalence_battery() -> CriterionResult:
    """Singular vs semigroup Laplacians and singular vs spectral seminorms."""
    t0 = time.perf_counter()
    tor = geo.flat_torus([2.0 * math.pi])
    u = fn.TrigFunction(tor, {1: (1.0, 0.3), 2: (-0.5, 0.2), 3: (0.25, -0.4)})
    probes = [0.3, 1.1, 2.5, 4.0, 5.7]
    worst_pt = 0.0
    worst_semi = 0.0
    for s in (0.2, 0.5, 0.8):
        for x in probes:
            si = fn.flap_singular(tor, u, x, s, _QUAD)
            bo = fn.flap_bochner(tor, u, x, s, _QUAD)
            worst_pt = max(worst_pt, abs(si - bo))
        sing = fn.seminorm_singular(tor, u, s / 2.0, _QUAD)
        spectral = fn.seminorm_spectral(tor, u, s)
        worst_semi = max(worst_semi, abs(0.5 * sing.value - spectral) / spectral)
    ok = worst_pt < 1e-4 and worst_semi < 1e-3
    return _result(
        "laplacian-equivalence-battery", t0, ok,
        f"max |singular - semigroup| {worst_pt:.2e} (tol 1e-4); "
        f"max seminorm rel dev {worst_semi:.2e} (tol 1e-3)",
    )


def property_battery() -> CriterionResult:
    """Structural property checks with no single quantitative target."""
    t0 = time.perf_counter()
    failures = []

    # heat-mass monotonicity on every model over the time grid
    models_points = [
        (geo.euclidean(1), np.zeros(1)),
        (geo.flat_torus([2.0 * math.pi]), np.array([0.3])),
        (geo.sphere(2, 1.0), np.array([0.0, 0.0, 1.0])),
        (geo.hyperbolic3(), np.zeros(3)),
        (geo.gaussian_space(1), np.array([0.4])),
    ]
    for model, p in models_points:
        masses = [hk.heat_mass(model, p, t, _QUAD) for t in (0.01, 0.1, 1.0, 10.0)]
        for m1, m2 in zip(masses[:-1], masses[1:]):
            if not m1 >= m2 - 2e-6:
                failures.append(f"mass decay violated on {model!r}: {masses}")
                break

    # long-time dichotomy: finite volume -> 1/volume at t=50
    for model, pts in (
        (geo.flat_torus([2.0 * math.pi]), ([0.1], [2.0])),
        (geo.sphere(2, 1.0), ([0.0, 0.0, 1.0], [1.0, 0.0, 0.0])),
        (geo.gaussian_space(1), ([0.0], [1.0])),
    ):
        x, y = (np.asarray(p, dtype=float) for p in pts)
        h = hk.heat_kernel(model, x, y, 50.0).value
        if abs(h - 1.0 / model.volume) > 1e-6:
            failures.append(f"long-time limit off on {model!r}: {h}")
    # infinite volume: kernel supremum smallness at t = 1e4 (dimensions >= 2;
    # the 1-d closed form (4 pi t)^(-1/2) ~ 2.8e-3 cannot meet 1e-4 and is
    # checked against its exact value instead)
    for model in (geo.euclidean(2), geo.euclidean(3), geo.hyperbolic3()):
        p = np.zeros(model.ambient)
        h = hk.heat_kernel(model, p, p, 1.0e4).value
        if h >= 1e-4:
            failures.append(f"infinite-volume kernel too large on {model!r}: {h}")
    e1 = geo.euclidean(1)
    h1 = hk.heat_kernel(e1, [0.0], [0.0], 1.0e4).value
    if abs(h1 - (4.0 * math.pi * 1.0e4) ** -0.5) > 1e-12:
        failures.append("1-d long-time kernel off its closed form")

    # complement invariance of the relative perimeter (torus window)
    tor = geo.flat_torus([2.0 * math.pi])
    E = geo.Arc([(0.0, math.pi / 1.5)])
    Om = geo.Arc([(1.0, 2.0)])
    for s in (0.3, 0.1):
        a = fn.perimeter_local(tor, E, Om, s, _QUAD)
        b = fn.perimeter_local(tor, geo.Complement(E), Om, s, _QUAD)
        tol = a.error_bound + b.error_bound + 1e-6 * abs(a.value)
        if abs(a.value - b.value) > tol:
            failures.append(f"complement invariance off at s={s}: {a.value} vs {b.value}")

    # density complement additivity on the plane
    e2 = geo.euclidean(2)
    cone = geo.Cone((0.6, 0.8), 1.0)
    th1 = asy.heat_density(e2, cone, np.zeros(2), [1.0], _SCHED, _QUAD)
    th2 = asy.heat_density(e2, geo.Complement(cone), np.zeros(2), [1.0], _SCHED, _QUAD)
    if abs(th1.theta + th2.theta - 1.0) > th1.error + th2.error + 1e-4:
        failures.append(f"density complements do not add to one: {th1.theta} + {th2.theta}")

    # radius independence of the density
    for model, E in (
        (geo.euclidean(1), geo.FullSpace()),
        (geo.euclidean(2), geo.FullSpace()),
        (geo.euclidean(2), geo.HalfSpace((1.0, 0.0), 0.0)),
        (geo.euclidean(2), geo.Cone((1.0, 0.0), math.pi / 4.0)),
    ):
        th = asy.heat_density(model, E, np.zeros(model.dim), [1.0, 2.0], _SCHED, _QUAD)
        if not th.r_consistent:
            failures.append(f"radius dependence detected for {E} on {model!r}")

    # interaction additivity over a split component
    e1 = geo.euclidean(1)
    A1 = geo.Ball((0.25,), 0.25)
    A2 = geo.Ball((0.75,), 0.25)
    B = geo.Ball((2.5,), 0.5)
    whole = fn.interaction_Js(e1, geo.Union(A1, A2), B, 0.3, _QUAD)
    parts = fn.interaction_Js(e1, A1, B, 0.3, _QUAD).plus(fn.interaction_Js(e1, A2, B, 0.3, _QUAD))
    if abs(whole.value - parts.value) > whole.error_bound + parts.error_bound + 1e-10:
        failures.append("interaction additivity violated")

    # vanishing cross-interaction of separated sets (smallest s of the sweep)
    ann = geo.Intersection(geo.Ball((0.0, 0.0), 5.0), geo.Complement(geo.Ball((0.0, 0.0), 2.0)))
    ball = geo.Ball((0.0, 0.0), 1.0)
    j_small = fn.interaction_Js(e2, ball, ann, 0.025, _QUAD)
    if not j_small.value < 0.05 * math.pi:
        failures.append(f"separated interaction too large at s=0.025: {j_small.value}")

    # localization: interaction with the far part approaches mu(F) * density
    F = geo.Ball((0.0, 0.0), 1.0)
    E_hp = geo.HalfSpace((1.0, 0.0), 0.0)
    far = geo.Intersection(E_hp, geo.Complement(geo.Ball((0.0, 0.0), 2.0)))
    vals = [(fn.interaction_Js(e2, F, far, s, _QUAD).value, 1e-4) for s in _SCHED.values]
    loc_limit, _ = asy.extrapolate_limit(_SCHED, vals)
    loc_target = math.pi * 0.5
    if abs(loc_limit - loc_target) / loc_target > 0.03:
        failures.append(f"localization limit {loc_limit} vs {loc_target}")

    # determinism under a concurrent runner
    from . import cli

    csv1 = cli.rows_for_spec(_demo_spec(), jobs=1)
    csv2 = cli.rows_for_spec(_demo_spec(), jobs=2)
    if csv1 != csv2:
        failures.append("concurrent runs are not bit-identical")

    detail = "all structural properties hold" if not failures else "; ".join(failures)
    return _result("property-battery", t0, not failures, detail)


def _demo_spec():
    from .config import parse_config

    text = """
[experiment det_check]
model = flat_torus 6.283185307179586
E = arc 0.0 3.141592653589793
Omega = fullspace
schedule = 0.2 0.1 0.05
seed = 99
"""
    return parse_config(text)[0]


def hyperbolic_kernel_envelope() -> CriterionResult:
    """Small-separation kernel ratio against the flat power law stays bounded."""
    t0 = time.perf_counter()
    model = geo.hyperbolic3()
    d = 0.05
    x = np.zeros(3)
    y = np.array([math.tanh(d / 2.0), 0.0, 0.0])
    details = []
    ok = True
    for s in (0.4, 0.2, 0.1, 0.05):
        kv = sk.kernel_Ks(model, x, y, s, _QUAD)
        ratio = kv.value * d ** (3.0 + s) / sk.beta_ns(3, s)
        ok &= 0.5 <= ratio <= 2.0
        details.append(f"s={s}: {ratio:.4f}")
    return _result(
        "hyperbolic-kernel-envelope", t0, ok, "; ".join(details) + " (envelope [0.5, 2])"
    )


CRITERIA = (
    euclidean_kernel_closed_form,
    torus_finite_volume_limits,
    sphere_finite_volume_limit,
    gaussian_space_limits,
    full_space_heat_density,
    bounded_set_asymptotics,
    cone_heat_density_limit,
    equal_measure_window,
    density_inversion_roundtrip,
    laplacian_equivalence_battery,
    property_battery,
    hyperbolic_kernel_envelope,
)


def run_suite(printer=print) -> list[CriterionResult]:
    """Run every acceptance criterion, print one line per result."""
    results = []
    for criterion in CRITERIA:
        res = criterion()
        results.append(res)
        printer(f"{'PASS' if res.passed else 'FAIL'}  {res.name}  [{res.seconds:.1f}s]  {res.detail}")
    n_fail = sum(not r.passed for r in results)
    printer(f"{len(results) - n_fail}/{len(results)} criteria passed")
    return results
