"""Small-index sweeps, limit extrapolation, heat density, and the predicted
limits of the vanishing-index asymptotics.

The heat density of a set E (its long-time heat fraction toward infinity) is
computed as a time integral of exact outward semigroup masses, which is the
same reordering of the defining double integral used throughout the theory:
the spatial integral of the jump kernel over E minus a ball is the
time-Mellin transform of the heat mass that E minus the ball carries.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import functionals as fn
from . import heatkernel as hk
from . import models as geo
from . import singkernel as sk
from .errors import DegenerateInversionError, InvalidInputError, UnsupportedRegionError
from .quadrature import QuadConfig, TailClass, integrate_time

__all__ = [
    "SSchedule",
    "ThetaReport",
    "ExperimentReport",
    "extrapolate_limit",
    "heat_density",
    "analytic_heat_density",
    "predicted_limit_finite",
    "predicted_limit_infinite",
    "theta_inverse",
    "run_asymptotic_experiment",
]

DEFAULT_SCHEDULE = (0.4, 0.3, 0.2, 0.1, 0.05, 0.025)


@dataclass(frozen=True)
class SSchedule:
    """Strictly decreasing sweep of index values inside (0,1)."""

    values: tuple = DEFAULT_SCHEDULE

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 3:
            raise InvalidInputError("schedules need at least 3 points")
        if any(not 0.0 < v < 1.0 for v in vals):
            raise InvalidInputError("s must lie in (0,1)")
        if any(b >= a for a, b in zip(vals[:-1], vals[1:])):
            raise InvalidInputError("schedule must be strictly decreasing")


@dataclass(frozen=True)
class ThetaReport:
    per_s: tuple  # ((s, theta_s) for the first radius)
    theta: float
    error: float
    r_values_checked: tuple
    r_consistent: bool


@dataclass(frozen=True)
class ExperimentReport:
    per_s: tuple  # ((s, value, error_bound), ...)
    extrapolated_limit: float
    extrapolation_error: float
    predicted_limit: float
    verdict: str  # "pass" | "fail"
    runtime_seconds: float

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


# ---------------------------------------------------------------------------
# extrapolation


def extrapolate_limit(schedule: SSchedule, values: Sequence[tuple]) -> tuple[float, float]:
    """Limit estimate from a sweep: weighted linear fit plus a two-point check.

    values holds (value, error) pairs matching the schedule.  The fit is a
    weighted least-squares line through the 3 smallest s (weights 1/s^2); the
    returned error also covers the fit residual, the disagreement with the
    two-point extrapolation, the propagated quadrature errors, and the slope
    misfit term |b| * s_min.
    """
    if len(values) != len(schedule.values):
        raise InvalidInputError("one value per schedule point required")
    if len(values) < 3:
        raise InvalidInputError("extrapolation needs at least 3 points")
    ss = np.asarray(schedule.values, dtype=float)[-3:]
    vv = np.asarray([v for v, _ in values], dtype=float)[-3:]
    ee = np.asarray([e for _, e in values], dtype=float)[-3:]
    w = 1.0 / ss**2
    S0, S1, S2 = float(w.sum()), float((w * ss).sum()), float((w * ss * ss).sum())
    D = S0 * S2 - S1 * S1
    coef = w * (S2 - S1 * ss) / D
    a = float(np.dot(coef, vv))
    b = float(np.dot(w * (S0 * ss - S1) / D, vv))
    resid = float(np.max(np.abs(a + b * ss - vv)))
    s1, s2 = schedule.values[-2], schedule.values[-1]
    v1, v2 = values[-2][0], values[-1][0]
    richardson = (v2 * s1 - v1 * s2) / (s1 - s2)
    prop = float(np.sqrt(np.dot(coef**2, ee**2)))
    err = max(resid, abs(a - richardson), prop, abs(b) * float(ss.min()))
    return a, err


# ---------------------------------------------------------------------------
# heat density


def analytic_heat_density(model: geo.ManifoldModel, E: geo.Region) -> Optional[float]:
    """Exact heat density for conical-type sets, or None when unavailable.

    On Euclidean space the density equals the solid-angle fraction of the
    set near infinity; bounded sets carry density zero and the full space
    density one (stochastic completeness).
    """
    if model.finite_volume:
        raise InvalidInputError("heat density is an infinite-volume notion")
    E = geo.simplify(E)
    if isinstance(E, geo.FullSpace):
        return 1.0
    if isinstance(E, geo.Empty):
        return 0.0
    if isinstance(E, geo.Ball):
        return 0.0
    if model.kind == "euclidean":
        if isinstance(E, geo.HalfSpace):
            return 0.5
        if isinstance(E, geo.Cone):
            return geo.cone_solid_fraction(model.dim, E.half_angle)
    if isinstance(E, geo.Complement):
        inner = analytic_heat_density(model, E.region)
        return None if inner is None else 1.0 - inner
    try:
        m = geo.region_measure(model, E)
        if math.isfinite(m):
            return 0.0
    except UnsupportedRegionError:
        pass
    return None


def _outward_fraction_geometry(model, E, p):
    """(fraction, enclosing_radius) so that the mass of E beyond radius R from
    p equals fraction * radial_mass_outside(R) exactly for R >= enclosing_radius."""
    E = geo.simplify(E)
    p = geo.check_point(model, p)
    if isinstance(E, geo.FullSpace):
        return 1.0, 0.0
    if isinstance(E, geo.Ball):
        center = geo.check_point(model, np.asarray(E.center))
        return 0.0, geo.distance(model, center, p) + E.radius
    if model.kind == "euclidean":
        if isinstance(E, geo.HalfSpace):
            if abs(float(np.dot(p, E.normal)) - E.offset) > 1e-12:
                raise UnsupportedRegionError("half-space heat density needs the base point on the boundary")
            return 0.5, 0.0
        if isinstance(E, geo.Cone):
            if float(np.linalg.norm(p)) > 1e-12:
                raise UnsupportedRegionError("cone heat density needs the base point at the apex")
            return geo.cone_solid_fraction(model.dim, E.half_angle), 0.0
    if isinstance(E, geo.Complement):
        frac, r0 = _outward_fraction_geometry(model, E.region, p)
        return 1.0 - frac, r0
    raise UnsupportedRegionError(f"no outward-mass geometry for {E} on {model!r}")


def _theta_tail(model, frac, R):
    """Tail declaration for t -> outward mass (limit frac, power/exp remainder)."""
    if model.kind == "euclidean":
        n = model.dim
        if n == 1:
            return TailClass(limit=frac, pow_amp=frac * R / math.sqrt(math.pi) + 1e-300, pow_exp=0.5)
        if n == 2:
            return TailClass(limit=frac, pow_amp=frac * R * R / 4.0 + 1e-300, pow_exp=1.0)
        if n == 3:
            return TailClass(limit=frac, pow_amp=frac * R**3 / (6.0 * math.sqrt(math.pi)) + 1e-300, pow_exp=1.5)
        raise UnsupportedRegionError("heat density implemented for n <= 3")
    if model.kind == "hyperbolic3":
        return TailClass(limit=frac, exp_amp=3.0 * math.exp(R) * max(frac, 1.0), exp_rate=1.0)
    raise UnsupportedRegionError(model.kind)


def theta_sweep_value(model, E, p, R: float, s: float, quad: QuadConfig) -> tuple[float, float]:
    """One point of the heat-density sweep: the kernel mass of E beyond B_R(p)."""
    frac, r_enclose = _outward_fraction_geometry(model, E, p)
    if R < r_enclose:
        raise UnsupportedRegionError(
            f"radius {R} does not enclose the bounded part (needs R >= {r_enclose:.3f})"
        )
    if frac == 0.0:
        return 0.0, 0.0
    tail = _theta_tail(model, frac, R)

    def f(t):
        t = np.asarray(t, dtype=float)
        return np.array([frac * hk.radial_mass_outside(model, R, float(ti)) for ti in t])

    tail = TailClass(limit=tail.limit, exp_amp=tail.exp_amp, exp_rate=tail.exp_rate,
                     pow_amp=tail.pow_amp, pow_exp=tail.pow_exp,
                     small_t=R * R / 300.0)
    est = integrate_time(f, s, quad, tail)
    g = sk.gamma_norm(s)
    return g * est.value, g * est.error_bound


def heat_density(
    model: geo.ManifoldModel,
    E: geo.Region,
    p,
    radii: Sequence[float],
    schedule: SSchedule,
    quad: QuadConfig,
) -> ThetaReport:
    """Heat density of E seen from p: the vanishing-index limit of the kernel
    mass of E outside balls of the given radii, with a cross-radius check."""
    if model.finite_volume:
        raise InvalidInputError("heat density is defined on infinite-volume models")
    radii = tuple(float(R) for R in radii)
    if not radii or any(R <= 0 for R in radii):
        raise InvalidInputError("radii must be positive")
    per_radius = []
    first_per_s = None
    for R in radii:
        vals = []
        for s in schedule.values:
            v, e = theta_sweep_value(model, E, p, R, s, quad)
            vals.append((v, e))
        if first_per_s is None:
            first_per_s = tuple((s, v) for s, (v, _) in zip(schedule.values, vals))
        per_radius.append(extrapolate_limit(schedule, vals))
    thetas = [t for t, _ in per_radius]
    errs = [e for _, e in per_radius]
    spread = max(thetas) - min(thetas)
    combined = max(errs) + min(errs)
    theta = float(np.mean(thetas))
    return ThetaReport(
        per_s=first_per_s,
        theta=theta,
        error=max(errs) + 0.5 * spread,
        r_values_checked=radii,
        r_consistent=bool(spread <= combined + 1e-12),
    )


# ---------------------------------------------------------------------------
# predicted limits


def predicted_limit_finite(model: geo.ManifoldModel, E: geo.Region, Omega: geo.Region) -> float:
    """Finite-volume prediction: volume products normalized by the total volume."""
    if not model.finite_volume:
        raise InvalidInputError("finite-volume prediction needs a finite-volume model")
    vol = model.volume
    Ec = geo.Complement(E)
    Oc = geo.Complement(Omega)
    m_E = geo.region_measure(model, E)
    m_EcO = geo.region_measure(model, geo.Intersection(Ec, Omega))
    m_EO = geo.region_measure(model, geo.Intersection(E, Omega))
    m_EcOc = geo.region_measure(model, geo.Intersection(Ec, Oc))
    return (m_E * m_EcO + m_EO * m_EcOc) / vol


def predicted_limit_infinite(thetaE: float, mu_E_in: float, mu_Ec_in: float) -> float:
    """Infinite-volume prediction from the heat density and window measures."""
    if not -1e-9 <= thetaE <= 1.0 + 1e-9:
        raise InvalidInputError(f"heat density must lie in [0,1], got {thetaE}")
    if not (math.isfinite(mu_E_in) and math.isfinite(mu_Ec_in)):
        raise InvalidInputError("window measures must be finite")
    th = min(1.0, max(0.0, thetaE))
    return (1.0 - th) * mu_E_in + th * mu_Ec_in


def theta_inverse(limit: float, mu_E_in: float, mu_Ec_in: float) -> float:
    """Recover the heat density from a measured limit (unequal window measures)."""
    denom = mu_Ec_in - mu_E_in
    scale = max(abs(mu_E_in), abs(mu_Ec_in), 1.0)
    if abs(denom) < 1e-12 * scale:
        raise DegenerateInversionError("equal window measures: the density is not recoverable")
    return (limit - mu_E_in) / denom


# ---------------------------------------------------------------------------
# experiment runner


def run_asymptotic_experiment(
    model: geo.ManifoldModel,
    E: geo.Region,
    Omega: geo.Region,
    schedule: SSchedule,
    quad: QuadConfig,
    tolerance: float = 0.02,
    theta: Optional[float] = None,
) -> ExperimentReport:
    """Sweep the halved relative perimeter over the schedule, extrapolate the
    vanishing-index limit, and compare against the predicted limit.

    tolerance is relative to the predicted limit (absolute when the
    prediction vanishes).  For infinite-volume models the heat density is
    taken from the exact solid-angle fraction unless passed explicitly.
    """
    t0 = time.perf_counter()
    if tolerance <= 0:
        raise InvalidInputError("tolerance must be positive")
    per_s = []
    for s in schedule.values:
        est = fn.perimeter_local(model, E, Omega, s, quad)
        per_s.append((est.value / 2.0, est.error_bound / 2.0))
    limit, err = extrapolate_limit(schedule, per_s)

    if model.finite_volume:
        predicted = predicted_limit_finite(model, E, Omega)
    elif isinstance(geo.simplify(Omega), geo.FullSpace):
        # bounded-support asymptotics: the global halved perimeter tends to mu(E)
        m_E = geo.region_measure(model, E)
        if not math.isfinite(m_E):
            raise InvalidInputError("a full window needs a finite-measure set")
        predicted = m_E
    else:
        m_O = geo.region_measure(model, Omega)
        if not math.isfinite(m_O):
            raise InvalidInputError("infinite-volume experiments need a bounded window")
        if theta is None:
            theta = analytic_heat_density(model, E)
        if theta is None:
            raise InvalidInputError(
                "no exact heat density for this set; pass theta= from heat_density()"
            )
        mu_E_in = geo.region_measure(model, geo.Intersection(E, Omega))
        mu_Ec_in = geo.region_measure(model, geo.Intersection(geo.Complement(E), Omega))
        predicted = predicted_limit_infinite(theta, mu_E_in, mu_Ec_in)

    scale = abs(predicted) if abs(predicted) > 1e-12 else 1.0
    ok = abs(limit - predicted) <= tolerance * scale
    return ExperimentReport(
        per_s=tuple((s, v, e) for s, (v, e) in zip(schedule.values, per_s)),
        extrapolated_limit=limit,
        extrapolation_error=err,
        predicted_limit=predicted,
        verdict="pass" if ok else "fail",
        runtime_seconds=time.perf_counter() - t0,
    )
