"""Heat kernels of the model geometries and semigroup quantities built on them.

Closed forms are used where they exist (Euclidean space, hyperbolic 3-space,
the Mehler kernel of Gauss space); tori switch between the periodized Gaussian
image sum and the Fourier eigensum at T_theta = (min L)^2 / (4 pi), and S^2
uses an adaptively truncated Legendre eigensum.  Matrix-valued evaluators over
(separation, time) grids back the singular-kernel quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import models as geo
from .errors import InvalidInputError, PrecisionError, UnsupportedRegionError
from .quadrature import IntegralEstimate, QuadConfig, adaptive_1d, integrate_region
from .special import gamma as _gamma

__all__ = [
    "HeatKernelEval",
    "heat_kernel",
    "heat_mass",
    "semigroup_indicator",
    "radial_mass_outside",
    "torus_theta_switch",
]

_SPHERE_TERM_CAP = 50_000


@dataclass(frozen=True)
class HeatKernelEval:
    value: float
    truncation_error: float


def torus_theta_switch(model: geo.ManifoldModel) -> float:
    """Representation switch time: image sum below, Fourier sum above."""
    return min(model.lengths) ** 2 / (4.0 * math.pi)


# ---------------------------------------------------------------------------
# matrix evaluators over (separation, time) grids


def circle_kernel_matrix(L: float, delta, t, tol: float = 1e-12):
    """Heat kernel of a circle of length L on a (delta, t) grid.

    delta are coordinate differences (any reals), t positive times; returns
    (values with shape (len(delta), len(t)), truncation bound).
    """
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    d = np.mod(delta, L)
    d = np.minimum(d, L - d)
    out = np.empty((d.size, t.size))
    t_theta = L * L / (4.0 * math.pi)
    small = t <= t_theta
    bound = 0.0
    if small.any():
        ts = t[small]
        K = int(math.ceil(math.sqrt(4.0 * ts.max() * math.log(1.0 / tol)) / L)) + 2
        ks = np.arange(-K, K + 1) * L
        shifts = d[:, None] + ks[None, :]  # (m, 2K+1)
        ex = np.exp(-(shifts[:, :, None] ** 2) / (4.0 * ts[None, None, :]))
        out[:, small] = ex.sum(axis=1) / np.sqrt(4.0 * math.pi * ts)[None, :]
        # first omitted image, geometric remainder
        worst = math.exp(-(((K + 0.5) * L) ** 2) / (4.0 * ts.max()))
        bound = max(bound, 2.0 * worst / math.sqrt(4.0 * math.pi * ts.min()))
    if (~small).any():
        tf = t[~small]
        Kf = 1
        while math.exp(-((2.0 * math.pi * Kf / L) ** 2) * tf.min()) > tol * L / 4.0 and Kf < 400:
            Kf += 1
        ks = np.arange(1, Kf + 1)
        freq = (2.0 * math.pi / L) * ks
        damp = np.exp(-(freq[:, None] ** 2) * tf[None, :])  # (K, nt)
        cosines = np.cos(freq[None, :] * d[:, None])  # (m, K)
        out[:, ~small] = (1.0 + 2.0 * cosines @ damp) / L
        bound = max(bound, (4.0 / L) * math.exp(-((2.0 * math.pi * (Kf + 1) / L) ** 2) * tf.min()))
    return out, bound


def _sphere_lmax(radius: float, t_min: float, tol: float) -> int:
    return int(math.ceil(radius * math.sqrt(math.log(1.0 / tol) / t_min))) + 10


def sphere2_kernel_matrix(radius: float, cos_theta, t, tol: float = 1e-12):
    """Legendre eigensum kernel of S^2 on a (cos_theta, t) grid.

    The sum is truncated adaptively per time block (large times need few
    modes); the hard term cap raises PrecisionError for times below about
    1e-8 r^2, signalling callers to use a larger near-diagonal cutoff.
    """
    c = np.atleast_1d(np.asarray(cos_theta, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    r2 = radius * radius
    t_min = float(t.min())
    lmax = _sphere_lmax(radius, t_min, tol)
    if lmax > _SPHERE_TERM_CAP:
        raise PrecisionError(
            f"S^2 eigensum needs {lmax} terms at t={t_min:.3e}; "
            "use a larger near-diagonal cutoff (roughly t >= 1e-8 r^2)"
        )
    ls = np.arange(lmax + 1)
    weights = (2.0 * ls + 1.0) / (4.0 * math.pi * r2)
    out = np.empty((c.size, t.size))
    order = np.argsort(t)
    # Legendre values by upward recurrence, in row chunks to bound memory
    chunk = max(1, int(2e7) // (lmax + 1))
    for lo in range(0, c.size, chunk):
        cc = c[lo : lo + chunk]
        P = np.empty((cc.size, lmax + 1))
        P[:, 0] = 1.0
        if lmax >= 1:
            P[:, 1] = cc
        for l in range(1, lmax):
            P[:, l + 1] = ((2 * l + 1) * cc * P[:, l] - l * P[:, l - 1]) / (l + 1)
        # time blocks, each truncated at its own mode count
        pos = 0
        while pos < t.size:
            t_b = t[order[pos]]
            hi = pos
            while hi < t.size and t[order[hi]] <= 4.0 * t_b:
                hi += 1
            idx = order[pos:hi]
            lb = min(lmax, _sphere_lmax(radius, float(t_b), tol))
            damp = np.exp(-(ls[: lb + 1, None] * (ls[: lb + 1, None] + 1.0)) * t[idx][None, :] / r2)
            out[lo : lo + chunk, idx] = P[:, : lb + 1] @ (weights[: lb + 1, None] * damp)
            pos = hi
    bound = math.exp(-(lmax**2) * t_min / r2) / (4.0 * math.pi * t_min)
    return out, bound


def hk_distance_matrix(model: geo.ManifoldModel, dist, t, tol: float = 1e-12):
    """Heat kernel on a (geodesic distance, time) grid for distance-form models.

    Supported: Euclidean(n), Hyperbolic3, Sphere(1)/Sphere(2), 1-d flat tori.
    Returns (values (m, nt), truncation bound).
    """
    d = np.atleast_1d(np.asarray(dist, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if (t <= 0).any():
        raise InvalidInputError("time must be positive")
    if model.kind == "euclidean" or model.kind == "gaussian":
        n = model.dim
        vals = (4.0 * math.pi * t[None, :]) ** (-n / 2.0) * np.exp(
            -(d[:, None] ** 2) / (4.0 * t[None, :])
        )
        return vals, 0.0
    if model.kind == "hyperbolic3":
        rho = d[:, None]
        ratio = np.where(rho < 1e-8, 1.0 + rho**2 / 6.0, rho / np.sinh(np.where(rho < 1e-8, 1.0, rho)))
        vals = (
            (4.0 * math.pi * t[None, :]) ** (-1.5)
            * ratio
            * np.exp(-t[None, :] - rho**2 / (4.0 * t[None, :]))
        )
        return vals, 0.0
    if model.kind == "flat_torus" and model.dim == 1:
        return circle_kernel_matrix(model.lengths[0], d, t, tol)
    if model.kind == "sphere" and model.dim == 1:
        return circle_kernel_matrix(2.0 * math.pi * model.radius, d, t, tol)
    if model.kind == "sphere" and model.dim == 2:
        return sphere2_kernel_matrix(model.radius, np.cos(d / model.radius), t, tol)
    raise UnsupportedRegionError(f"no distance-form kernel for {model!r}")


def torus_delta_matrix(model: geo.ManifoldModel, deltas, t, tol: float = 1e-12):
    """Product kernel of a multi-axis torus on per-axis coordinate differences."""
    deltas = np.atleast_2d(np.asarray(deltas, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    vals = np.ones((deltas.shape[0], t.size))
    bound = 0.0
    for axis, L in enumerate(model.lengths):
        v, b = circle_kernel_matrix(L, deltas[:, axis], t, tol)
        vals *= v
        bound += b  # axis masses are O(1/L) bounded; crude additive bound
    return vals, bound


def mehler_matrix(x, y, t):
    """Ornstein-Uhlenbeck transition density w.r.t. the Gaussian measure.

    x, y are (m, n) point arrays (paired rows), t a time array; exact formula,
    no truncation error.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    n = x.shape[1]
    q = -np.expm1(-2.0 * t)  # 1 - e^{-2t}, stable for small t
    b = np.exp(-t)
    xx = (x * x).sum(axis=1)[:, None]
    yy = (y * y).sum(axis=1)[:, None]
    xy = (x * y).sum(axis=1)[:, None]
    expo = -(b[None, :] ** 2 * (xx + yy) - 2.0 * b[None, :] * xy) / (2.0 * q[None, :])
    return q[None, :] ** (-n / 2.0) * np.exp(expo)


# ---------------------------------------------------------------------------
# scalar evaluation


def heat_kernel(model: geo.ManifoldModel, x, y, t: float, tol: float = 1e-12) -> HeatKernelEval:
    """Heat kernel H(x, y, t) of the model (density w.r.t. its own measure)."""
    if t <= 0:
        raise InvalidInputError("time must be positive")
    p = geo.check_point(model, x)
    q = geo.check_point(model, y)
    if model.kind == "gaussian":
        vals = mehler_matrix(p[None, :], q[None, :], [t])
        return HeatKernelEval(float(vals[0, 0]), 0.0)
    if model.kind == "flat_torus" and model.dim > 1:
        vals, bound = torus_delta_matrix(model, (p - q)[None, :], [t], tol)
        return HeatKernelEval(float(vals[0, 0]), bound)
    d = geo.distance(model, p, q)
    vals, bound = hk_distance_matrix(model, [d], [t], tol)
    return HeatKernelEval(float(vals[0, 0]), bound)


# ---------------------------------------------------------------------------
# exact outward radial masses (used by the heat-density engine)


def radial_mass_outside(model: geo.ManifoldModel, R: float, t: float) -> float:
    """Exact heat mass beyond geodesic radius R from a point, at time t.

    Euclidean(1..3) and Hyperbolic3 have closed forms; on the other models use
    semigroup_indicator on a complement region instead.
    """
    if R <= 0.0:
        return 1.0
    if model.kind == "euclidean":
        w = R / (2.0 * math.sqrt(t))
        if model.dim == 1:
            return math.erfc(w)
        if model.dim == 2:
            return math.exp(-w * w)
        if model.dim == 3:
            return math.erfc(w) + 2.0 * w * math.exp(-w * w) / math.sqrt(math.pi)
        raise UnsupportedRegionError("outward mass implemented for n <= 3")
    if model.kind == "hyperbolic3":
        sq = math.sqrt(t)
        vp = (R - 2.0 * t) / (2.0 * sq)
        vm = (R + 2.0 * t) / (2.0 * sq)
        gauss_part = (math.exp(-vp * vp) - math.exp(-vm * vm)) / (2.0 * math.sqrt(math.pi * t))
        return gauss_part + 0.5 * (math.erfc(vp) + math.erfc(vm))
    raise UnsupportedRegionError(f"no closed outward mass on {model!r}")


# ---------------------------------------------------------------------------
# heat mass and indicator masses


def heat_mass(model: geo.ManifoldModel, p, t: float, quad: QuadConfig) -> float:
    """Numerical total mass of the heat kernel at time t from point p."""
    if t <= 0:
        raise InvalidInputError("time must be positive")
    p = geo.check_point(model, p)
    est = _heat_mass_estimate(model, p, t, quad)
    return est.value


def _heat_mass_estimate(model, p, t, quad) -> IntegralEstimate:
    if model.kind == "euclidean":
        n = model.dim
        alpha = 2.0 * math.pi ** (n / 2.0) / _gamma(n / 2.0)
        R_far = 2.0 * math.sqrt(t) * (math.sqrt(math.log(1.0 / quad.abs_tol)) + 1.0)

        def f(r):
            return (
                (4.0 * math.pi * t) ** (-n / 2.0)
                * np.exp(-(r**2) / (4.0 * t))
                * alpha
                * r ** (n - 1)
            )

        v, e, nev = adaptive_1d(f, 0.0, R_far, quad.rel_tol, quad.abs_tol, quad.max_subdiv)
        tail = radial_mass_outside(model, R_far, t) if n <= 3 else quad.abs_tol
        return IntegralEstimate(v, e + tail, "adaptive", nev)
    if model.kind == "flat_torus":
        total = IntegralEstimate(1.0, 0.0, "adaptive", 0)
        for L in model.lengths:
            def f(d):
                vals, _ = circle_kernel_matrix(L, d, [t], min(quad.abs_tol, 1e-12))
                return vals[:, 0]

            v, e, nev = adaptive_1d(f, 0.0, L, quad.rel_tol, quad.abs_tol, quad.max_subdiv)
            total = IntegralEstimate(total.value * v, total.error_bound + e, "adaptive", total.n_evals + nev)
        return total
    if model.kind == "sphere":
        if model.dim == 1:
            L = 2.0 * math.pi * model.radius

            def f(d):
                vals, _ = circle_kernel_matrix(L, d, [t], min(quad.abs_tol, 1e-12))
                return vals[:, 0]

            v, e, nev = adaptive_1d(f, 0.0, L, quad.rel_tol, quad.abs_tol, quad.max_subdiv)
            return IntegralEstimate(v, e, "adaptive", nev)
        R = model.radius

        def f(theta):
            vals, _ = sphere2_kernel_matrix(R, np.cos(theta), [t], min(quad.abs_tol, 1e-12))
            return vals[:, 0] * np.sin(theta) * 2.0 * math.pi * R * R

        v, e, nev = adaptive_1d(f, 0.0, math.pi, quad.rel_tol, quad.abs_tol, quad.max_subdiv)
        return IntegralEstimate(v, e, "adaptive", nev)
    if model.kind == "hyperbolic3":
        rho_far = 2.0 * t + 2.0 * math.sqrt(t * math.log(1.0 / quad.abs_tol)) + 3.0

        def f(rho):
            vals, _ = hk_distance_matrix(model, rho, [t])
            area = 4.0 * math.pi * np.sinh(rho) ** 2
            return vals[:, 0] * area

        v, e, nev = adaptive_1d(f, 0.0, rho_far, quad.rel_tol, quad.abs_tol, quad.max_subdiv)
        tail = radial_mass_outside(model, rho_far, t)
        return IntegralEstimate(v, e + tail, "adaptive", nev)
    if model.kind == "gaussian":
        total, err, nev = 1.0, 0.0, 0
        sig = math.sqrt(-math.expm1(-2.0 * t))
        for xi in p:
            B = 9.0 + abs(xi)

            def f(ys):
                vals = mehler_matrix(np.full((ys.size, 1), xi), ys[:, None], [t])[:, 0]
                return vals * np.exp(-(ys**2) / 2.0) / math.sqrt(2.0 * math.pi)

            v, e, nev_i = adaptive_1d(f, -B, B, quad.rel_tol, quad.abs_tol, quad.max_subdiv)
            mu = math.exp(-t) * xi
            tail = 0.5 * (math.erfc((B - mu) / (math.sqrt(2.0) * sig)) + math.erfc((B + mu) / (math.sqrt(2.0) * sig)))
            total *= v
            err += e + tail
            nev += nev_i
        return IntegralEstimate(total, err, "adaptive", nev)
    raise UnsupportedRegionError(model.kind)


def semigroup_indicator(
    model: geo.ManifoldModel, region: geo.Region, p, t: float, quad: QuadConfig
) -> float:
    """Heat mass inside a region at time t from point p (e^{tL} of its indicator)."""
    if t <= 0:
        raise InvalidInputError("time must be positive")
    p = geo.check_point(model, p)
    region = geo.simplify(region)
    if isinstance(region, geo.FullSpace):
        return heat_mass(model, p, t, quad)
    if isinstance(region, geo.Empty):
        return 0.0

    # exact closed forms on the line models
    if model.kind == "euclidean" and model.dim == 1:
        ivs = geo.interval_set(model, region)
        sq = 2.0 * math.sqrt(t)
        total = 0.0
        for a, b in ivs:
            hi = 1.0 if b == math.inf else 0.5 * (1.0 + math.erf((b - p[0]) / sq))
            lo = 0.0 if a == -math.inf else 0.5 * (1.0 + math.erf((a - p[0]) / sq))
            total += hi - lo
        return total
    if model.kind == "gaussian" and model.dim == 1:
        ivs = geo.interval_set(model, region)
        mu = math.exp(-t) * p[0]
        sig = math.sqrt(-math.expm1(-2.0 * t))
        total = 0.0
        for a, b in ivs:
            hi = 1.0 if b == math.inf else 0.5 * (1.0 + math.erf((b - mu) / (math.sqrt(2.0) * sig)))
            lo = 0.0 if a == -math.inf else 0.5 * (1.0 + math.erf((a - mu) / (math.sqrt(2.0) * sig)))
            total += hi - lo
        return total

    # radial closed forms for complements of balls centered at p
    if isinstance(region, geo.Complement) and isinstance(region.region, geo.Ball):
        ball = region.region
        try:
            center = geo.check_point(model, np.asarray(ball.center))
            centered = geo.distance(model, center, p) < 1e-12
        except (InvalidInputError, UnsupportedRegionError):
            centered = False
        if centered and model.kind in ("euclidean", "hyperbolic3") and model.dim <= 3:
            return radial_mass_outside(model, ball.radius, t)

    measure = geo.region_measure(model, region)
    if math.isfinite(measure):
        def g(pts):
            return _kernel_at(model, p, pts, t, quad)

        return integrate_region(model, region, g, quad).value
    # infinite region: complement of something finite
    if isinstance(region, geo.Complement):
        inner = semigroup_indicator(model, region.region, p, t, quad)
        return heat_mass(model, p, t, quad) - inner
    raise UnsupportedRegionError(f"no indicator-mass path for {region} on {model!r}")


def _kernel_at(model, p, pts, t, quad):
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    tol = min(1e-12, quad.abs_tol)
    if model.kind == "gaussian":
        return mehler_matrix(np.broadcast_to(p, pts.shape), pts, [t])[:, 0]
    if model.kind == "flat_torus" and model.dim > 1:
        vals, _ = torus_delta_matrix(model, pts - p[None, :], [t], tol)
        return vals[:, 0]
    dists = np.array([geo.distance(model, p, x) for x in pts])
    vals, _ = hk_distance_matrix(model, dists, [t], tol)
    return vals[:, 0]
