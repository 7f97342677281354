"""Interaction energies, fractional perimeters, Sobolev-type seminorms, and
the three routes to the fractional Laplacian on circle models.

Trigonometric polynomials carry exact eigendata, so the heat semigroup acts
on them in closed form; that makes the spectral and semigroup routes exact
and isolates the singular-integral quadrature as the only approximation in
the equivalence checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import models as geo
from . import pairs
from . import singkernel as sk
from .errors import InvalidInputError, UnsupportedRegionError
from .quadrature import IntegralEstimate, QuadConfig, TailClass, adaptive_1d, integrate_time

__all__ = [
    "TrigFunction",
    "SetFunction",
    "interaction_Js",
    "perimeter_Ps",
    "perimeter_local",
    "seminorm_singular",
    "seminorm_spectral",
    "flap_singular",
    "flap_bochner",
]


@dataclass(frozen=True)
class TrigFunction:
    """Finite trigonometric polynomial on a circle model.

    coefficients maps the integer frequency k >= 0 to the (cos, sin) pair
    (a_k, b_k); the function is u(x) = sum a_k cos(2 pi k x / L) +
    b_k sin(2 pi k x / L) in the arc-length coordinate x.
    """

    model: geo.ManifoldModel
    coefficients: tuple  # ((k, a_k, b_k), ...)

    def __init__(self, model, coefficients):
        if not geo.is_circle(model):
            raise InvalidInputError("trig functions live on 1-d circle models")
        coeffs = []
        for k, ab in (coefficients.items() if isinstance(coefficients, dict) else coefficients):
            a, b = ab
            if k < 0:
                raise InvalidInputError("frequencies must be nonnegative")
            if a != 0.0 or b != 0.0:
                coeffs.append((int(k), float(a), float(b)))
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "coefficients", tuple(sorted(coeffs)))

    @property
    def length(self) -> float:
        return geo.circle_length(self.model)

    def frequencies(self):
        return [k for k, _, _ in self.coefficients]

    def eigenvalue(self, k: int) -> float:
        return (2.0 * math.pi * k / self.length) ** 2

    def mode_mass(self, k: int) -> float:
        """Squared L2 mass carried by frequency k."""
        for kk, a, b in self.coefficients:
            if kk == k:
                return self.length * a * a if k == 0 else (self.length / 2.0) * (a * a + b * b)
        return 0.0

    def spectral_masses(self):
        """(eigenvalue, mass) pairs over the nonzero modes."""
        return [(self.eigenvalue(k), self.mode_mass(k)) for k, _, _ in self.coefficients]

    def norm_sq(self) -> float:
        return sum(m for _, m in self.spectral_masses())

    def evaluate(self, x):
        """Evaluate at arc-length coordinates (vectorized)."""
        x = np.asarray(x, dtype=float)
        w = 2.0 * math.pi / self.length
        out = np.zeros_like(x)
        for k, a, b in self.coefficients:
            out += a * np.cos(w * k * x) + b * np.sin(w * k * x)
        return out

    def semigroup(self, t: float) -> "TrigFunction":
        """Exact heat-semigroup action: mode k damped by exp(-lambda_k t)."""
        damped = {k: (a * math.exp(-self.eigenvalue(k) * t), b * math.exp(-self.eigenvalue(k) * t))
                  for k, a, b in self.coefficients}
        return TrigFunction(self.model, damped)

    def shift_sq_integral(self, xi):
        """g(xi) = integral of (u(x) - u(x - xi))^2 dx, exact per mode."""
        xi = np.asarray(xi, dtype=float)
        w = 2.0 * math.pi / self.length
        out = np.zeros_like(xi)
        for k, a, b in self.coefficients:
            if k == 0:
                continue
            mass = (self.length / 2.0) * (a * a + b * b)
            out += mass * (2.0 - 2.0 * np.cos(w * k * xi))
        return out

    def symmetric_diff(self, x: float, xi):
        """2 u(x) - u(x + xi) - u(x - xi), exact per mode (vectorized in xi)."""
        xi = np.asarray(xi, dtype=float)
        w = 2.0 * math.pi / self.length
        out = np.zeros_like(xi)
        for k, a, b in self.coefficients:
            if k == 0:
                continue
            val = a * math.cos(w * k * x) + b * math.sin(w * k * x)
            out += val * 2.0 * (1.0 - np.cos(w * k * xi))
        return out

    def dirichlet_energy(self) -> float:
        return sum(lam * m for lam, m in self.spectral_masses())


@dataclass(frozen=True)
class SetFunction:
    """Indicator function of a region, as an element of the seminorm spaces."""

    region: geo.Region


# ---------------------------------------------------------------------------
# interactions and perimeters


def interaction_Js(model, A: geo.Region, B: geo.Region, s: float, quad: QuadConfig) -> IntegralEstimate:
    """Kernel interaction energy of two disjoint regions, s in (0,1)."""
    if not 0.0 < s < 1.0:
        raise InvalidInputError(f"interaction index must lie in (0,1), got {s}")
    return pairs.interaction_estimate(model, A, B, s, quad)


def perimeter_Ps(model, E: geo.Region, s: float, quad: QuadConfig) -> IntegralEstimate:
    """Fractional perimeter: twice the interaction of E with its complement."""
    if not 0.0 < s < 1.0:
        raise InvalidInputError(f"perimeter index must lie in (0,1), got {s}")
    E = geo.simplify(E)
    mE = geo.region_measure(model, E)
    mEc = geo.region_measure(model, geo.Complement(E))
    if not (math.isfinite(mE) or math.isfinite(mEc)):
        raise InvalidInputError("perimeter needs E or its complement of finite measure")
    return pairs.interaction_estimate(model, E, geo.Complement(E), s, quad).scaled(2.0)


def perimeter_local(model, E: geo.Region, Omega: geo.Region, s: float, quad: QuadConfig) -> IntegralEstimate:
    """Relative fractional perimeter of E in the window Omega.

    Counts all kernel-weighted pairs except those with both points outside
    Omega; equals the global perimeter when Omega is the whole space.
    """
    if not 0.0 < s < 1.0:
        raise InvalidInputError(f"perimeter index must lie in (0,1), got {s}")
    E, Omega = geo.simplify(E), geo.simplify(Omega)
    if isinstance(Omega, geo.FullSpace):
        return perimeter_Ps(model, E, s, quad)
    Ec = geo.Complement(E)
    Oc = geo.Complement(Omega)
    total = IntegralEstimate(0.0, 0.0, "adaptive", 0)
    for A, B in (
        (geo.Intersection(E, Omega), geo.Intersection(Ec, Omega)),
        (geo.Intersection(E, Omega), geo.Intersection(Ec, Oc)),
        (geo.Intersection(E, Oc), geo.Intersection(Ec, Omega)),
    ):
        total = total.plus(pairs.interaction_estimate(model, A, B, s, quad))
    return total.scaled(2.0)


# ---------------------------------------------------------------------------
# seminorms


def seminorm_singular(model, u, s: float, quad: QuadConfig) -> IntegralEstimate:
    """Squared fractional Sobolev seminorm of order s, via the jump kernel.

    Uses the doubled kernel index 2s, so s must lie in (0,1).  Indicator
    functions route through the perimeter engine (identical quadrature path).
    """
    if not 0.0 < s < 1.0:
        raise InvalidInputError(f"seminorm order must lie in (0,1), got {s}")
    sigma = 2.0 * s
    if isinstance(u, SetFunction):
        return pairs.interaction_estimate(model, u.region, geo.Complement(u.region), sigma, quad).scaled(2.0)
    if not isinstance(u, TrigFunction) or u.model.key() != model.key():
        raise InvalidInputError("seminorm arguments must live on the given model")
    return _trig_quadratic_form(u, sigma, quad)


def _trig_quadratic_form(u: TrigFunction, sigma: float, quad: QuadConfig) -> IntegralEstimate:
    """Double integral of (u(x)-u(y))^2 against the kernel of index sigma."""
    L = u.length
    eps = quad.diag_cutoff
    if not u.coefficients or all(k == 0 for k, _, _ in u.coefficients):
        return IntegralEstimate(0.0, 0.0, "adaptive", 0)
    prof = sk.distance_kernel(u.model, sigma, quad, 0.8 * eps, L / 2.0)

    def f(xi):
        return prof.values(xi) * u.shift_sq_integral(xi)

    val, err, nev = adaptive_1d(f, eps, L / 2.0, quad.rel_tol, quad.abs_tol, quad.max_subdiv)
    beta_flat = sk.beta_power(1, sigma)

    def f_flat(xi):
        return beta_flat * xi ** (-1.0 - sigma) * u.shift_sq_integral(xi)

    ab, ab_err, _ = adaptive_1d(f_flat, eps * 1e-10, eps, 1e-8, 1e-14, 60)
    k_eps = float(prof.values(np.array([eps]))[0])
    dev = abs(k_eps - beta_flat * eps ** (-1.0 - sigma)) / (beta_flat * eps ** (-1.0 - sigma))
    total = 2.0 * (val + ab)
    err_total = 2.0 * (err + ab_err + 1.5 * dev * ab) + abs(total) * prof.rel_error
    return IntegralEstimate(total, err_total, "adaptive", nev)


def seminorm_spectral(model, u: TrigFunction, s: float) -> float:
    """Spectral seminorm sum over eigenpairs: sum lambda^(s/2) <u, phi>^2.

    Valid for s in (0, 2]; s = 2 gives the Dirichlet energy.
    """
    if not 0.0 < s <= 2.0:
        raise InvalidInputError(f"spectral order must lie in (0,2], got {s}")
    if not isinstance(u, TrigFunction) or u.model.key() != model.key():
        raise UnsupportedRegionError("spectral seminorms need exact eigendata (circle models)")
    return float(sum(lam ** (s / 2.0) * m for lam, m in u.spectral_masses() if lam > 0.0))


# ---------------------------------------------------------------------------
# fractional Laplacians


def flap_singular(model, u: TrigFunction, x, s: float, quad: QuadConfig) -> float:
    """Fractional Laplacian by the singular integral (symmetrized, no P.V. needed)."""
    if not 0.0 < s < 1.0:
        raise InvalidInputError(f"order must lie in (0,1), got {s}")
    if not isinstance(u, TrigFunction) or u.model.key() != model.key():
        raise InvalidInputError("singular-integral route implemented for trig functions")
    x0 = _arc_coordinate(model, x)
    L = u.length
    eps = quad.diag_cutoff
    prof = sk.distance_kernel(model, s, quad, 0.8 * eps, L / 2.0)

    def f(xi):
        return prof.values(xi) * u.symmetric_diff(x0, xi)

    val, err, _ = adaptive_1d(f, eps, L / 2.0, quad.rel_tol, quad.abs_tol, quad.max_subdiv)
    beta_flat = sk.beta_power(1, s)

    def f_flat(xi):
        return beta_flat * xi ** (-1.0 - s) * u.symmetric_diff(x0, xi)

    ab, _, _ = adaptive_1d(f_flat, eps * 1e-10, eps, 1e-8, 1e-14, 60)
    return val + ab


def flap_bochner(model, u: TrigFunction, x, s: float, quad: QuadConfig) -> float:
    """Fractional Laplacian by the heat-semigroup (Bochner) formula.

    The semigroup acts exactly on trig functions (eigenvalue damping); only
    the time integral is numerical.
    """
    if not 0.0 < s < 1.0:
        raise InvalidInputError(f"order must lie in (0,1), got {s}")
    if not isinstance(u, TrigFunction) or u.model.key() != model.key():
        raise InvalidInputError("semigroup route implemented for trig functions")
    x0 = _arc_coordinate(model, x)
    modes = [(k, a, b) for k, a, b in u.coefficients if k > 0]
    if not modes:
        return 0.0
    w = 2.0 * math.pi / u.length
    mode_vals = np.array([a * math.cos(w * k * x0) + b * math.sin(w * k * x0) for k, a, b in modes])
    lams = np.array([u.eigenvalue(k) for k, _, _ in modes])
    limit = -float(mode_vals.sum())  # e^{tL}u - u -> mean - u(x), mean part excluded above

    def f(t):
        t = np.asarray(t, dtype=float)
        return (np.expm1(-lams[:, None] * t[None, :]) * mode_vals[:, None]).sum(axis=0)

    amp = float(np.abs(mode_vals).sum()) + abs(limit)
    tail = TailClass(limit=limit, exp_amp=amp, exp_rate=float(lams.min()), small_t=1e-12)
    est = integrate_time(f, s, quad, tail)
    return -sk.gamma_norm(s) * est.value


def _arc_coordinate(model, x) -> float:
    """Arc-length coordinate of a probe point on a circle model."""
    if np.isscalar(x):
        return float(x) % geo.circle_length(model)
    p = geo.check_point(model, x)
    if model.kind == "sphere":
        return geo._circle_coord(model, p)
    return float(p[0])
