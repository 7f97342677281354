"""Model geometries, points, and measurable regions with closed-form measures.

Five geometries are supported: Euclidean space, flat tori with per-axis
lengths, round spheres S^1/S^2, hyperbolic 3-space in the ball model, and
Gauss space (R^n weighted by the standard normal measure).  Regions form a
small algebra (balls, arcs, caps, half-spaces, cones, boolean combinations)
whose measures are exact; combinations without a closed-form measure are
rejected rather than approximated.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidInputError,
    SamplingError,
    UnsupportedRegionError,
)
from .special import lower_incomplete_gamma, gamma as _gamma, normal_cdf, normal_tail

__all__ = [
    "ManifoldModel",
    "euclidean",
    "flat_torus",
    "sphere",
    "hyperbolic3",
    "gaussian_space",
    "FullSpace",
    "Empty",
    "Ball",
    "Arc",
    "Cap",
    "HalfSpace",
    "Cone",
    "Complement",
    "Intersection",
    "Union",
    "distance",
    "region_measure",
    "region_contains",
    "sample_region",
    "validate_region",
    "rng_stream",
    "cone_solid_fraction",
]

_EPS_SPHERE = 1e-12
_INF = math.inf
_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class ManifoldModel:
    """One model geometry.

    kind is one of 'euclidean', 'flat_torus', 'sphere', 'hyperbolic3',
    'gaussian'.  dim is the intrinsic dimension, ambient the chart size of
    point coordinate vectors.  volume is the total measure (math.inf on
    Euclidean and hyperbolic space).
    """

    kind: str
    dim: int
    lengths: tuple = ()
    radius: float = 0.0

    @property
    def ambient(self) -> int:
        return self.dim + 1 if self.kind == "sphere" else self.dim

    @property
    def volume(self) -> float:
        if self.kind in ("euclidean", "hyperbolic3"):
            return math.inf
        if self.kind == "flat_torus":
            return float(np.prod(self.lengths))
        if self.kind == "sphere":
            return 2.0 * math.pi * self.radius if self.dim == 1 else 4.0 * math.pi * self.radius**2
        if self.kind == "gaussian":
            return 1.0
        raise InvalidInputError(f"unknown kind {self.kind}")

    @property
    def finite_volume(self) -> bool:
        return math.isfinite(self.volume)

    def key(self) -> tuple:
        """Hashable identity used for kernel-profile caching."""
        return (self.kind, self.dim, self.lengths, self.radius)

    def __repr__(self):
        if self.kind == "flat_torus":
            return f"FlatTorus({list(self.lengths)})"
        if self.kind == "sphere":
            return f"Sphere({self.dim}, r={self.radius})"
        if self.kind == "hyperbolic3":
            return "Hyperbolic3"
        return f"{self.kind.capitalize()}({self.dim})"


def euclidean(n: int) -> ManifoldModel:
    if n < 1:
        raise InvalidInputError("dimension must be >= 1")
    return ManifoldModel("euclidean", int(n))


def flat_torus(lengths: Sequence[float]) -> ManifoldModel:
    lengths = tuple(float(L) for L in lengths)
    if not lengths or any(L <= 0 for L in lengths):
        raise InvalidInputError("torus lengths must be positive")
    return ManifoldModel("flat_torus", len(lengths), lengths=lengths)


def sphere(n: int, radius: float = 1.0) -> ManifoldModel:
    if n not in (1, 2):
        raise InvalidInputError("only S^1 and S^2 are supported")
    if radius <= 0:
        raise InvalidInputError("radius must be positive")
    return ManifoldModel("sphere", int(n), radius=float(radius))


def hyperbolic3() -> ManifoldModel:
    return ManifoldModel("hyperbolic3", 3)


def gaussian_space(n: int) -> ManifoldModel:
    if n < 1:
        raise InvalidInputError("dimension must be >= 1")
    return ManifoldModel("gaussian", int(n))


# ---------------------------------------------------------------------------
# points


def check_point(model: ManifoldModel, x) -> np.ndarray:
    """Validate and normalize a point of the model; returns a float array."""
    p = np.asarray(x, dtype=float).reshape(-1)
    if p.size != model.ambient:
        raise DimensionMismatchError(
            f"point has {p.size} coords, {model!r} expects {model.ambient}"
        )
    if model.kind == "flat_torus":
        return np.mod(p, np.asarray(model.lengths))
    if model.kind == "sphere":
        r = float(np.linalg.norm(p))
        if abs(r - model.radius) > _EPS_SPHERE * max(1.0, model.radius):
            raise InvalidInputError(f"point norm {r} is off the radius-{model.radius} sphere")
        return p
    if model.kind == "hyperbolic3" and float(np.linalg.norm(p)) >= 1.0:
        raise InvalidInputError("ball-model points must satisfy |x| < 1")
    return p


def distance(model: ManifoldModel, x, y) -> float:
    """Geodesic distance between two points of the model."""
    p = check_point(model, x)
    q = check_point(model, y)
    if model.kind in ("euclidean", "gaussian"):
        return float(np.linalg.norm(p - q))
    if model.kind == "flat_torus":
        L = np.asarray(model.lengths)
        d = np.abs(p - q)
        d = np.minimum(d, L - d)
        return float(np.linalg.norm(d))
    if model.kind == "sphere":
        if np.array_equal(p, q):
            return 0.0
        c = float(np.dot(p, q)) / model.radius**2
        return model.radius * math.acos(min(1.0, max(-1.0, c)))
    if model.kind == "hyperbolic3":
        du = float(np.dot(p - q, p - q))
        den = (1.0 - float(np.dot(p, p))) * (1.0 - float(np.dot(q, q)))
        return math.acosh(1.0 + 2.0 * du / den)
    raise InvalidInputError(model.kind)


# ---------------------------------------------------------------------------
# region algebra


@dataclass(frozen=True)
class Region:
    pass


@dataclass(frozen=True)
class FullSpace(Region):
    pass


@dataclass(frozen=True)
class Empty(Region):
    pass


@dataclass(frozen=True)
class Ball(Region):
    """Geodesic ball."""

    center: tuple
    radius: float

    def __init__(self, center, radius):
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(center)))
        object.__setattr__(self, "radius", float(radius))
        if self.radius <= 0:
            raise InvalidInputError("ball radius must be positive")


@dataclass(frozen=True)
class Arc(Region):
    """Product of per-axis intervals on a flat torus or circle.

    intervals holds one (start, length) pair per axis, 0 < length <= L_axis.
    """

    intervals: tuple

    def __init__(self, intervals):
        ivs = tuple((float(a), float(b)) for a, b in intervals)
        if not ivs or any(ln <= 0 for _, ln in ivs):
            raise InvalidInputError("arc lengths must be positive")
        object.__setattr__(self, "intervals", ivs)


@dataclass(frozen=True)
class Cap(Region):
    """Spherical cap: points within the given polar angle of the pole."""

    pole: tuple
    angle: float

    def __init__(self, pole, angle):
        object.__setattr__(self, "pole", tuple(float(c) for c in np.atleast_1d(pole)))
        object.__setattr__(self, "angle", float(angle))
        if not 0.0 < self.angle < math.pi:
            raise InvalidInputError("cap angle must lie in (0, pi)")


@dataclass(frozen=True)
class HalfSpace(Region):
    """Open half-space { x : <x, normal> > offset }; normal stored unit-length."""

    normal: tuple
    offset: float

    def __init__(self, normal, offset=0.0):
        n = np.atleast_1d(np.asarray(normal, dtype=float))
        norm = float(np.linalg.norm(n))
        if norm == 0.0:
            raise InvalidInputError("half-space normal must be nonzero")
        object.__setattr__(self, "normal", tuple(n / norm))
        object.__setattr__(self, "offset", float(offset) / norm)


@dataclass(frozen=True)
class Cone(Region):
    """Open cone with apex at the origin (Euclidean only)."""

    axis: tuple
    half_angle: float

    def __init__(self, axis, half_angle):
        a = np.atleast_1d(np.asarray(axis, dtype=float))
        norm = float(np.linalg.norm(a))
        if norm == 0.0:
            raise InvalidInputError("cone axis must be nonzero")
        object.__setattr__(self, "axis", tuple(a / norm))
        object.__setattr__(self, "half_angle", float(half_angle))
        if not 0.0 < self.half_angle < math.pi:
            raise InvalidInputError("cone half-angle must lie in (0, pi)")


@dataclass(frozen=True)
class Complement(Region):
    region: Region


@dataclass(frozen=True)
class Intersection(Region):
    a: Region
    b: Region


@dataclass(frozen=True)
class Union(Region):
    """Union of two regions, disjoint up to measure zero."""

    a: Region
    b: Region


def simplify(region: Region) -> Region:
    """Push complements onto primitives where an exact complement exists."""
    if isinstance(region, Complement):
        inner = simplify(region.region)
        if isinstance(inner, FullSpace):
            return Empty()
        if isinstance(inner, Empty):
            return FullSpace()
        if isinstance(inner, Complement):
            return simplify(inner.region)
        if isinstance(inner, HalfSpace):
            return HalfSpace(tuple(-c for c in inner.normal), -inner.offset)
        if isinstance(inner, Cone):
            return Cone(tuple(-c for c in inner.axis), math.pi - inner.half_angle)
        if isinstance(inner, Cap):
            return Cap(tuple(-c for c in inner.pole), math.pi - inner.angle)
        return Complement(inner)
    if isinstance(region, Intersection):
        a, b = simplify(region.a), simplify(region.b)
        if isinstance(a, FullSpace):
            return b
        if isinstance(b, FullSpace):
            return a
        if isinstance(a, Empty) or isinstance(b, Empty):
            return Empty()
        return Intersection(a, b)
    if isinstance(region, Union):
        a, b = simplify(region.a), simplify(region.b)
        if isinstance(a, Empty):
            return b
        if isinstance(b, Empty):
            return a
        return Union(a, b)
    return region


# ---------------------------------------------------------------------------
# membership


def region_contains(model: ManifoldModel, region: Region, x) -> bool:
    """Total membership predicate; boundary points may resolve either way."""
    p = check_point(model, x)
    return _contains(model, simplify(region), p)


def _contains(model, region, p) -> bool:
    if isinstance(region, FullSpace):
        return True
    if isinstance(region, Empty):
        return False
    if isinstance(region, Ball):
        return distance(model, p, _ball_center_point(model, region)) < region.radius
    if isinstance(region, Arc):
        if model.kind == "flat_torus":
            Ls, coords = model.lengths, p
        elif model.kind == "sphere" and model.dim == 1:
            Ls, coords = (circle_length(model),), np.array([_circle_coord(model, p)])
        else:
            raise UnsupportedRegionError("arcs exist on tori and circles only")
        if len(region.intervals) != len(Ls):
            raise DimensionMismatchError("arc axis count does not match the torus")
        for (a, ln), L, c in zip(region.intervals, Ls, coords):
            if ln < L and not (c - a) % L < ln:
                return False
        return True
    if isinstance(region, Cap):
        if model.kind != "sphere":
            raise UnsupportedRegionError("caps exist on spheres only")
        return distance(model, p, _pole_point(model, region.pole)) < region.angle * model.radius
    if isinstance(region, HalfSpace):
        if model.kind not in ("euclidean", "gaussian"):
            raise UnsupportedRegionError("half-spaces exist on Euclidean/Gauss space only")
        return float(np.dot(p, region.normal)) > region.offset
    if isinstance(region, Cone):
        if model.kind != "euclidean":
            raise UnsupportedRegionError("cones exist on Euclidean space only")
        nrm = float(np.linalg.norm(p))
        if nrm == 0.0:
            return False
        c = float(np.dot(p, region.axis)) / nrm
        return math.acos(min(1.0, max(-1.0, c))) < region.half_angle
    if isinstance(region, Complement):
        return not _contains(model, region.region, p)
    if isinstance(region, Intersection):
        return _contains(model, region.a, p) and _contains(model, region.b, p)
    if isinstance(region, Union):
        return _contains(model, region.a, p) or _contains(model, region.b, p)
    raise UnsupportedRegionError(str(region))


def _ball_center_point(model, ball: Ball) -> np.ndarray:
    return check_point(model, np.asarray(ball.center))


def _pole_point(model, pole) -> np.ndarray:
    v = np.asarray(pole, dtype=float)
    return check_point(model, v * model.radius / float(np.linalg.norm(v)))


def _circle_coord(model, p) -> float:
    """Arc-length coordinate of a point on S^1 (embedded in R^2)."""
    return model.radius * (math.atan2(p[1], p[0]) % _TWO_PI)


def circle_length(model: ManifoldModel) -> float:
    if model.kind == "flat_torus" and model.dim == 1:
        return model.lengths[0]
    if model.kind == "sphere" and model.dim == 1:
        return _TWO_PI * model.radius
    raise UnsupportedRegionError("not a circle model")


def is_circle(model: ManifoldModel) -> bool:
    return (model.kind == "flat_torus" and model.dim == 1) or (
        model.kind == "sphere" and model.dim == 1
    )


# ---------------------------------------------------------------------------
# measures


def _ball_volume_euclid(n: int, r: float) -> float:
    return math.pi ** (n / 2.0) / _gamma(n / 2.0 + 1.0) * r**n


def cone_solid_fraction(n: int, half_angle: float) -> float:
    """Fraction of the full solid angle subtended by a cone in R^n."""
    if n == 1:
        return 0.5
    if n == 2:
        return half_angle / math.pi
    if n == 3:
        return 0.5 * (1.0 - math.cos(half_angle))
    raise UnsupportedRegionError("cone fractions implemented for n <= 3")


def region_measure(model: ManifoldModel, region: Region) -> float:
    """Exact measure of the region; math.inf marks infinite measure."""
    return _measure(model, simplify(region))


def _measure(model, region) -> float:
    if isinstance(region, FullSpace):
        return model.volume
    if isinstance(region, Empty):
        return 0.0
    if isinstance(region, Union):
        assert_disjoint(model, region.a, region.b)
        return _measure(model, region.a) + _measure(model, region.b)
    if model.dim == 1:
        return _interval_set_measure(model, interval_set(model, region))
    if isinstance(region, Ball):
        return _ball_measure(model, region)
    if isinstance(region, Arc):
        if model.kind != "flat_torus":
            raise UnsupportedRegionError("arcs exist on tori and circles only")
        return float(np.prod([min(ln, L) for (_, ln), L in zip(region.intervals, model.lengths)]))
    if isinstance(region, Cap):
        if model.kind != "sphere" or model.dim != 2:
            raise UnsupportedRegionError("cap measures implemented on S^2")
        return _TWO_PI * model.radius**2 * (1.0 - math.cos(region.angle))
    if isinstance(region, HalfSpace):
        if model.kind == "euclidean":
            return math.inf
        if model.kind == "gaussian":
            return normal_tail(region.offset)
        raise UnsupportedRegionError("half-spaces on Euclidean/Gauss space only")
    if isinstance(region, Cone):
        if model.kind != "euclidean":
            raise UnsupportedRegionError("cones on Euclidean space only")
        return math.inf
    if isinstance(region, Complement):
        m = _measure(model, region.region)
        if model.finite_volume:
            return model.volume - m
        if math.isfinite(m):
            return math.inf
        raise UnsupportedRegionError("complement of an infinite region has no closed form here")
    if isinstance(region, Intersection):
        return _intersection_measure(model, region.a, region.b)
    raise UnsupportedRegionError(str(region))


def _ball_measure(model, ball: Ball) -> float:
    r = ball.radius
    if model.kind == "euclidean":
        return _ball_volume_euclid(model.dim, r)
    if model.kind == "flat_torus":
        if 2.0 * r <= min(model.lengths):
            return _ball_volume_euclid(model.dim, r)
        raise UnsupportedRegionError("torus ball overlaps itself; use arcs")
    if model.kind == "sphere":
        R = model.radius
        if r >= math.pi * R:
            return model.volume
        return 2.0 * r if model.dim == 1 else _TWO_PI * R**2 * (1.0 - math.cos(r / R))
    if model.kind == "hyperbolic3":
        return math.pi * (math.sinh(2.0 * r) - 2.0 * r)
    if model.kind == "gaussian":
        c = np.asarray(ball.center)
        if model.dim == 1:
            return normal_cdf(c[0] + r) - normal_cdf(c[0] - r)
        if float(np.linalg.norm(c)) == 0.0:
            return lower_incomplete_gamma(model.dim / 2.0, r * r / 2.0) / _gamma(model.dim / 2.0)
        raise UnsupportedRegionError("Gauss-measure balls must be centered at the origin for n >= 2")
    raise UnsupportedRegionError(model.kind)


def _intersection_measure(model, a, b) -> float:
    for x, y in ((a, b), (b, a)):
        m = _try_intersection_measure(model, x, y)
        if m is not None:
            return m
    raise UnsupportedRegionError(
        f"no closed-form measure for Intersection({a}, {b}) on {model!r}"
    )


def _try_intersection_measure(model, a, b):
    if model.kind == "flat_torus" and _is_arcset_expressible(a) and _is_arcset_expressible(b):
        return _arc_cells_measure(_arc_cells_intersect(model, arc_cells(model, a), arc_cells(model, b)))
    if model.kind == "euclidean" and model.dim == 2:
        try:
            return _polar_cells_measure(polar_cells(model, Intersection(a, b)))
        except UnsupportedRegionError:
            pass
    if model.kind == "euclidean" and model.dim == 3:
        frac, ball = _fraction_and_ball(a, b, dim=3)
        if frac is not None:
            return frac * _ball_volume_euclid(3, ball.radius)
    if model.kind == "sphere" and model.dim == 2:
        bands = cap_bands(model, Intersection(a, b))
        if bands is not None:
            return sum(
                _TWO_PI * model.radius**2 * (math.cos(u0) - math.cos(u1))
                for _, u0, u1 in bands
            )
    if isinstance(b, Complement):
        ma = _measure(model, a)
        if math.isfinite(ma):
            try:
                return ma - _intersection_measure(model, a, b.region)
            except UnsupportedRegionError:
                return None
    if isinstance(a, Ball) and isinstance(b, Ball):
        ca, cb = np.asarray(a.center), np.asarray(b.center)
        if np.allclose(ca, cb):
            return _ball_measure(model, Ball(a.center, min(a.radius, b.radius)))
        d = distance(model, _ball_center_point(model, a), _ball_center_point(model, b))
        if d >= a.radius + b.radius:
            return 0.0
        if d + min(a.radius, b.radius) <= max(a.radius, b.radius):
            return _ball_measure(model, a if a.radius <= b.radius else b)
    return None


def _fraction_and_ball(a, b, dim):
    """Cone or central-half-space fraction paired with an origin ball."""

    def fraction_of(r):
        if isinstance(r, Cone):
            return cone_solid_fraction(dim, r.half_angle)
        if isinstance(r, HalfSpace) and r.offset == 0.0:
            return 0.5
        return None

    for x, y in ((a, b), (b, a)):
        if isinstance(x, Ball) and all(c == 0.0 for c in x.center):
            f = fraction_of(y)
            if f is not None:
                return f, x
    return None, None


# ---------------------------------------------------------------------------
# 1-d interval sets


def interval_set(model: ManifoldModel, region: Region) -> list[tuple[float, float]]:
    """Reduce a region on a 1-d model to disjoint sorted intervals.

    On lines (Euclidean(1)/Gauss(1)) endpoints may be +-inf; on circles the
    intervals live inside [0, L] with wrapped arcs split at the seam.
    """
    if model.dim != 1:
        raise UnsupportedRegionError("interval sets exist on 1-d models only")
    region = simplify(region)
    if is_circle(model):
        L = circle_length(model)
        return _normalize_circle(_ivs_circle(model, region, L), L)
    return _normalize_line(_ivs_line(model, region))


def _ivs_line(model, region):
    if isinstance(region, FullSpace):
        return [(-_INF, _INF)]
    if isinstance(region, Empty):
        return []
    if isinstance(region, Ball):
        c = region.center[0]
        return [(c - region.radius, c + region.radius)]
    if isinstance(region, HalfSpace):
        n, c = region.normal[0], region.offset
        return [(c, _INF)] if n > 0 else [(-_INF, -c)]
    if isinstance(region, Complement):
        return _complement_line(_normalize_line(_ivs_line(model, region.region)))
    if isinstance(region, Intersection):
        return _intersect_ivs(
            _normalize_line(_ivs_line(model, region.a)),
            _normalize_line(_ivs_line(model, region.b)),
        )
    if isinstance(region, Union):
        assert_disjoint(model, region.a, region.b)
        return _ivs_line(model, region.a) + _ivs_line(model, region.b)
    raise UnsupportedRegionError(f"{region} on a line")


def _ivs_circle(model, region, L):
    if isinstance(region, FullSpace):
        return [(0.0, L)]
    if isinstance(region, Empty):
        return []
    if isinstance(region, Arc):
        a, ln = region.intervals[0]
        return [(a % L, a % L + min(ln, L))]
    if isinstance(region, Ball):
        c = check_point(model, np.asarray(region.center))
        c0 = c[0] if model.kind == "flat_torus" else _circle_coord(model, c)
        r = min(region.radius, L / 2.0)
        return [(c0 - r, c0 + r)]
    if isinstance(region, Cap):
        c0 = _circle_coord(model, _pole_point(model, region.pole))
        half = region.angle * model.radius
        return [(c0 - half, c0 + half)]
    if isinstance(region, Complement):
        return _complement_circle(_normalize_circle(_ivs_circle(model, region.region, L), L), L)
    if isinstance(region, Intersection):
        return _intersect_ivs(
            _normalize_circle(_ivs_circle(model, region.a, L), L),
            _normalize_circle(_ivs_circle(model, region.b, L), L),
        )
    if isinstance(region, Union):
        assert_disjoint(model, region.a, region.b)
        return _ivs_circle(model, region.a, L) + _ivs_circle(model, region.b, L)
    raise UnsupportedRegionError(f"{region} on a circle")


def _normalize_line(ivs):
    ivs = sorted((a, b) for a, b in ivs if b > a)
    out = []
    for a, b in ivs:
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def _normalize_circle(ivs, L):
    """Split circular intervals at the 0 seam; returns pieces inside [0, L]."""
    flat = []
    for a, b in ivs:
        span = b - a
        if span >= L * (1.0 - 1e-15):
            return [(0.0, L)]
        a %= L
        if a + span <= L:
            flat.append((a, a + span))
        else:
            flat.append((a, L))
            flat.append((0.0, a + span - L))
    return _normalize_line(flat)


def _complement_line(ivs):
    out = []
    prev = -_INF
    for a, b in ivs:
        if a > prev:
            out.append((prev, a))
        prev = b
    if prev < _INF:
        out.append((prev, _INF))
    return out


def _complement_circle(ivs, L):
    out = []
    prev = 0.0
    for a, b in ivs:
        if a > prev:
            out.append((prev, a))
        prev = b
    if prev < L:
        out.append((prev, L))
    return out


def _intersect_ivs(xs, ys):
    out = []
    for a, b in xs:
        for c, d in ys:
            lo, hi = max(a, c), min(b, d)
            if hi > lo:
                out.append((lo, hi))
    return out


def _interval_set_measure(model, ivs) -> float:
    if model.kind == "gaussian":
        return float(sum(normal_cdf(b) - normal_cdf(a) for a, b in ivs))
    total = 0.0
    for a, b in ivs:
        if not math.isfinite(b - a):
            return math.inf
        total += b - a
    return total


# ---------------------------------------------------------------------------
# product-arc cells on tori


def _is_arcset_expressible(region) -> bool:
    if isinstance(region, (FullSpace, Empty, Arc)):
        return True
    if isinstance(region, Complement):
        return _is_arcset_expressible(region.region)
    if isinstance(region, (Intersection, Union)):
        return _is_arcset_expressible(region.a) and _is_arcset_expressible(region.b)
    return False


def arc_cells(model: ManifoldModel, region: Region) -> list[tuple]:
    """Decompose a torus region into disjoint product-arc cells.

    Each cell is a tuple of per-axis (start, length) pairs with start in
    [0, L_axis).
    """
    if model.kind != "flat_torus":
        raise UnsupportedRegionError("arc cells exist on tori only")
    region = simplify(region)
    Ls = model.lengths
    if isinstance(region, FullSpace):
        return [tuple((0.0, L) for L in Ls)]
    if isinstance(region, Empty):
        return []
    if isinstance(region, Arc):
        if len(region.intervals) != len(Ls):
            raise DimensionMismatchError("arc axis count mismatch")
        return [tuple((a % L, min(ln, L)) for (a, ln), L in zip(region.intervals, Ls))]
    if isinstance(region, Complement):
        cells = [tuple((0.0, L) for L in Ls)]
        for minus in arc_cells(model, region.region):
            cells = [piece for cell in cells for piece in _cell_minus(cell, minus, Ls)]
        return cells
    if isinstance(region, Intersection):
        return _arc_cells_intersect(model, arc_cells(model, region.a), arc_cells(model, region.b))
    if isinstance(region, Union):
        assert_disjoint(model, region.a, region.b)
        return arc_cells(model, region.a) + arc_cells(model, region.b)
    raise UnsupportedRegionError(f"{region} is not a product-arc region")


def _axis_intersect(iv1, iv2, L):
    """Intersection of circular (start, length) intervals as interval pieces."""
    a1, l1 = iv1
    a2, l2 = iv2
    if l1 >= L:
        return [(a2 % L, min(l2, L))]
    if l2 >= L:
        return [(a1 % L, min(l1, L))]
    a1, a2 = a1 % L, a2 % L
    out = []
    for shift in (-L, 0.0, L):
        lo = max(a1, a2 + shift)
        hi = min(a1 + l1, a2 + shift + l2)
        if hi > lo:
            out.append((lo % L, hi - lo))
    return out


def _axis_minus(iv, jv, L):
    """Pieces of circular interval iv outside jv."""
    a, ln = iv
    covered = sorted(
        (((s - a) % L), ((s - a) % L) + l) for s, l in _axis_intersect(iv, jv, L)
    )
    out, pos = [], 0.0
    for lo, hi in covered:
        if lo > pos:
            out.append(((a + pos) % L, lo - pos))
        pos = max(pos, hi)
    if pos < ln:
        out.append(((a + pos) % L, ln - pos))
    return out


def _cell_minus(cell, minus, Ls):
    """Set difference of product cells as disjoint product cells."""
    inter = []
    for iv, jv, L in zip(cell, minus, Ls):
        pieces = _axis_intersect(iv, jv, L)
        if not pieces:
            return [cell]
        inter.append(pieces)
    out = []
    for axis in range(len(Ls)):
        diff = _axis_minus(cell[axis], minus[axis], Ls[axis])
        if not diff:
            continue
        pools = inter[:axis] + [diff] + [[cell[j]] for j in range(axis + 1, len(Ls))]
        out.extend(tuple(combo) for combo in itertools.product(*pools))
    return out


def _arc_cells_intersect(model, cells_a, cells_b):
    Ls = model.lengths
    out = []
    for ca in cells_a:
        for cb in cells_b:
            parts = [()]
            for iv1, iv2, L in zip(ca, cb, Ls):
                pieces = _axis_intersect(iv1, iv2, L)
                parts = [p + (piece,) for p in parts for piece in pieces]
                if not parts:
                    break
            out.extend(p for p in parts if len(p) == len(Ls))
    return out


def _arc_cells_measure(cells) -> float:
    return float(sum(np.prod([ln for _, ln in cell]) for cell in cells))


# ---------------------------------------------------------------------------
# polar cells on Euclidean(2), anchored at the origin


def polar_cells(model: ManifoldModel, region: Region) -> list[tuple[float, float, float, float]]:
    """Decompose an origin-anchored planar region into (r0, r1, phi0, phi1) cells.

    Supports balls centered at the origin, cones with apex at the origin,
    half-planes through the origin, and boolean combinations of those.  The
    angle interval satisfies phi1 - phi0 <= 2*pi.
    """
    if model.kind != "euclidean" or model.dim != 2:
        raise UnsupportedRegionError("polar cells exist on Euclidean(2) only")
    return _polar(model, simplify(region))


def _polar(model, region):
    if isinstance(region, FullSpace):
        return [(0.0, _INF, 0.0, _TWO_PI)]
    if isinstance(region, Empty):
        return []
    if isinstance(region, Ball):
        if any(c != 0.0 for c in region.center):
            raise UnsupportedRegionError("polar cells need origin-centered balls")
        return [(0.0, region.radius, 0.0, _TWO_PI)]
    if isinstance(region, Cone):
        alpha = math.atan2(region.axis[1], region.axis[0])
        return [(0.0, _INF, alpha - region.half_angle, alpha + region.half_angle)]
    if isinstance(region, HalfSpace):
        if region.offset != 0.0:
            raise UnsupportedRegionError("polar cells need half-planes through the origin")
        alpha = math.atan2(region.normal[1], region.normal[0])
        return [(0.0, _INF, alpha - math.pi / 2.0, alpha + math.pi / 2.0)]
    if isinstance(region, Complement):
        cells = [(0.0, _INF, 0.0, _TWO_PI)]
        for minus in _polar(model, region.region):
            cells = [piece for cell in cells for piece in _polar_minus(cell, minus)]
        return cells
    if isinstance(region, Intersection):
        out = []
        for ca in _polar(model, region.a):
            for cb in _polar(model, region.b):
                out.extend(_polar_intersect(ca, cb))
        return out
    if isinstance(region, Union):
        assert_disjoint(model, region.a, region.b)
        return _polar(model, region.a) + _polar(model, region.b)
    raise UnsupportedRegionError(f"{region} is not origin-anchored polar")


def _phi_intersect(p0, p1, q0, q1):
    """Intersection of circular angle intervals (widths <= 2*pi)."""
    if p1 - p0 >= _TWO_PI:
        return [(q0, q1)]
    if q1 - q0 >= _TWO_PI:
        return [(p0, p1)]
    base = p0 % _TWO_PI
    qb = q0 % _TWO_PI
    out = []
    for shift in (-_TWO_PI, 0.0, _TWO_PI):
        lo = max(base, qb + shift)
        hi = min(base + (p1 - p0), qb + shift + (q1 - q0))
        if hi > lo:
            out.append((lo, hi))
    return out


def _phi_minus(p0, p1, q0, q1):
    """Circular angle-interval difference as disjoint intervals."""
    width = p1 - p0
    if width >= _TWO_PI:
        if q1 - q0 >= _TWO_PI:
            return []
        return [(q1, q0 + _TWO_PI)]
    base = p0 % _TWO_PI
    covered = sorted((lo - base, hi - base) for lo, hi in _phi_intersect(p0, p1, q0, q1))
    out, pos = [], 0.0
    for lo, hi in covered:
        if lo > pos:
            out.append((base + pos, base + lo))
        pos = max(pos, hi)
    if pos < width:
        out.append((base + pos, base + width))
    return out


def _polar_intersect(ca, cb):
    r0, r1 = max(ca[0], cb[0]), min(ca[1], cb[1])
    if r1 <= r0:
        return []
    return [(r0, r1, p0, p1) for p0, p1 in _phi_intersect(ca[2], ca[3], cb[2], cb[3])]


def _polar_minus(cell, minus):
    r0, r1, p0, p1 = cell
    mr0, mr1 = max(r0, minus[0]), min(r1, minus[1])
    if mr1 <= mr0 or not _phi_intersect(p0, p1, minus[2], minus[3]):
        return [cell]
    out = []
    if mr0 > r0:
        out.append((r0, mr0, p0, p1))
    if mr1 < r1:
        out.append((mr1, r1, p0, p1))
    for q0, q1 in _phi_minus(p0, p1, minus[2], minus[3]):
        out.append((mr0, mr1, q0, q1))
    return [c for c in out if c[1] > c[0] and c[3] > c[2]]


def _polar_cells_measure(cells) -> float:
    total = 0.0
    for r0, r1, p0, p1 in cells:
        if not math.isfinite(r1):
            return math.inf
        total += 0.5 * (p1 - p0) * (r1**2 - r0**2)
    return total


# ---------------------------------------------------------------------------
# S^2 cap bands around a common axis


def cap_bands(model: ManifoldModel, region: Region):
    """Reduce an S^2 region to polar-angle bands (axis, u0, u1) around one axis.

    Returns None when the region is not coaxial band-expressible; axis None
    stands for 'any axis' (full sphere bands).
    """
    if model.kind != "sphere" or model.dim != 2:
        return None
    return _bands(model, simplify(region))


def _bands(model, region):
    if isinstance(region, FullSpace):
        return [(None, 0.0, math.pi)]
    if isinstance(region, Empty):
        return []
    if isinstance(region, Cap):
        ax = np.asarray(region.pole) / np.linalg.norm(region.pole)
        return [(tuple(ax), 0.0, region.angle)]
    if isinstance(region, Ball):
        ax = np.asarray(region.center, dtype=float)
        nrm = float(np.linalg.norm(ax))
        return [(tuple(ax / nrm), 0.0, min(region.radius / model.radius, math.pi))]
    if isinstance(region, Complement):
        inner = _bands(model, region.region)
        if inner is None or len(inner) != 1:
            return None
        ax, u0, u1 = inner[0]
        out = []
        if u0 > 0.0:
            out.append((ax, 0.0, u0))
        if u1 < math.pi:
            out.append((ax, u1, math.pi))
        return out
    if isinstance(region, Intersection):
        ba, bb = _bands(model, region.a), _bands(model, region.b)
        if ba is None or bb is None:
            return None
        out = []
        for axa, a0, a1 in ba:
            for axb, b0, b1 in bb:
                aligned = _align_axes(axa, axb, b0, b1)
                if aligned is None:
                    return None
                ax, (c0, c1) = aligned
                lo, hi = max(a0, c0), min(a1, c1)
                if hi > lo:
                    out.append((ax, lo, hi))
        return out
    if isinstance(region, Union):
        ba, bb = _bands(model, region.a), _bands(model, region.b)
        if ba is None or bb is None:
            return None
        return ba + bb
    return None


def _align_axes(axa, axb, b0, b1):
    if axa is None:
        return axb, (b0, b1)
    if axb is None:
        return axa, (b0, b1)
    c = float(np.dot(np.asarray(axa), np.asarray(axb)))
    if c > 1.0 - 1e-12:
        return axa, (b0, b1)
    if c < -1.0 + 1e-12:
        return axa, (math.pi - b1, math.pi - b0)
    return None


# ---------------------------------------------------------------------------
# sampling


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Deterministic generator derived from a seed and an index key."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**63 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def assert_disjoint(model, a, b, probes: int = 1000):
    """Cheap seeded sanity check that two regions do not overlap."""
    rng = rng_stream(0x5EED, 17)
    for region, other in ((a, b), (b, a)):
        try:
            m = _measure(model, simplify(region))
        except UnsupportedRegionError:
            continue
        if not math.isfinite(m) or m == 0.0:
            continue
        try:
            pts = [sample_region(model, region, rng) for _ in range(probes)]
        except (SamplingError, UnsupportedRegionError):
            continue
        hits = sum(region_contains(model, other, p) for p in pts)
        if hits:
            raise InvalidInputError(
                f"union components are not disjoint ({hits}/{probes} probes overlap)"
            )
        return


def sample_region(model: ManifoldModel, region: Region, rng: np.random.Generator) -> np.ndarray:
    """Draw one point from the model measure restricted to the region.

    The region must have finite measure.  Direct inverse-transform sampling is
    used where the region is parametrizable, rejection from a closed-form
    superset otherwise; an acceptance rate below 1e-4 raises SamplingError.
    """
    region = simplify(region)
    m = _measure(model, region)
    if not math.isfinite(m):
        raise SamplingError("cannot sample an infinite-measure region")
    if m <= 0.0:
        raise SamplingError("cannot sample a null region")
    direct = _direct_sampler(model, region)
    if direct is not None:
        return direct(rng)
    base, base_measure = _superset_sampler(model, region)
    for i in range(200_000):
        p = base(rng)
        if _contains(model, region, p):
            return p
        if i == 50_000 and m / base_measure < 1e-4:
            break
    raise SamplingError(
        f"rejection acceptance rate ~{m / base_measure:.2e} below 1e-4 "
        f"(region measure {m:.3e}, superset {base_measure:.3e})"
    )


def _direct_sampler(model, region):
    kind = model.kind
    if isinstance(region, FullSpace):
        if kind == "flat_torus":
            Ls = np.asarray(model.lengths)
            return lambda rng: rng.random(model.dim) * Ls
        if kind == "gaussian":
            return lambda rng: rng.standard_normal(model.dim)
        if kind == "sphere":
            return lambda rng: _sphere_uniform(model, rng)
        return None
    if model.dim == 1:
        try:
            ivs = interval_set(model, region)
        except UnsupportedRegionError:
            return None
        return lambda rng: _interval_sample(model, ivs, rng)
    if kind == "flat_torus" and _is_arcset_expressible(region):
        cells = arc_cells(model, region)
        weights = np.array([float(np.prod([ln for _, ln in c])) for c in cells])
        weights /= weights.sum()
        Ls = np.asarray(model.lengths)

        def draw_torus(rng):
            cell = cells[rng.choice(len(cells), p=weights)]
            return np.mod(np.array([a + rng.random() * ln for a, ln in cell]), Ls)

        return draw_torus
    if kind == "euclidean" and isinstance(region, Ball):
        return lambda rng: _euclid_ball_sample(model, region, rng)
    if kind == "euclidean" and model.dim == 2:
        try:
            cells = polar_cells(model, region)
        except UnsupportedRegionError:
            return None
        if not cells or any(not math.isfinite(c[1]) for c in cells):
            return None
        areas = np.array([0.5 * (p1 - p0) * (r1**2 - r0**2) for r0, r1, p0, p1 in cells])
        weights = areas / areas.sum()

        def draw_polar(rng):
            r0, r1, p0, p1 = cells[rng.choice(len(cells), p=weights)]
            r = math.sqrt(r0**2 + rng.random() * (r1**2 - r0**2))
            phi = p0 + rng.random() * (p1 - p0)
            return np.array([r * math.cos(phi), r * math.sin(phi)])

        return draw_polar
    if kind == "sphere" and model.dim == 2:
        bands = cap_bands(model, region)
        if bands and len(bands) == 1:
            ax, u0, u1 = bands[0]
            axis = np.array(ax) if ax is not None else np.array([0.0, 0.0, 1.0])
            return lambda rng: _cap_sample(model, axis, u0, u1, rng)
    if kind == "hyperbolic3" and isinstance(region, Ball) and all(c == 0.0 for c in region.center):
        return lambda rng: _h3_ball_sample(model, region.radius, rng)
    return None


def _superset_sampler(model, region):
    """A (sampler, measure) pair for a finite-measure superset of the region."""
    region = simplify(region)
    if model.finite_volume:
        return _direct_sampler(model, FullSpace()), model.volume
    if isinstance(region, Intersection):
        for side in (region.a, region.b):
            try:
                m = _measure(model, side)
            except UnsupportedRegionError:
                continue
            if math.isfinite(m):
                d = _direct_sampler(model, side)
                if d is not None:
                    return d, m
                try:
                    return _superset_sampler(model, side)
                except SamplingError:
                    continue
    if isinstance(region, Union):
        sa, ma = _superset_sampler(model, region.a)
        sb, mb = _superset_sampler(model, region.b)

        def draw_union(rng):
            return sa(rng) if rng.random() * (ma + mb) < ma else sb(rng)

        return draw_union, ma + mb
    if isinstance(region, Ball) and model.kind == "hyperbolic3":
        rad = region.radius + distance(model, np.zeros(3), np.asarray(region.center))
        return (
            lambda rng: _h3_ball_sample(model, rad, rng),
            math.pi * (math.sinh(2.0 * rad) - 2.0 * rad),
        )
    raise SamplingError(f"no finite-measure superset sampler for {region} on {model!r}")


def _interval_sample(model, ivs, rng):
    if model.kind == "gaussian":
        masses = [normal_cdf(b) - normal_cdf(a) for a, b in ivs]
    else:
        masses = [b - a for a, b in ivs]
    total = float(sum(masses))
    u = rng.random() * total
    idx = len(ivs) - 1
    acc = 0.0
    for i, m in enumerate(masses):
        acc += m
        if u <= acc:
            idx = i
            break
    a, b = ivs[idx]
    if model.kind == "gaussian":
        lo, hi = normal_cdf(a), normal_cdf(b)
        return np.array([_norm_ppf(lo + rng.random() * (hi - lo))])
    x = a + rng.random() * (b - a)
    if is_circle(model):
        x %= circle_length(model)
        if model.kind == "sphere":
            ang = x / model.radius
            return model.radius * np.array([math.cos(ang), math.sin(ang)])
    return np.array([x])


def _norm_ppf(p: float) -> float:
    """Inverse standard normal CDF by bisection (deterministic, ~1e-13)."""
    if not 0.0 < p < 1.0:
        raise InvalidInputError("ppf argument must lie in (0,1)")
    lo, hi = -40.0, 40.0
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        if normal_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _sphere_uniform(model, rng):
    if model.dim == 1:
        ang = rng.random() * _TWO_PI
        return model.radius * np.array([math.cos(ang), math.sin(ang)])
    z = 2.0 * rng.random() - 1.0
    phi = rng.random() * _TWO_PI
    s = math.sqrt(max(0.0, 1.0 - z * z))
    return model.radius * np.array([s * math.cos(phi), s * math.sin(phi), z])


def _cap_sample(model, axis, u0, u1, rng):
    z = math.cos(u0) - rng.random() * (math.cos(u0) - math.cos(u1))
    phi = rng.random() * _TWO_PI
    s = math.sqrt(max(0.0, 1.0 - z * z))
    local = np.array([s * math.cos(phi), s * math.sin(phi), z])
    return model.radius * _rotate_z_to(axis, local)


def _rotate_z_to(axis, v):
    """Rotate v by the rotation taking e_z onto the unit vector axis."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    c = float(a[2])
    if c > 1.0 - 1e-14:
        return v
    if c < -1.0 + 1e-14:
        return np.array([v[0], -v[1], -v[2]])
    k = np.cross(np.array([0.0, 0.0, 1.0]), a)
    s = float(np.linalg.norm(k))
    k = k / s
    return v * c + np.cross(k, v) * s + k * float(np.dot(k, v)) * (1.0 - c)


def _euclid_ball_sample(model, region, rng):
    n = model.dim
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    r = region.radius * rng.random() ** (1.0 / n)
    return np.asarray(region.center) + r * v


def _h3_ball_sample(model, radius, rng):
    """Radius by inverse transform of hyperbolic volume growth, direction uniform."""
    vol = math.pi * (math.sinh(2.0 * radius) - 2.0 * radius)
    target = rng.random() * vol
    lo, hi = 0.0, radius
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if math.pi * (math.sinh(2.0 * mid) - 2.0 * mid) < target:
            lo = mid
        else:
            hi = mid
    rho = 0.5 * (lo + hi)
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    return math.tanh(rho / 2.0) * v  # geodesic balls at 0 are Euclidean balls in this chart


def validate_region(model: ManifoldModel, region: Region) -> bool:
    """Reject region/model combinations that have no closed-form measure."""
    region_measure(model, region)
    return True
