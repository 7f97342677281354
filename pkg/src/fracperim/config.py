"""Experiment configuration: a line-oriented key/value format with sections.

Grammar (one experiment per section)::

    # comment
    [experiment ID]
    model    = euclidean 2 | flat_torus L1 [L2 ...] | sphere N RADIUS |
               hyperbolic3 | gaussian N
    E        = REGION
    Omega    = REGION                      (default: fullspace)
    schedule = s1 s2 ...                   (strictly decreasing, in (0,1))
    seed     = INT
    tolerance = FLOAT                      (relative verdict tolerance)
    expected = FLOAT | auto                (auto: use the predicted limit)
    radii    = r1 r2 ...                   (heat-density sweeps)
    point    = x1 [x2 ...]                 (base point, default origin)
    rel_tol / abs_tol / t_split / mc_samples / diag_cutoff   (quadrature)

    REGION   = fullspace | empty
             | ball C1 [C2 ...] RADIUS
             | interval A B
             | arc START LENGTH [START LENGTH ...]
             | cap PX PY PZ ANGLE
             | halfspace N1 [N2 ...] OFFSET
             | cone A1 [A2 ...] HALF_ANGLE
             | complement( REGION )
             | intersect( REGION ; REGION )
             | union( REGION ; REGION )

parse_config and emit_config round-trip: parse(emit(parse(text))) == parse(text).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from . import models as geo
from .asymptotics import SSchedule
from .errors import InvalidInputError, UnsupportedRegionError
from .quadrature import QuadConfig

__all__ = ["ExperimentSpec", "ConfigError", "parse_config", "emit_config"]


class ConfigError(InvalidInputError):
    """Configuration syntax or semantic error with location context."""

    def __init__(self, message, line=None, col=None):
        loc = f" (line {line}" + (f", col {col})" if col is not None else ")") if line else ""
        super().__init__(message + loc)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class ExperimentSpec:
    id: str
    model: geo.ManifoldModel
    E: geo.Region
    Omega: geo.Region
    schedule: SSchedule
    quad: QuadConfig
    tolerance: float = 0.02
    expected: Optional[float] = None  # None: use the predicted limit
    radii: tuple = (1.0, 2.0)
    point: Optional[tuple] = None
    explicit_seed: bool = False  # seed came from the config file

    def with_seed(self, seed: int) -> "ExperimentSpec":
        return replace(self, quad=replace(self.quad, seed=int(seed)), explicit_seed=True)

    def with_schedule(self, schedule: SSchedule) -> "ExperimentSpec":
        return replace(self, schedule=schedule)


# ---------------------------------------------------------------------------
# region expressions


def _parse_region(text: str, line_no: int):
    toks = text.replace("(", " ( ").replace(")", " ) ").replace(";", " ; ").split()
    pos = [0]

    def peek():
        return toks[pos[0]] if pos[0] < len(toks) else None

    def take(expect=None):
        t = peek()
        if t is None or (expect is not None and t != expect):
            raise ConfigError(f"expected {expect or 'a token'}, got {t!r}", line_no)
        pos[0] += 1
        return t

    def numbers(minimum):
        out = []
        while peek() is not None and peek() not in ("(", ")", ";"):
            try:
                out.append(float(peek()))
            except ValueError:
                break
            pos[0] += 1
        if len(out) < minimum:
            raise ConfigError(f"expected at least {minimum} numbers", line_no)
        return out

    def expr():
        head = take()
        if head == "fullspace":
            return geo.FullSpace()
        if head == "empty":
            return geo.Empty()
        if head == "ball":
            nums = numbers(2)
            return geo.Ball(tuple(nums[:-1]), nums[-1])
        if head == "interval":
            a, b = numbers(2)[:2]
            if b <= a:
                raise ConfigError("interval needs a < b", line_no)
            return geo.Ball(((a + b) / 2.0,), (b - a) / 2.0)
        if head == "arc":
            nums = numbers(2)
            if len(nums) % 2:
                raise ConfigError("arc takes START LENGTH pairs", line_no)
            return geo.Arc(tuple((nums[i], nums[i + 1]) for i in range(0, len(nums), 2)))
        if head == "cap":
            nums = numbers(4)
            return geo.Cap(tuple(nums[:-1]), nums[-1])
        if head == "halfspace":
            nums = numbers(2)
            return geo.HalfSpace(tuple(nums[:-1]), nums[-1])
        if head == "cone":
            nums = numbers(2)
            return geo.Cone(tuple(nums[:-1]), nums[-1])
        if head == "complement":
            take("(")
            inner = expr()
            take(")")
            return geo.Complement(inner)
        if head in ("intersect", "union"):
            take("(")
            a = expr()
            take(";")
            b = expr()
            take(")")
            return geo.Intersection(a, b) if head == "intersect" else geo.Union(a, b)
        raise ConfigError(f"unknown region {head!r}", line_no)

    region = expr()
    if peek() is not None:
        raise ConfigError(f"trailing tokens after region: {peek()!r}", line_no)
    return region


def region_to_text(region: geo.Region) -> str:
    if isinstance(region, geo.FullSpace):
        return "fullspace"
    if isinstance(region, geo.Empty):
        return "empty"
    if isinstance(region, geo.Ball):
        return "ball " + _nums(region.center + (region.radius,))
    if isinstance(region, geo.Arc):
        return "arc " + " ".join(_nums(iv) for iv in region.intervals)
    if isinstance(region, geo.Cap):
        return "cap " + _nums(region.pole + (region.angle,))
    if isinstance(region, geo.HalfSpace):
        return "halfspace " + _nums(region.normal + (region.offset,))
    if isinstance(region, geo.Cone):
        return "cone " + _nums(region.axis + (region.half_angle,))
    if isinstance(region, geo.Complement):
        return f"complement( {region_to_text(region.region)} )"
    if isinstance(region, geo.Intersection):
        return f"intersect( {region_to_text(region.a)} ; {region_to_text(region.b)} )"
    if isinstance(region, geo.Union):
        return f"union( {region_to_text(region.a)} ; {region_to_text(region.b)} )"
    raise InvalidInputError(str(region))


def _nums(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def _parse_model(text: str, line_no: int) -> geo.ManifoldModel:
    toks = text.split()
    if not toks:
        raise ConfigError("empty model", line_no)
    kind = toks[0]
    try:
        if kind == "euclidean":
            return geo.euclidean(int(toks[1]))
        if kind == "flat_torus":
            return geo.flat_torus([float(t) for t in toks[1:]])
        if kind == "sphere":
            return geo.sphere(int(toks[1]), float(toks[2]))
        if kind == "hyperbolic3":
            return geo.hyperbolic3()
        if kind == "gaussian":
            return geo.gaussian_space(int(toks[1]))
    except (IndexError, ValueError) as exc:
        raise ConfigError(f"bad model arguments: {text!r} ({exc})", line_no)
    raise ConfigError(f"unknown model {kind!r}", line_no)


def model_to_text(model: geo.ManifoldModel) -> str:
    if model.kind == "euclidean":
        return f"euclidean {model.dim}"
    if model.kind == "flat_torus":
        return "flat_torus " + " ".join(repr(L) for L in model.lengths)
    if model.kind == "sphere":
        return f"sphere {model.dim} {model.radius!r}"
    if model.kind == "hyperbolic3":
        return "hyperbolic3"
    if model.kind == "gaussian":
        return f"gaussian {model.dim}"
    raise InvalidInputError(model.kind)


# ---------------------------------------------------------------------------
# config files


_QUAD_KEYS = {"rel_tol": float, "abs_tol": float, "t_split": float,
              "mc_samples": int, "diag_cutoff": float, "seed": int}


def parse_config(text: str) -> list[ExperimentSpec]:
    """Parse a config file into validated experiment specs."""
    sections = []
    current = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("unterminated section header", line_no, raw.index("[") + 1)
            head = line[1:-1].split()
            if len(head) != 2 or head[0] != "experiment":
                raise ConfigError("section must read [experiment ID]", line_no)
            current = {"id": head[1], "line": line_no, "keys": {}}
            sections.append(current)
            continue
        if "=" not in line:
            raise ConfigError("expected key = value", line_no, len(raw) - len(raw.lstrip()) + 1)
        if current is None:
            raise ConfigError("key outside any [experiment ...] section", line_no)
        key, value = (part.strip() for part in line.split("=", 1))
        if key in current["keys"]:
            raise ConfigError(f"duplicate key {key!r}", line_no)
        current["keys"][key] = (value, line_no)

    specs = []
    seen = set()
    for sec in sections:
        if sec["id"] in seen:
            raise ConfigError(f"duplicate id {sec['id']!r}", sec["line"])
        seen.add(sec["id"])
        specs.append(_build_spec(sec))
    return specs


def _build_spec(sec) -> ExperimentSpec:
    keys = dict(sec["keys"])
    line = sec["line"]

    def pop(name, default=None):
        if name in keys:
            return keys.pop(name)
        return (default, line) if default is not None else None

    got = pop("model")
    if got is None:
        raise ConfigError(f"experiment {sec['id']!r} needs a model", line)
    model = _parse_model(got[0], got[1])

    got = pop("E")
    if got is None:
        raise ConfigError(f"experiment {sec['id']!r} needs a region E", line)
    E = _parse_region(got[0], got[1])
    got = keys.pop("Omega", None)
    Omega = _parse_region(got[0], got[1]) if got else geo.FullSpace()

    got = keys.pop("schedule", None)
    if got:
        vals = tuple(float(v) for v in got[0].split())
        if any(not 0.0 < v < 1.0 for v in vals):
            raise ConfigError("s must lie in (0,1)", got[1])
        try:
            schedule = SSchedule(vals)
        except InvalidInputError as exc:
            raise ConfigError(str(exc), got[1])
    else:
        schedule = SSchedule()

    quad_kwargs = {}
    for name, caster in _QUAD_KEYS.items():
        got = keys.pop(name, None)
        if got:
            try:
                quad_kwargs[name] = caster(got[0])
            except ValueError as exc:
                raise ConfigError(f"bad value for {name}: {exc}", got[1])
    try:
        quad = QuadConfig(**quad_kwargs)
    except InvalidInputError as exc:
        raise ConfigError(str(exc), line)

    tolerance = 0.02
    got = keys.pop("tolerance", None)
    if got:
        tolerance = float(got[0])
        if tolerance <= 0:
            raise ConfigError("tolerance must be positive", got[1])
    expected = None
    got = keys.pop("expected", None)
    if got and got[0] != "auto":
        try:
            expected = float(got[0])
        except ValueError:
            raise ConfigError("expected must be a number or 'auto'", got[1])
    radii = (1.0, 2.0)
    got = keys.pop("radii", None)
    if got:
        radii = tuple(float(v) for v in got[0].split())
    point = None
    got = keys.pop("point", None)
    if got:
        point = tuple(float(v) for v in got[0].split())

    if keys:
        name, (_, line_no) = next(iter(keys.items()))
        raise ConfigError(f"unknown key {name!r}", line_no)

    spec = ExperimentSpec(
        id=sec["id"], model=model, E=E, Omega=Omega, schedule=schedule,
        quad=quad, tolerance=tolerance, expected=expected, radii=radii, point=point,
        explicit_seed="seed" in quad_kwargs,
    )
    _validate_spec(spec)
    return spec


def _validate_spec(spec: ExperimentSpec):
    try:
        geo.validate_region(spec.model, spec.E)
        geo.validate_region(spec.model, spec.Omega)
        geo.region_measure(spec.model, geo.Intersection(spec.E, spec.Omega))
    except (UnsupportedRegionError, InvalidInputError, geo.DimensionMismatchError) as exc:
        raise ConfigError(f"experiment {spec.id!r}: regions not constructible: {exc}")


def emit_config(specs) -> str:
    """Canonical text form; parse(emit(parse(t))) == parse(t)."""
    out = []
    for spec in specs:
        out.append(f"[experiment {spec.id}]")
        out.append(f"model = {model_to_text(spec.model)}")
        out.append(f"E = {region_to_text(spec.E)}")
        out.append(f"Omega = {region_to_text(spec.Omega)}")
        out.append("schedule = " + " ".join(repr(s) for s in spec.schedule.values))
        q = spec.quad
        out.append(f"rel_tol = {q.rel_tol!r}")
        out.append(f"abs_tol = {q.abs_tol!r}")
        out.append(f"t_split = {q.t_split!r}")
        out.append(f"mc_samples = {q.mc_samples}")
        out.append(f"diag_cutoff = {q.diag_cutoff!r}")
        if spec.explicit_seed:
            out.append(f"seed = {q.seed}")
        out.append(f"tolerance = {spec.tolerance!r}")
        if spec.expected is not None:
            out.append(f"expected = {spec.expected!r}")
        out.append("radii = " + " ".join(repr(r) for r in spec.radii))
        if spec.point is not None:
            out.append("point = " + " ".join(repr(p) for p in spec.point))
        out.append("")
    return "\n".join(out)
