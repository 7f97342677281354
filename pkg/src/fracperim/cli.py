"""Experiment runner: parse configs, execute sweeps, emit results and figures.

Exit codes: 0 success, 1 verdict failure, 2 usage/config error, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import asymptotics as asy
from . import functionals as fn
from . import models as geo
from . import singkernel as sk
from .config import ConfigError, ExperimentSpec, parse_config
from .errors import FracperimError, InvalidInputError, PrecisionError, UnsupportedRegionError
from .report import ExperimentRows, ReportRow, emit_results, sweep_rows

ENV_SEED = "FRACPERIM_SEED"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracperim",
        description="Fractional-perimeter laboratory: sweeps, densities, equivalence checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("kernel", "tabulate the jump kernel over a distance grid"),
        ("perimeter", "relative perimeter for each s of the schedule"),
        ("limit", "vanishing-index sweep with extrapolated limit and verdict"),
        ("theta", "heat-density sweep with cross-radius check"),
        ("equiv", "three-route fractional-Laplacian equivalence battery"),
        ("suite", "full acceptance suite (nonzero exit on any failure)"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="experiment config file")
        p.add_argument("--out", default="results", help="output directory (default: results)")
        p.add_argument("--seed", type=int, help="override every experiment seed")
        p.add_argument("--schedule", help="comma-separated s values, overrides configs")
        p.add_argument("--format", choices=("csv", "json", "both"), default="both")
        p.add_argument("--jobs", type=int, default=1, help="parallel experiments")
        p.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    return parser


def _apply_overrides(specs, args) -> list[ExperimentSpec]:
    out = []
    env_seed = os.environ.get(ENV_SEED)
    for spec in specs:
        if args.seed is not None:
            spec = spec.with_seed(args.seed)
        elif not spec.explicit_seed and env_seed is not None:
            spec = spec.with_seed(int(env_seed))
        if args.schedule:
            values = tuple(float(v) for v in args.schedule.split(","))
            spec = spec.with_schedule(asy.SSchedule(values))
        out.append(spec)
    return out


def _load_specs(args, required=True) -> list[ExperimentSpec]:
    if not args.config:
        if required:
            raise ConfigError("this subcommand needs --config")
        return []
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {args.config}: {exc}")
    return _apply_overrides(parse_config(text), args)


# ---------------------------------------------------------------------------
# subcommand bodies (each produces ExperimentRows per spec)


def _kernel_distance_grid(model: geo.ManifoldModel):
    if model.kind == "flat_torus":
        scale = min(model.lengths) / 2.0
    elif model.kind == "sphere":
        scale = math.pi * model.radius
    else:
        scale = 2.0
    return [scale * f for f in (0.125, 0.25, 0.5, 0.75, 1.0)]


def _points_at_distance(model, d):
    if model.kind in ("euclidean", "gaussian"):
        x = np.zeros(model.dim)
        y = np.zeros(model.dim)
        y[0] = d
        return x, y
    if model.kind == "flat_torus":
        x = np.zeros(model.dim)
        y = np.zeros(model.dim)
        y[0] = d
        return x, y
    if model.kind == "sphere":
        R = model.radius
        ang = d / R
        if model.dim == 1:
            return R * np.array([1.0, 0.0]), R * np.array([math.cos(ang), math.sin(ang)])
        return R * np.array([0.0, 0.0, 1.0]), R * np.array([math.sin(ang), 0.0, math.cos(ang)])
    if model.kind == "hyperbolic3":
        return np.zeros(3), np.array([math.tanh(d / 2.0), 0.0, 0.0])
    raise UnsupportedRegionError(model.kind)


def run_kernel(spec: ExperimentSpec) -> list[ExperimentRows]:
    out = []
    name = repr(spec.model)
    for d in _kernel_distance_grid(spec.model):
        rows = []
        predicted = None
        if spec.model.kind == "euclidean":
            predicted = sk.beta_ns(spec.model.dim, spec.schedule.values[-1]) / d ** (
                spec.model.dim + spec.schedule.values[-1]
            )
        for s in spec.schedule.values:
            x, y = _points_at_distance(spec.model, d)
            kv = sk.kernel_Ks(spec.model, x, y, s, spec.quad)
            rows.append((s, kv.value, kv.error_bound))
        out.append(
            sweep_rows(f"{spec.id}@d={d:g}", name, rows, predicted=predicted)
        )
    return out


def run_perimeter(spec: ExperimentSpec) -> list[ExperimentRows]:
    rows = []
    for s in spec.schedule.values:
        est = fn.perimeter_local(spec.model, spec.E, spec.Omega, s, spec.quad)
        rows.append((s, est.value, est.error_bound))
    predicted = spec.expected
    if predicted is None:
        try:
            predicted = _limit_prediction(spec)
        except (InvalidInputError, UnsupportedRegionError):
            predicted = None
    return [sweep_rows(spec.id, repr(spec.model), rows, predicted=predicted)]


def _limit_prediction(spec: ExperimentSpec) -> float:
    if spec.model.finite_volume:
        return asy.predicted_limit_finite(spec.model, spec.E, spec.Omega)
    if isinstance(geo.simplify(spec.Omega), geo.FullSpace):
        return geo.region_measure(spec.model, spec.E)
    theta = asy.analytic_heat_density(spec.model, spec.E)
    if theta is None:
        raise InvalidInputError("no exact heat density for this set")
    mu_in = geo.region_measure(spec.model, geo.Intersection(spec.E, spec.Omega))
    mu_out = geo.region_measure(spec.model, geo.Intersection(geo.Complement(spec.E), spec.Omega))
    return asy.predicted_limit_infinite(theta, mu_in, mu_out)


def run_limit(spec: ExperimentSpec) -> list[ExperimentRows]:
    rep = asy.run_asymptotic_experiment(
        spec.model, spec.E, spec.Omega, spec.schedule, spec.quad, tolerance=spec.tolerance
    )
    predicted = rep.predicted_limit
    verdict = rep.verdict
    if spec.expected is not None:
        predicted = spec.expected
        scale = abs(predicted) if abs(predicted) > 1e-12 else 1.0
        verdict = "pass" if abs(rep.extrapolated_limit - predicted) <= spec.tolerance * scale else "fail"
    return [
        sweep_rows(
            spec.id, repr(spec.model), [(s, v, e) for s, v, e in rep.per_s],
            predicted=predicted, extrapolated=rep.extrapolated_limit,
            extrapolation_error=rep.extrapolation_error, verdict=verdict,
        )
    ]


def run_theta(spec: ExperimentSpec) -> list[ExperimentRows]:
    point = spec.point
    if point is None:
        point = np.zeros(spec.model.ambient) if spec.model.kind != "flat_torus" else np.zeros(spec.model.dim)
    th = asy.heat_density(spec.model, spec.E, point, spec.radii, spec.schedule, spec.quad)
    predicted = spec.expected
    if predicted is None:
        predicted = asy.analytic_heat_density(spec.model, spec.E)
    verdict = ""
    if predicted is not None:
        scale = abs(predicted) if abs(predicted) > 1e-12 else 1.0
        ok = abs(th.theta - predicted) <= spec.tolerance * scale and th.r_consistent
        verdict = "pass" if ok else "fail"
    rows = [(s, v, 0.0) for s, v in th.per_s]
    return [
        sweep_rows(
            spec.id, repr(spec.model), rows, predicted=predicted,
            extrapolated=th.theta, extrapolation_error=th.error, verdict=verdict,
        )
    ]


def run_equiv(spec: ExperimentSpec | None) -> list[ExperimentRows]:
    from .quadrature import QuadConfig

    tor = geo.flat_torus([2.0 * math.pi])
    quad = spec.quad if spec is not None else QuadConfig()
    u = fn.TrigFunction(tor, {1: (1.0, 0.3), 2: (-0.5, 0.2), 3: (0.25, -0.4)})
    probes = [0.3, 1.1, 2.5, 4.0, 5.7]
    out = []
    all_ok = True
    ident = spec.id if spec is not None else "equiv"
    for s in (0.2, 0.5, 0.8):
        worst = 0.0
        for x in probes:
            si = fn.flap_singular(tor, u, x, s, quad)
            bo = fn.flap_bochner(tor, u, x, s, quad)
            worst = max(worst, abs(si - bo))
        sing = fn.seminorm_singular(tor, u, s / 2.0, quad)
        spec_val = fn.seminorm_spectral(tor, u, s)
        semi_dev = abs(0.5 * sing.value - spec_val) / spec_val
        ok = worst < 1e-4 and semi_dev < 1e-3
        all_ok &= ok
        rows = (
            ReportRow(f"{ident}@s={s:g}", "FlatTorus([6.283185307179586])", s=s,
                      value=worst, error_bound=semi_dev),
            ReportRow(f"{ident}@s={s:g}", "FlatTorus([6.283185307179586])",
                      verdict="pass" if ok else "fail"),
        )
        out.append(ExperimentRows(f"{ident}@s={s:g}", "FlatTorus", rows))
    return out


_MODES = {
    "kernel": run_kernel,
    "perimeter": run_perimeter,
    "limit": run_limit,
    "theta": run_theta,
}


def rows_for_spec(spec: ExperimentSpec, jobs: int = 1, mode: str = "limit"):
    """Serialized result rows for one spec (used for determinism checks)."""
    runner = _MODES[mode]
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        results = list(pool.map(runner, [spec]))
    return tuple(row.as_dict() for group in results for rep in group for row in rep.rows)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        if args.command == "suite":
            from .suite import run_suite

            results = run_suite()
            rows = [
                ExperimentRows(
                    r.name, "suite",
                    (ReportRow(r.name, "suite", verdict="pass" if r.passed else "fail"),),
                )
                for r in results
            ]
            emit_results(rows, args.out, args.format, plots=False)
            if any(not r.passed for r in results):
                failed = ", ".join(r.name for r in results if not r.passed)
                print(f"failing criteria: {failed}")
                return 1
            return 0

        if args.command == "equiv":
            specs = _load_specs(args, required=False)
            reports = []
            if specs:
                for spec in specs:
                    reports.extend(run_equiv(spec))
            else:
                reports.extend(run_equiv(None))
        else:
            specs = _load_specs(args, required=True)
            runner = _MODES[args.command]
            with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
                groups = list(pool.map(runner, specs))
            reports = [rep for group in groups for rep in group]

        emit_results(reports, args.out, args.format, plots=not args.no_plots)
        verdicts = [row.verdict for rep in reports for row in rep.rows if row.verdict]
        if any(v == "fail" for v in verdicts):
            return 1
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PrecisionError as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return 3
    except (InvalidInputError, UnsupportedRegionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FracperimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
