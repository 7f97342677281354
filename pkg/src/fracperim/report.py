"""Result serialization: delimited output, a JSON mirror, and sweep figures.

CSV rows follow the fixed header; sweep rows carry one s value each and
summary rows leave the s column empty.  Files are byte-stable for identical
inputs and seeds (fixed float formatting, no timestamps).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Optional

CSV_HEADER = "experiment_id,model,s,value,error_bound,predicted,extrapolated,extrapolation_error,verdict"
_FIELDS = CSV_HEADER.split(",")


@dataclass(frozen=True)
class ReportRow:
    experiment_id: str
    model: str
    s: Optional[float] = None
    value: Optional[float] = None
    error_bound: Optional[float] = None
    predicted: Optional[float] = None
    extrapolated: Optional[float] = None
    extrapolation_error: Optional[float] = None
    verdict: str = ""

    def as_dict(self):
        return {
            "experiment_id": self.experiment_id,
            "model": self.model,
            "s": _fmt(self.s),
            "value": _fmt(self.value),
            "error_bound": _fmt(self.error_bound),
            "predicted": _fmt(self.predicted),
            "extrapolated": _fmt(self.extrapolated),
            "extrapolation_error": _fmt(self.extrapolation_error),
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class ExperimentRows:
    """All rows of one experiment: sweep rows first, then the summary row."""

    experiment_id: str
    model: str
    rows: tuple


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.12g" % float(x)


def sweep_rows(experiment_id: str, model_name: str, per_s, predicted=None,
               extrapolated=None, extrapolation_error=None, verdict="") -> ExperimentRows:
    """Rows for a sweep report: one row per point plus one summary row."""
    rows = [
        ReportRow(experiment_id, model_name, s=s, value=v, error_bound=e)
        for (s, v, e) in per_s
    ]
    rows.append(
        ReportRow(
            experiment_id, model_name, predicted=predicted, extrapolated=extrapolated,
            extrapolation_error=extrapolation_error, verdict=verdict,
        )
    )
    return ExperimentRows(experiment_id, model_name, tuple(rows))


def emit_results(reports, out_dir: str, fmt: str = "both", plots: bool = True) -> list[str]:
    """Write results.csv / results.json (and sweep figures) into out_dir.

    reports is a sequence of ExperimentRows; returns the written paths.
    """
    if fmt not in ("csv", "json", "both"):
        raise ValueError(f"unknown format {fmt!r}")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    all_rows = [row for rep in reports for row in rep.rows]
    if fmt in ("csv", "both"):
        path = os.path.join(out_dir, "results.csv")
        try:
            with open(path, "w") as fh:
                fh.write(CSV_HEADER + "\n")
                for row in all_rows:
                    d = row.as_dict()
                    fh.write(",".join(d[k] for k in _FIELDS) + "\n")
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        written.append(path)
    if fmt in ("json", "both"):
        path = os.path.join(out_dir, "results.json")
        payload = {"rows": [row.as_dict() for row in all_rows]}
        try:
            with open(path, "w") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        written.append(path)
    if plots:
        written.extend(render_figures(reports, out_dir))
    return written


def render_figures(reports, out_dir: str) -> list[str]:
    """One PNG per experiment: the sweep with error bars and the two limits."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(out_dir, exist_ok=True)
    written = []
    for rep in reports:
        sweep = [(r.s, r.value, r.error_bound) for r in rep.rows if r.s is not None]
        summary = next((r for r in rep.rows if r.s is None), None)
        if not sweep:
            continue
        ss = [p[0] for p in sweep]
        vv = [p[1] for p in sweep]
        ee = [p[2] or 0.0 for p in sweep]
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        ax.errorbar(ss, vv, yerr=ee, fmt="o-", ms=4, lw=1, capsize=2, label="sweep")
        if summary is not None and summary.predicted is not None:
            ax.axhline(summary.predicted, color="k", ls="--", lw=1, label="predicted")
        if summary is not None and summary.extrapolated is not None:
            ax.axhline(summary.extrapolated, color="C3", ls=":", lw=1.2, label="extrapolated")
        ax.set_xlabel("s")
        ax.set_ylabel("value")
        title = rep.experiment_id
        if summary is not None and summary.verdict:
            title += f"  [{summary.verdict}]"
        ax.set_title(title, fontsize=10)
        ax.legend(fontsize=8, frameon=False)
        fig.tight_layout()
        path = os.path.join(out_dir, f"{rep.experiment_id}.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
