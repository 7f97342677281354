import json
import os

import pytest

from fracperim import cli
from fracperim import models as geo
from fracperim.config import ConfigError, emit_config, parse_config
from fracperim.report import CSV_HEADER, emit_results, sweep_rows

TORUS_CFG = """
# quick torus sweep
[experiment torus_demo]
model = flat_torus 6.283185307179586
E = arc 0.0 3.141592653589793
Omega = fullspace
schedule = 0.2 0.1 0.05
seed = 42
tolerance = 0.02
"""


def test_parse_minimal_defaults():
    spec = parse_config("[experiment a]\nmodel = euclidean 1\nE = interval 0 1\n")[0]
    assert isinstance(spec.Omega, geo.FullSpace)
    assert spec.schedule.values == (0.4, 0.3, 0.2, 0.1, 0.05, 0.025)
    assert spec.tolerance == 0.02
    assert not spec.explicit_seed


def test_parse_duplicate_id():
    text = TORUS_CFG + TORUS_CFG
    with pytest.raises(ConfigError, match="duplicate id"):
        parse_config(text)


def test_parse_schedule_range():
    with pytest.raises(ConfigError, match=r"s must lie in \(0,1\)"):
        parse_config("[experiment a]\nmodel = euclidean 1\nE = interval 0 1\nschedule = 1.2 0.5 0.2\n")


def test_parse_syntax_error_reports_line():
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("[experiment a]\nmodel = euclidean 1\nwhat is this\n")


def test_parse_unconstructible_region():
    text = "[experiment a]\nmodel = euclidean 2\nE = intersect( ball 5 0 1 ; ball 5.5 0 1 )\n"
    with pytest.raises(ConfigError, match="not constructible"):
        parse_config(text)


def test_region_grammar_nested():
    text = (
        "[experiment a]\nmodel = euclidean 2\n"
        "E = intersect( cone 1 0 0.7853981633974483 ; ball 0 0 1 )\n"
        "Omega = complement( ball 0 0 2 )\n"
    )
    spec = parse_config(text)[0]
    assert isinstance(spec.E, geo.Intersection)
    assert isinstance(spec.Omega, geo.Complement)


def test_config_roundtrip():
    specs = parse_config(TORUS_CFG)
    assert parse_config(emit_config(specs)) == specs


def test_emit_results_empty(tmp_path):
    paths = emit_results([], str(tmp_path), "csv", plots=False)
    content = open(paths[0]).read()
    assert content == CSV_HEADER + "\n"


def test_emit_results_rows_and_summary(tmp_path):
    rep = sweep_rows("demo", "Euclidean(1)", [(s, 1.0 + s, 1e-6) for s in (0.4, 0.3, 0.2, 0.1, 0.05, 0.025)],
                     predicted=1.0, extrapolated=1.001, extrapolation_error=0.002, verdict="pass")
    paths = emit_results([rep], str(tmp_path), "both", plots=False)
    lines = open(paths[0]).read().strip().splitlines()
    assert len(lines) == 1 + 6 + 1  # header + sweep + summary
    assert lines[-1].endswith("pass")
    data = json.load(open(paths[1]))
    assert len(data["rows"]) == 7
    assert data["rows"][0]["experiment_id"] == "demo"


def test_emit_results_byte_stable(tmp_path):
    rep = sweep_rows("demo", "Euclidean(1)", [(0.1, 1.23456789, 1e-7)], predicted=1.0)
    p1 = emit_results([rep], str(tmp_path / "a"), "both", plots=False)
    p2 = emit_results([rep], str(tmp_path / "b"), "both", plots=False)
    assert open(p1[0], "rb").read() == open(p2[0], "rb").read()
    assert open(p1[1], "rb").read() == open(p2[1], "rb").read()


def _write(tmp_path, text):
    path = tmp_path / "exp.cfg"
    path.write_text(text)
    return str(path)


def test_cli_limit_pass_and_outputs(tmp_path):
    cfg = _write(tmp_path, TORUS_CFG)
    out = str(tmp_path / "out")
    rc = cli.main(["limit", "--config", cfg, "--out", out])
    assert rc == 0
    assert os.path.exists(os.path.join(out, "results.csv"))
    assert os.path.exists(os.path.join(out, "results.json"))
    assert os.path.exists(os.path.join(out, "torus_demo.png"))
    lines = open(os.path.join(out, "results.csv")).read().strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[-1].endswith("pass")


def test_cli_exit_1_on_verdict_failure(tmp_path):
    cfg = _write(tmp_path, TORUS_CFG.replace("tolerance = 0.02", "tolerance = 0.02\nexpected = 9.9"))
    rc = cli.main(["limit", "--config", cfg, "--out", str(tmp_path / "o")])
    assert rc == 1


def test_cli_exit_2_on_config_error(tmp_path):
    cfg = _write(tmp_path, "[experiment a]\nmodel = euclidean 1\n")  # missing E
    assert cli.main(["limit", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert cli.main(["limit", "--config", str(tmp_path / "missing.cfg"), "--out", str(tmp_path / "o")]) == 2
    assert cli.main(["limit", "--out", str(tmp_path / "o")]) == 2


def test_cli_usage_error_exit_2():
    assert cli.main(["unknown-subcommand"]) == 2


def test_cli_jobs_deterministic(tmp_path):
    cfg = _write(tmp_path, TORUS_CFG)
    out1, out2 = str(tmp_path / "o1"), str(tmp_path / "o2")
    assert cli.main(["limit", "--config", cfg, "--out", out1, "--jobs", "1", "--no-plots"]) == 0
    assert cli.main(["limit", "--config", cfg, "--out", out2, "--jobs", "4", "--no-plots"]) == 0
    a = open(os.path.join(out1, "results.csv"), "rb").read()
    b = open(os.path.join(out2, "results.csv"), "rb").read()
    assert a == b


def test_cli_seed_precedence(tmp_path, monkeypatch):
    # env seed applies only when the config does not pin one
    text = "[experiment a]\nmodel = euclidean 1\nE = interval 0 1\n"
    cfg = _write(tmp_path, text)
    monkeypatch.setenv(cli.ENV_SEED, "777")
    specs = cli._apply_overrides(parse_config(text), _FakeArgs())
    assert specs[0].quad.seed == 777
    pinned = parse_config(text.replace("E = interval 0 1", "E = interval 0 1\nseed = 5"))
    specs = cli._apply_overrides(pinned, _FakeArgs())
    assert specs[0].quad.seed == 5
    specs = cli._apply_overrides(pinned, _FakeArgs(seed=9))
    assert specs[0].quad.seed == 9


class _FakeArgs:
    def __init__(self, seed=None, schedule=None):
        self.seed = seed
        self.schedule = schedule


def test_cli_theta(tmp_path):
    text = """
[experiment halfplane_density]
model = euclidean 2
E = halfspace 0 1 0
schedule = 0.2 0.1 0.05
radii = 1.0 2.0
tolerance = 0.02
"""
    cfg = _write(tmp_path, text)
    out = str(tmp_path / "out")
    rc = cli.main(["theta", "--config", cfg, "--out", out, "--no-plots"])
    assert rc == 0
    rows = json.load(open(os.path.join(out, "results.json")))["rows"]
    summary = [r for r in rows if r["s"] == ""][0]
    assert summary["verdict"] == "pass"
    assert abs(float(summary["extrapolated"]) - 0.5) < 0.01


def test_cli_kernel(tmp_path):
    text = "[experiment kline]\nmodel = euclidean 1\nE = interval 0 1\nschedule = 0.5 0.3 0.1\n"
    cfg = _write(tmp_path, text)
    out = str(tmp_path / "out")
    rc = cli.main(["kernel", "--config", cfg, "--out", out, "--no-plots"])
    assert rc == 0
    rows = json.load(open(os.path.join(out, "results.json")))["rows"]
    assert any(r["experiment_id"].startswith("kline@d=") for r in rows)


def test_cli_equiv_runs_clean(tmp_path):
    rc = cli.main(["equiv", "--out", str(tmp_path / "out"), "--no-plots"])
    assert rc == 0


def test_cli_schedule_override(tmp_path):
    cfg = _write(tmp_path, TORUS_CFG)
    out = str(tmp_path / "out")
    rc = cli.main(["limit", "--config", cfg, "--out", out, "--schedule", "0.3,0.15,0.075", "--no-plots"])
    assert rc == 0
    rows = json.load(open(os.path.join(out, "results.json")))["rows"]
    svals = [r["s"] for r in rows if r["s"]]
    assert svals == ["0.3", "0.15", "0.075"]


def test_suite_negative_control(tmp_path, monkeypatch):
    # a build with a broken kernel normalization must fail the closed-form
    # criterion (the reference constant is computed independently)
    import fracperim.singkernel as sk
    import fracperim.suite as suite_mod

    orig = sk.gamma_norm
    monkeypatch.setattr(sk, "gamma_norm", lambda s: -orig(s))
    monkeypatch.setattr(suite_mod, "CRITERIA", (suite_mod.euclidean_kernel_closed_form,))
    rc = cli.main(["suite", "--out", str(tmp_path / "out"), "--format", "csv"])
    assert rc == 1
    content = open(os.path.join(str(tmp_path / "out"), "results.csv")).read()
    assert "euclidean-kernel-closed-form" in content
    assert "fail" in content


def test_cli_perimeter_subcommand(tmp_path):
    cfg = _write(tmp_path, TORUS_CFG)
    out = str(tmp_path / "out")
    rc = cli.main(["perimeter", "--config", cfg, "--out", out, "--no-plots", "--format", "csv"])
    assert rc == 0
    lines = open(os.path.join(out, "results.csv")).read().strip().splitlines()
    assert len(lines) == 1 + 3 + 1  # header + one row per s + summary
