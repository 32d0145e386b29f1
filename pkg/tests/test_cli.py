"""CLI: report schema, exit codes, config precedence, determinism."""

import json
import math

import pytest
from click.testing import CliRunner

from concentra.cli import EXIT_OK, EXIT_PREDICATE, EXIT_USAGE, main, run


@pytest.fixture
def runner():
    return CliRunner()


def _json(result):
    return json.loads(result.output)


def test_green_json_schema(runner):
    res = runner.invoke(main, ["green", "--lam", "3", "--x", "0.3,0,0",
                               "--y", "-0.2,0.1,0"])
    assert res.exit_code == EXIT_OK
    doc = _json(res)
    assert doc["schema_version"] == "1"
    assert doc["command"] == "green"
    assert set(doc) == {"schema_version", "command", "inputs", "results",
                        "diagnostics"}
    assert doc["inputs"]["lam"] == 3.0
    assert doc["results"]["tail_bound"] <= doc["diagnostics"]["tol"]


def test_robin_matches_library(runner):
    from concentra.domain import unit_ball
    from concentra.greens import robin
    res = runner.invoke(main, ["robin", "--lam", "2", "--point", "0.3,0,0"])
    want = robin(unit_ball(), 2.0, (0.3, 0, 0))
    assert _json(res)["results"]["value"] == want


def test_certificate_exit_codes(runner):
    ok = runner.invoke(main, ["certificate", "--a", "0.5"])
    assert ok.exit_code == EXIT_OK and _json(ok)["results"]["holds"]
    bad = runner.invoke(main, ["certificate", "--a", "0.01"])
    assert bad.exit_code == EXIT_PREDICATE
    doc = _json(bad)
    assert not doc["results"]["holds"]
    assert "touch_t" in doc["results"]


def test_usage_errors_exit_1():
    assert run(["certificate", "--a", "2.0"]) == EXIT_USAGE   # domain error
    assert run(["robin"]) == EXIT_USAGE                       # missing params
    assert run(["green", "--lam", "3", "--x", "1,2", "--y", "0,0,0"]) \
        == EXIT_USAGE                                         # bad point
    assert run(["no-such-command"]) == EXIT_USAGE


def test_verify_constants(runner):
    res = runner.invoke(main, ["verify-constants"])
    assert res.exit_code == EXIT_OK
    doc = _json(res)
    for name in ("a0", "a1", "a2", "a3"):
        assert doc["results"][name]["rel_error"] <= 1e-8


def test_csv_17_digits_roundtrip(runner):
    args = ["robin", "--lam", "2", "--point", "0.3,0,0"]
    j = _json(runner.invoke(main, args))
    c = runner.invoke(main, args + ["--fmt", "csv"])
    header, row = c.output.strip().splitlines()
    assert header == "value"
    assert float(row) == j["results"]["value"]
    assert row == "%.17g" % j["results"]["value"]


def test_reports_byte_identical(runner):
    args = ["matrix", "--a", "0.5", "--k", "3", "--lam", "10", "--r", "0.7"]
    out1 = runner.invoke(main, args).output
    out2 = runner.invoke(main, args).output
    assert out1 == out2


def test_config_file_precedence(runner, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("lam = 5.0\npoint = 0.3,0,0\n# comment\nfmt = csv\n")
    res = runner.invoke(main, ["robin", "--config", str(cfg)])
    assert res.exit_code == EXIT_OK
    assert res.output.splitlines()[0] == "value"  # fmt came from the file
    # explicit flag overrides the file
    res2 = runner.invoke(main, ["robin", "--config", str(cfg),
                                "--lam", "2.0", "--fmt", "json"])
    doc = _json(res2)
    assert doc["inputs"]["lam"] == 2.0
    assert doc["inputs"]["point"] == "0.3,0,0"


def test_threads_env_fallback(runner, monkeypatch):
    monkeypatch.setenv("CONCENTRA_THREADS", "3")
    res = runner.invoke(main, ["certificate", "--a", "0.5"])
    assert _json(res)["inputs"]["threads"] == 3
    res2 = runner.invoke(main, ["certificate", "--a", "0.5",
                                "--threads", "2"])
    assert _json(res2)["inputs"]["threads"] == 2
    monkeypatch.setenv("CONCENTRA_THREADS", "zebra")
    assert run(["certificate", "--a", "0.5"]) == EXIT_USAGE


def test_polygon_scan_threads_deterministic(runner):
    args = ["polygon-scan", "--a", "0.5", "--k", "2", "--lam-grid", "5,10",
            "--r-grid", "0.6:0.8:3", "--fmt", "csv"]
    seq = runner.invoke(main, args + ["--threads", "1"]).output
    par = runner.invoke(main, args + ["--threads", "4"]).output
    assert seq == par
    lines = seq.strip().splitlines()
    assert lines[0] == "lam,r,sigma1"
    assert len(lines) == 1 + 2 * 3


def test_output_file(runner, tmp_path):
    out = tmp_path / "report.json"
    res = runner.invoke(main, ["certificate", "--a", "0.5",
                               "--output", str(out)])
    assert res.exit_code == EXIT_OK
    assert json.loads(out.read_text())["results"]["holds"]


def test_error_norm_generic_smoke(runner):
    res = runner.invoke(main, ["error-norm", "--a", "0.3", "--k", "2",
                               "--r", "0.6", "--mode", "generic",
                               "--lam", "5", "--eps-grid", "0.05,0.02",
                               "--sample-budget", "150"])
    assert res.exit_code == EXIT_OK
    doc = _json(res)
    assert math.isfinite(doc["results"]["exponent"])
    assert len(doc["results"]["sweep"]) == 2
    # generic mode without --lam is a usage error
    assert run(["error-norm", "--a", "0.3", "--k", "2", "--r", "0.6",
                "--mode", "generic"]) == EXIT_USAGE


def test_help_lists_all_commands(runner):
    res = runner.invoke(main, ["--help"])
    for cmd in ("green", "robin", "matrix", "polygon-scan", "find-critical",
                "threshold-a", "certificate", "verify-constants",
                "energy-check", "error-norm"):
        assert cmd in res.output
