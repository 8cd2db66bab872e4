import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from cyclegap.cli import main

FIXTURES = Path(__file__).parent / "fixtures" / "expected"


def _run(args, tmp_path, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("fixture", sorted(FIXTURES.glob("*.json")), ids=lambda p: p.stem)
def test_bundled_scenarios_match_expected_reports(fixture, tmp_path, capsys):
    expected = json.loads(fixture.read_text())
    out = tmp_path / "report.json"
    code, _, _ = _run(["run", expected["scenario"], "--out", str(out)], tmp_path, capsys)
    assert code == expected["exit_code"]
    report = json.loads(out.read_text())
    assert report["passed"] is expected["passed"]
    for key in ("d", "v"):
        np.testing.assert_allclose(report["gap"][key], expected["gap"][key], atol=expected["tolerance"])
    assert {c["name"]: c["passed"] for c in report["checks"]} == expected["checks"]


def test_run_prints_summary(tmp_path, capsys):
    code, out, _ = _run(["run", "three_singletons", "--out", str(tmp_path / "r.json")], tmp_path, capsys)
    assert code == 0
    assert out.count("PASS") == 5 and "FAIL" not in out
    assert "report written to" in out


def test_report_contains_residuals(tmp_path, capsys):
    out = tmp_path / "r.json"
    main(["run", "two_intervals", "--out", str(out)])
    report = json.loads(out.read_text())
    assert report["schema_version"] == 1
    for key in ("y_residual", "D_residual", "splitting_residual"):
        assert key in report["gap"]
    assert all("fixed_point_residual" in k for k in report["km"])
    saddle = next(c for c in report["checks"] if c["name"] == "saddle")
    assert "probe_residual" in saddle["details"]
    for rec in report["checks"]:
        assert {"name", "passed", "violation", "tolerance", "witnesses"} <= set(rec)
        assert rec["name"] in report["timings"]


def _write(tmp_path, doc, name="bad.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def test_single_set_is_a_usage_error(tmp_path, capsys):
    path = _write(tmp_path, {"m": 1, "n": 1, "sets": [{"kind": "box", "lower": [0], "upper": [1]}]})
    code, _, err = _run(["run", path, "--out", str(tmp_path / "r.json")], tmp_path, capsys)
    assert code == 2
    assert "m" in err and ">= 2" in err and "at least two sets" in err
    assert not (tmp_path / "r.json").exists()


def test_inverted_box_is_a_usage_error(tmp_path, capsys):
    path = _write(tmp_path, {"m": 2, "n": 1, "sets": [
        {"kind": "box", "lower": [1], "upper": [0]}, {"kind": "box", "lower": [0], "upper": [1]}]})
    code, _, err = _run(["verify", path], tmp_path, capsys)
    assert code == 2 and "sets[0]" in err


def test_malformed_json_reports_line(tmp_path, capsys):
    path = _write(tmp_path, '{\n  "m": 2,\n  "n": 1\n  "sets": []\n}\n')
    code, _, err = _run(["run", path], tmp_path, capsys)
    assert code == 2 and "line 4" in err


def test_unknown_field_reports_path(tmp_path, capsys):
    path = _write(tmp_path, {"m": 2, "n": 1, "solver": {"alpha": 0.5, "speed": 3},
                             "sets": [{"kind": "singleton", "point": [0]}] * 2})
    code, _, err = _run(["run", path], tmp_path, capsys)
    assert code == 2 and "solver" in err and "speed" in err


def test_missing_file(tmp_path, capsys):
    code, _, err = _run(["run", str(tmp_path / "nope.json")], tmp_path, capsys)
    assert code == 2 and "cannot read" in err


def test_unknown_check(tmp_path, capsys):
    code, _, err = _run(["verify", "two_intervals", "--check", "banana"], tmp_path, capsys)
    assert code == 2 and "banana" in err


@pytest.mark.parametrize("checks", [["geometry"], ["all"], ["cycle", "dbound"]])
def test_verify_selected_checks(checks, tmp_path, capsys):
    out = tmp_path / "r.json"
    args = ["verify", "two_intervals", "--out", str(out)]
    for c in checks:
        args += ["--check", c]
    code, _, _ = _run(args, tmp_path, capsys)
    assert code == 0
    names = [c["name"] for c in json.loads(out.read_text())["checks"]]
    assert names == (["cycle", "pthm", "geometry", "saddle", "dbound"] if checks == ["all"] else checks)


def test_non_convergence_exits_one_and_writes_report(tmp_path, capsys):
    path = _write(tmp_path, {"m": 2, "n": 1, "solver": {"max_iters": 2},
                             "sets": [{"kind": "box", "lower": [-1], "upper": [1]},
                                      {"kind": "box", "lower": [3], "upper": [5]}]})
    out = tmp_path / "r.json"
    code, _, _ = _run(["run", path, "--out", str(out)], tmp_path, capsys)
    assert code == 1
    report = json.loads(out.read_text())
    assert report["passed"] is False and report["gap"]["converged"] is False


@pytest.mark.parametrize("m,n,trials,seed", [(3, 2, 100, 42), (2, 1, 100, 0), (6, 4, 1000, 0)])
def test_identities_command(m, n, trials, seed, tmp_path, capsys):
    code, out, _ = _run(["identities", "--m", str(m), "--n", str(n), "--trials", str(trials),
                         "--seed", str(seed)], tmp_path, capsys)
    assert code == 0 and "FAIL" not in out
    worst = max(float(line.split()[-1]) for line in out.splitlines())
    assert worst <= (1e-12 if (m, n) == (3, 2) else 1e-10)


def test_identities_rejects_m_one(tmp_path, capsys):
    code, _, _ = _run(["identities", "--m", "1", "--n", "1"], tmp_path, capsys)
    assert code == 2


def test_missing_argument_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["identities", "--m", "3"])
    assert exc.value.code == 2


def _strip(report):
    report = dict(report)
    report.pop("timestamp")
    report.pop("timings")
    return report


def test_module_entry_point_is_deterministic(tmp_path):
    reports = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        proc = subprocess.run([sys.executable, "-m", "cyclegap", "run", "three_mixed", "--out", str(out)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        reports.append(_strip(json.loads(out.read_text())))
    assert json.dumps(reports[0], sort_keys=True) == json.dumps(reports[1], sort_keys=True)
