import csv
import json
import subprocess
import sys

import pytest

from hawkesclt.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def _header(path):
    with open(path) as fh:
        return next(csv.reader(fh))


def test_simulate_counts_and_events(tmp_path):
    args = ["simulate", "--out-dir", str(tmp_path), "--kernel", "pareto", "--alpha", "0.5", "--marks", "dirac", "--horizon", "20"]
    assert main(args + ["--replicas", "3", "--grid", "4", "--seed", "1"]) == EXIT_OK
    rows = list(csv.reader(open(tmp_path / "counts.csv")))
    assert rows[0] == ["replica", "t", "N"] and len(rows) == 1 + 3 * 4
    assert main(args + ["--replicas", "2", "--out", "events.csv"]) == EXIT_OK
    assert _header(tmp_path / "events.csv") == ["replica", "id", "parent", "generation", "time", "mark"]


def test_resolvent_table(tmp_path):
    assert main(["resolvent", "--out-dir", str(tmp_path), "--kernel", "pareto", "--alpha", "0.5", "--dt", "0.5", "--horizon", "50"]) == EXIT_OK
    rows = list(csv.reader(open(tmp_path / "table.csv")))
    assert rows[0] == ["k", "t", "m", "r", "I_R"] and len(rows) == 102


def test_laplace_solve(tmp_path, capsys):
    code = main(["laplace-solve", "--out-dir", str(tmp_path), "--f", "indicator:0:1", "--scale", "100", "--cells", "1000"])
    assert code == EXIT_OK
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["centered_log_laplace"] > 0 and data["target"] > 0


def test_limit_paths(tmp_path):
    code = main(["limit", "--out-dir", str(tmp_path), "--paths", "2000", "--tmax", "2", "--dt", "0.0625", "--seed", "3"])
    assert code in (EXIT_OK, EXIT_FAIL)
    assert _header(tmp_path / "limit_paths.csv") == ["path_id", "t", "zeta"]
    report = json.loads((tmp_path / "limit_paths.json").read_text())
    assert report["checks"][0]["name"] == "self_similarity"


def test_clt_exit_codes(tmp_path):
    base = ["clt", "--out-dir", str(tmp_path), "--replicas", "200", "--T", "10"]
    assert main(base + ["--seed", "2"]) in (EXIT_OK, EXIT_FAIL)
    data = json.loads((tmp_path / "clt_report.json").read_text())
    assert {"version", "config", "checks"} <= set(data)
    # the deterministic check at T=10 is far from the limit, so the run fails
    assert any(not c["pass"] for c in data["checks"])
    assert main(base) == EXIT_FAIL


def test_report_single_criterion(tmp_path):
    assert main(["report", "--out-dir", str(tmp_path), "--criteria", "9"]) == EXIT_OK
    data = json.loads((tmp_path / "report.json").read_text())
    assert [c["name"] for c in data["checks"]] == ["09_beta_offspring_law"]


@pytest.mark.parametrize(
    "argv",
    [
        ["report", "--criteria", "12"],
        ["clt", "--alpha", "0.8", "--beta", "0.6"],
        ["laplace-solve", "--f", "box:0:1"],
        ["simulate", "--horizon", "5", "--grid", "1,9"],
        ["simulate", "--horizon", "5", "--kernel", "gauss"],
        ["simulate", "--config", "/nonexistent.yaml", "--horizon", "5"],
    ],
)
def test_usage_errors(tmp_path, argv):
    assert main(argv + ["--out-dir", str(tmp_path)]) == EXIT_USAGE


def test_argparse_errors_exit_with_usage_code():
    with pytest.raises(SystemExit) as exc:
        main(["simulate"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_USAGE


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "hawkesclt", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip()


def test_format_flag(tmp_path):
    out = str(tmp_path)
    assert main(["resolvent", "--out-dir", out, "--format", "json", "--dt", "0.5", "--horizon", "5", "--out", "table.json"]) == EXIT_OK
    recs = json.loads((tmp_path / "table.json").read_text())
    assert len(recs) == 11 and set(recs[0]) == {"k", "t", "m", "r", "I_R"}
    assert main(["report", "--out-dir", out, "--criteria", "9", "--format", "csv", "--out", "report.csv"]) == EXIT_OK
    rows = list(csv.reader(open(tmp_path / "report.csv")))
    assert rows[0] == ["name", "measured", "target", "tol", "pass", "seconds"]
    assert rows[1][0] == "09_beta_offspring_law" and rows[1][4] == "True"
    assert main(["simulate", "--out-dir", out, "--format", "json", "--horizon", "5", "--out", "counts.json"]) == EXIT_OK
    assert json.loads((tmp_path / "counts.json").read_text())[0].keys() == {"replica", "t", "N"}
