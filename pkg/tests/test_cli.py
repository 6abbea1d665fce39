import json
from pathlib import Path

import numpy as np
import pytest

from pacomposite import io
from pacomposite.cli import main

DATA = Path(__file__).parent / "data"
INPUT = str(DATA / "indicators_p5_n100.txt")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_happy_path(tmp_path, capsys):
    code, out, err = run(capsys, "analyze", "--input", INPUT, "--targets", "1,1,1,2,2", "--output-dir", str(tmp_path))
    assert code == 0 and err == ""
    written = sorted(p.name for p in tmp_path.iterdir())
    assert written == sorted(p.name for p in io.report_paths(tmp_path, 5, 100).values())
    assert len(out.splitlines()) == 3


def test_analyze_without_input(capsys):
    code, _, err = run(capsys, "analyze")
    assert code == 2
    assert err.count("\n") == 1 and err.startswith("error: UsageError:")


def test_no_subcommand(capsys):
    assert run(capsys)[0] == 2


def test_target_count_mismatch(tmp_path, capsys):
    code, _, err = run(capsys, "analyze", "--input", INPUT, "--targets", "1,2", "--output-dir", str(tmp_path))
    assert code == 2


def test_data_error_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("1,2\n3,oops\n")
    code, _, err = run(capsys, "analyze", "--input", str(bad), "--output-dir", str(tmp_path))
    assert code == 1
    assert err == "error: ParseError: line 2, column 2: cannot parse 'oops'\n"


def test_negative_target_exit_1(tmp_path, capsys):
    code, _, err = run(capsys, "analyze", "--input", INPUT, "--targets", "1,1,1,-2,2", "--output-dir", str(tmp_path))
    assert code == 1 and err.startswith("error: InvalidWeights:")


def test_missing_file_exit_1(tmp_path, capsys):
    code, _, err = run(capsys, "analyze", "--input", str(tmp_path / "nope.txt"))
    assert code == 1 and err.startswith("error: FileNotFoundError:")


def test_simulate_row_count(tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", "--p", "5", "--grid", "0.01:0.23:6", "--seed", "7", "--output-dir", str(tmp_path))
    assert code == 0
    meta, columns, rows = io.read_delimited_table(out.strip())
    assert len(rows) == 6 * 2 * 2 * 5
    assert meta["seed"] == "7" and meta["mean_rho"] == "0.3" and meta["generator"] == "numpy.random.PCG64"
    purely = [r for r in rows if r[5] == "PurelyAnalytic" and r[6] == "weighted"]
    assert sorted({round(float(r[10]), 8) for r in purely}) == [1.0, 4.0]


def test_simulate_needs_weights_for_other_p(tmp_path, capsys):
    assert run(capsys, "simulate", "--p", "4", "--output-dir", str(tmp_path))[0] == 2
    assert run(capsys, "simulate", "--p", "4", "--targets", "unit", "--output-dir", str(tmp_path))[0] == 0


def test_simulate_bad_grid(capsys):
    assert run(capsys, "simulate", "--grid", "0.1-0.2")[0] == 2


def test_deterministic_outputs(tmp_path, capsys):
    for sub in ("a", "b"):
        assert run(capsys, "simulate", "--seed", "3", "--output-dir", str(tmp_path / sub))[0] == 0
        assert run(capsys, "analyze", "--input", INPUT, "--output-dir", str(tmp_path / sub))[0] == 0
    for path in (tmp_path / "a").iterdir():
        assert path.read_bytes() == (tmp_path / "b" / path.name).read_bytes()


def test_json_mode(tmp_path, capsys):
    code, out, _ = run(capsys, "analyze", "--input", INPUT, "--json", "--output-dir", str(tmp_path))
    assert code == 0
    for line in out.splitlines():
        assert line.endswith(".json")
        json.loads(Path(line).read_text())
    code, out, _ = run(capsys, "simulate", "--json", "--output-dir", str(tmp_path))
    payload = json.loads(Path(out.strip()).read_text())
    assert len(payload["rows"]) == 120


def test_column_order_preserved(tmp_path, capsys):
    x = io.read_indicators(INPUT)
    flipped = tmp_path / "flipped.txt"
    np.savetxt(flipped, x[:, ::-1], delimiter=",", fmt="%.6f")
    run(capsys, "analyze", "--input", INPUT, "--targets", "1,2,3,4,5", "--json", "--output-dir", str(tmp_path / "a"))
    run(capsys, "analyze", "--input", str(flipped), "--targets", "5,4,3,2,1", "--json", "--output-dir", str(tmp_path / "b"))
    name = "purely_analytic_composites_p=5_n=100_results.json"
    a = json.loads((tmp_path / "a" / name).read_text())["composites"]
    b = json.loads((tmp_path / "b" / name).read_text())["composites"]
    for ca, cb in zip(a, b):
        np.testing.assert_allclose(ca["indicator_correlations"], cb["indicator_correlations"][::-1], atol=1e-12)


def test_riskbudget(tmp_path, capsys):
    holdout = tmp_path / "holdout.txt"
    holdout.write_text(Path(INPUT).read_text())
    code, out, _ = run(
        capsys, "riskbudget", "--input", INPUT, "--targets", "1,1,2,2,4", "--labels", "a,b,c,d,e",
        "--window", "80", "--holdout", str(holdout), "--output-dir", str(tmp_path),
    )
    assert code == 0
    meta, columns, rows = io.read_delimited_table(out.strip())
    assert tuple(columns) == io.BUDGET_COLUMNS
    assert [r[0] for r in rows] == list("abcde")
    assert meta["estimation_window"] == "80" and meta["holdout_size"] == "100"
    assert meta["evaluated_on"] == "holdout" and meta["regularized"] == "false"
    assert float(meta["in_sample_gap"]) < 1e-8


def test_riskbudget_label_mismatch(tmp_path, capsys):
    assert run(capsys, "riskbudget", "--input", INPUT, "--labels", "a,b", "--output-dir", str(tmp_path))[0] == 2


def test_riskbudget_window_too_short(tmp_path, capsys):
    code, _, err = run(capsys, "riskbudget", "--input", INPUT, "--window", "3", "--output-dir", str(tmp_path))
    assert code == 1 and err.startswith("error: WindowTooShort:")


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "pacomposite", "analyze", "--input", INPUT, "--output-dir", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
