import json
from pathlib import Path

import numpy as np
import pytest

from pacomposite import io
from pacomposite.core import WeightSpec, compare_composites, sample_correlation, standardize
from pacomposite.errors import EmptyFile, ParseError, RaggedRows
from pacomposite.population import PopulationSpec, default_grid, make_heterogeneous_R, mvn_sample, run_sweep

DATA = Path(__file__).parent / "data"


def write(tmp_path, text, name="in.txt"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_read_simple(tmp_path):
    x = io.read_indicators(write(tmp_path, "1,2\n3,4\n5,6"))
    np.testing.assert_array_equal(x, [[1, 2], [3, 4], [5, 6]])


def test_read_trims_and_skips_blank(tmp_path):
    x = io.read_indicators(write(tmp_path, " 1 , -2.5e1\n\n.5,+3.\n"))
    np.testing.assert_array_equal(x, [[1, -25], [0.5, 3]])


def test_read_header_and_delimiter(tmp_path):
    x = io.read_indicators(write(tmp_path, "a;b\n1;2\n3;4\n"), delimiter=";", has_header=True)
    np.testing.assert_array_equal(x, [[1, 2], [3, 4]])


def test_read_ragged(tmp_path):
    with pytest.raises(RaggedRows) as info:
        io.read_indicators(write(tmp_path, "1,2\n3"))
    assert info.value.line == 2


@pytest.mark.parametrize("text,line,col", [
    ("1,2\n3,x\n", 2, 2),
    ("1,2\n3,NaN\n", 2, 2),
    ('"1",2\n3,4\n', 1, 1),
    ("1,2\n1 000,4\n", 2, 1),
    ("1,2\n3,4,5e\n", 2, 2),
])
def test_read_parse_error(tmp_path, text, line, col):
    with pytest.raises((ParseError, RaggedRows)) as info:
        io.read_indicators(write(tmp_path, text))
    if isinstance(info.value, ParseError):
        assert (info.value.line, info.value.column) == (line, col)


def test_read_decimal_comma_rejected(tmp_path):
    with pytest.raises(ParseError):
        io.read_indicators(write(tmp_path, "1;2,5\n3;4\n"), delimiter=";")


def test_read_empty(tmp_path):
    with pytest.raises(EmptyFile):
        io.read_indicators(write(tmp_path, "\n\n"))
    with pytest.raises(EmptyFile):
        io.read_indicators(write(tmp_path, "a,b\n"), has_header=True)


def test_read_reference_shape():
    assert io.read_indicators(DATA / "indicators_p5_n100.txt").shape == (100, 5)


def _analysis(x, spec):
    z = standardize(x)
    r = sample_correlation(z)
    return compare_composites(z, r, spec), r


def test_identity_case_rows_match(tmp_path):
    x = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
    results, r = _analysis(x, WeightSpec([1, 3]))
    paths = io.write_reports(results, r, tmp_path)
    rows = io.read_results_table(paths["results"])
    assert [row[0] for row in rows] == ["Analytic comp."] * 2 + ["Purely analytic comp."] * 2
    assert rows[:2] == [(label.replace("Purely analytic", "Analytic"), *rest) for label, *rest in rows[2:]]


def test_report_file_names(tmp_path):
    paths = io.report_paths(tmp_path, 5, 100)
    assert paths["results"].name == "purely_analytic_composites_p=5_n=100_results.txt"
    assert paths["correlations"].name == "purely_analytic_composites_p=5_n=100_indicator_inter-correlations.txt"
    assert paths["scores"].name == "purely_analytic_composites_p=5_n=100_composite_scores.txt"


def test_figure_weights_rows(tmp_path):
    r = make_heterogeneous_R(PopulationSpec(p=5, target_sd_rho=0.23, seed=1))
    results, rr = _analysis(mvn_sample(r, 500, seed=2), WeightSpec.from_weights([1, 1, 1, 2, 2]))
    rows = io.read_results_table(io.write_reports(results, rr, tmp_path)["results"])
    assert [row[3] for row in rows[5:]] == [1.0, 1.0, 1.0, 4.0, 4.0]


def test_scores_round_trip(tmp_path):
    x = io.read_indicators(DATA / "indicators_p5_n100.txt")
    results, r = _analysis(x, WeightSpec([1, 1, 1, 2, 2]))
    header, scores = io.read_scores(io.write_reports(results, r, tmp_path)["scores"])
    assert header == ["Analytic comp.", "Purely analytic comp."]
    z = standardize(x)
    for col, res in enumerate(results):
        # scores carry 4 decimals, so the correlations drift by well under 5e-4
        recomputed = [np.corrcoef(z[:, j], scores[:, col])[0, 1] for j in range(5)]
        np.testing.assert_allclose(recomputed, res.indicator_correlations, atol=5e-4)


def test_correlation_file(tmp_path):
    x = io.read_indicators(DATA / "indicators_p5_n100.txt")
    results, r = _analysis(x, WeightSpec.unit(5))
    back = io.read_correlations(io.write_reports(results, r, tmp_path)["correlations"])
    np.testing.assert_allclose(back, np.round(np.corrcoef(x, rowvar=False), 3), atol=1e-12)


def test_json_full_precision(tmp_path):
    x = io.read_indicators(DATA / "indicators_p5_n100.txt")
    results, r = _analysis(x, WeightSpec([1, 1, 1, 2, 2]))
    paths = io.write_reports(results, r, tmp_path, json_mode=True)
    payload = json.loads(paths["results"].read_text())
    for entry, res in zip(payload["composites"], results):
        assert entry["kind"] == res.kind.value
        assert np.array_equal(entry["indicator_correlations"], res.indicator_correlations)
        assert np.array_equal(entry["relative_contributions"], res.relative_contributions)
    scores = np.array(json.loads(paths["scores"].read_text())["scores"])
    assert np.array_equal(scores[:, 1], results[1].scores)
    assert np.array_equal(json.loads(paths["correlations"].read_text())["matrix"], r.values)


def test_negative_zero_formatting():
    assert io._fmt(-0.00001, 3) == "0.000"
    assert io._fmt(-0.0015, 3) in ("-0.001", "-0.002")


def test_sweep_table(tmp_path):
    sweep = run_sweep(default_grid(), WeightSpec.from_weights([1, 1, 1, 2, 2]))
    path = io.write_sweep(sweep, tmp_path / "sweep.csv", metadata={"seed": 7})
    meta, columns, rows = io.read_delimited_table(path)
    assert tuple(columns) == io.SWEEP_COLUMNS
    assert len(rows) == 120
    assert meta["generator"] == "numpy.random.PCG64"
    assert meta["seed"] == "7"
    assert [float(v) for v in rows[0][8:]] == list(next(sweep.rows()))[8:]
