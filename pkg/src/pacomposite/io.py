"""Reading indicator tables and writing report files.

The text layouts follow the reference R workflow: a results table with one
row per composite kind and indicator (3 decimals), the indicator
inter-correlation matrix (3 decimals) and a two-column score file
(4 decimals).  File names embed ``p`` and ``n``.  Every writer has a JSON
variant that keeps full precision.
"""

from __future__ import annotations

import json
import re
import shlex
from pathlib import Path

import numpy as np

from . import __version__
from .core import CompositeKind, CompositeResult, CorrelationMatrix
from .errors import EmptyFile, ParseError, RaggedRows
from .population import SWEEP_COLUMNS, SweepResult
from .riskbudget import BUDGET_COLUMNS, BudgetReport

_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")

RESULT_COLUMNS = ("Composite", "cor. with comp.", "var. within comp.", "relative var. within comp.")
SCORE_COLUMNS = ("Analytic comp.", "Purely analytic comp.")
RESULT_WIDTH = 22
CORRELATION_WIDTH = 9
SCORE_WIDTH = 10


def read_indicators(path, delimiter: str = ",", has_header: bool = False) -> np.ndarray:
    """Parse a delimited numeric table (rows are cases, columns indicators).

    Fields are whitespace-trimmed and must be plain decimal numbers with a
    point as decimal mark.  Blank lines are skipped.

    Raises
    ------
    EmptyFile, RaggedRows, ParseError
    """
    rows = []
    width = None
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    seen_header = not has_header
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if not seen_header:
            seen_header = True
            continue
        fields = [f.strip() for f in line.split(delimiter)]
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise RaggedRows(lineno, width, len(fields))
        row = []
        for col, text in enumerate(fields, start=1):
            if not _NUMBER.match(text):
                raise ParseError(lineno, col, text)
            row.append(float(text))
        rows.append(row)
    if not rows:
        raise EmptyFile(f"{path}: no data rows")
    return np.array(rows, dtype=float)


def _fmt(x: float, digits: int) -> str:
    s = f"{x:.{digits}f}"
    if float(s) == 0.0:
        s = f"{0.0:.{digits}f}"  # no "-0.000"
    return s


def _fwf_line(fields, width: int) -> str:
    return " ".join(str(f).ljust(width) for f in fields).rstrip()


def report_paths(output_dir, p: int, n: int, json_mode: bool = False) -> dict[str, Path]:
    ext = "json" if json_mode else "txt"
    stem = f"purely_analytic_composites_p={p}_n={n}"
    out = Path(output_dir)
    return {
        "results": out / f"{stem}_results.{ext}",
        "correlations": out / f"{stem}_indicator_inter-correlations.{ext}",
        "scores": out / f"{stem}_composite_scores.{ext}",
    }


def _metadata_lines(meta: dict) -> list[str]:
    return [f"# {key}: {value}" for key, value in meta.items()]


def _dump_json(path: Path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_reports(
    results: tuple[CompositeResult, CompositeResult],
    r: CorrelationMatrix,
    output_dir,
    json_mode: bool = False,
    report_digits: int = 3,
    score_digits: int = 4,
    metadata: dict | None = None,
) -> dict[str, Path]:
    """Write the results table, correlation matrix and score file.

    ``results`` holds the analytic and the purely analytic composite for
    the same data; both must carry scores.
    """
    analytic, purely = results
    n = analytic.scores.size
    p = analytic.p
    paths = report_paths(output_dir, p, n, json_mode)
    Path(output_dir).mkdir(parents=True, exist_ok=True)
    meta = {"version": f"pacomposite {__version__}", "regularized": str(purely.regularized).lower()}
    meta.update(metadata or {})

    if json_mode:
        _dump_json(paths["results"], {
            "metadata": meta,
            "n": n,
            "p": p,
            "composites": [
                {
                    "kind": res.kind.value,
                    "label": res.kind.label,
                    "regularized": res.regularized,
                    "effective_weights": res.effective_weights.tolist(),
                    "indicator_correlations": res.indicator_correlations.tolist(),
                    "variance_contributions": res.variance_contributions.tolist(),
                    "relative_contributions": res.relative_contributions.tolist(),
                }
                for res in (analytic, purely)
            ],
        })
        _dump_json(paths["correlations"], {"matrix": r.values.tolist()})
        _dump_json(paths["scores"], {
            "columns": list(SCORE_COLUMNS),
            "scores": np.column_stack([analytic.scores, purely.scores]).tolist(),
        })
        return paths

    lines = _metadata_lines(meta)
    lines.append(f"Compare analytic composites with purely analytic composites for n = {n} and p = {p}:")
    lines.append(_fwf_line(RESULT_COLUMNS, RESULT_WIDTH))
    for res in (analytic, purely):
        for row in zip(res.indicator_correlations, res.variance_contributions, res.relative_contributions):
            lines.append(_fwf_line([res.kind.label] + [_fmt(v, report_digits) for v in row], RESULT_WIDTH))
    paths["results"].write_text("\n".join(lines) + "\n", encoding="utf-8")

    lines = [_fwf_line([_fmt(v, report_digits) for v in row], CORRELATION_WIDTH) for row in r.values]
    paths["correlations"].write_text("\n".join(lines) + "\n", encoding="utf-8")

    header = [f'"{name}"' for name in SCORE_COLUMNS]
    widths = [max(SCORE_WIDTH, len(h)) for h in header]
    lines = [" ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    for a, b in zip(analytic.scores, purely.scores):
        cells = [_fmt(a, score_digits), _fmt(b, score_digits)]
        lines.append(" ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip())
    paths["scores"].write_text("\n".join(lines) + "\n", encoding="utf-8")
    return paths


def read_results_table(path) -> list[tuple[str, float, float, float]]:
    """Parse a text results table back into ``(label, cor, var, relative)`` rows."""
    rows = []
    step = RESULT_WIDTH + 1
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#") or line.startswith("Compare") or line.startswith(RESULT_COLUMNS[0]):
            continue
        if not line.strip():
            continue
        cells = [line[i:i + step].strip() for i in range(0, step * 4, step)]
        rows.append((cells[0], float(cells[1]), float(cells[2]), float(cells[3])))
    return rows


def read_scores(path) -> tuple[list[str], np.ndarray]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = shlex.split(lines[0])
    values = np.array([[float(v) for v in line.split()] for line in lines[1:] if line.strip()])
    return header, values


def read_correlations(path) -> np.ndarray:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return np.array([[float(v) for v in line.split()] for line in lines if line.strip()])


def _delimited(path: Path, columns, rows, meta: dict, delimiter: str = ","):
    lines = _metadata_lines(meta)
    lines.append(delimiter.join(columns))
    for row in rows:
        lines.append(delimiter.join(repr(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_sweep(sweep: SweepResult, path, json_mode: bool = False, metadata: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = {"version": f"pacomposite {__version__}"}
    meta.update(sweep.metadata)
    meta.update(metadata or {})
    if json_mode:
        _dump_json(path, {
            "metadata": meta,
            "columns": list(SWEEP_COLUMNS),
            "rows": [list(row) for row in sweep.rows()],
        })
    else:
        _delimited(path, SWEEP_COLUMNS, sweep.rows(), meta)
    return path


def read_delimited_table(path, delimiter: str = ","):
    """Read a ``#``-headed table written by this module: ``(metadata, columns, rows)``."""
    meta, columns, rows = {}, None, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta[key] = value
        elif columns is None:
            columns = line.split(delimiter)
        elif line:
            rows.append(line.split(delimiter))
    return meta, columns, rows


def write_budget(report: BudgetReport, path, json_mode: bool = False, metadata: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = {
        "version": f"pacomposite {__version__}",
        "estimation_window": report.estimation_window,
        "holdout_size": report.holdout_size,
        "evaluated_on": report.evaluated_on,
        "regularized": str(report.regularized).lower(),
        "max_abs_relative_gap": repr(report.max_abs_relative_gap),
        "in_sample_gap": repr(report.in_sample_gap),
    }
    meta.update(metadata or {})
    if json_mode:
        _dump_json(path, {
            "metadata": meta,
            "columns": list(BUDGET_COLUMNS),
            "rows": [list(row) for row in report.rows()],
        })
    else:
        _delimited(path, BUDGET_COLUMNS, report.rows(), meta)
    return path


def composite_kind_from_label(label: str) -> CompositeKind:
    for kind in CompositeKind:
        if kind.label == label:
            return kind
    raise KeyError(label)
