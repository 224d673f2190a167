"""Report rendering for the command-line front end.

JSON and CSV output is byte-stable for fixed inputs: no timestamps, fixed
key and column order. JSON floats use Python's shortest round-trip repr;
CSV floats use 17 significant digits. Both parse back to the same doubles.
"""

import csv
import io
import json
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

from .models import AUDIT_FLAG_KEY, AssumptionAudit, BatchResult, SweepRow, ViolationReport


class OutputFormat(StrEnum):
    """Output format selected with ``--format``."""

    TEXT = "text"
    JSON = "json"
    CSV = "csv"


BOUND_CSV_HEADER = ("n_runs", "angle_bound_rad", "angle_bound_deg")
WINDOW_CSV_HEADER = ("theta_ab", "max_runs_in_window")
SIMULATE_CSV_HEADER = (
    "model",
    "theta_a",
    "theta_b",
    "theta_ab",
    "n",
    "m",
    "c",
    "s",
    "c_exact",
    "s_exact",
)
GAMMA_CSV_HEADER = ("l", "theta_a", "theta_b", "m", "s")
REPORT_CSV_HEADER = (
    "n_runs",
    "n_experiments",
    "angle_window_upper",
    "exact_gamma_qm",
    "threshold",
    "margin",
    "expectation_verdict",
    "finite_sample_violation_probability",
    "out_of_window",
    "beyond_right_angle",
)
AUDIT_CSV_HEADER = (
    "model",
    "theta_a",
    "theta_b",
    "theta_ab",
    "n_runs",
    "trials",
    "zero_m_count",
    "zero_m_frequency",
    "expected_zero_m_frequency",
    AUDIT_FLAG_KEY,
)
SWEEP_CSV_HEADER = ("theta_ab", "c_exact", "c_emp", "s_exact", "s_emp")


def format_csv_value(value: object) -> str:
    """CSV cell text: 17 significant digits for floats, empty for None."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, list | tuple):
        return ";".join(format_csv_value(v) for v in value)
    return str(value)


def format_text_value(value: object) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list | tuple):
        return ", ".join(format_text_value(v) for v in value) or "none"
    return str(value)


@dataclass(frozen=True)
class Report:
    """A command result ready to render in any output format.

    ``summary`` holds scalar fields; ``rows`` holds optional per-item rows
    that JSON nests under ``rows_key``. CSV output is ``csv_header`` followed
    by ``csv_rows``.
    """

    summary: Mapping[str, Any]
    csv_header: tuple[str, ...]
    csv_rows: Sequence[Sequence[object]]
    rows: Sequence[Mapping[str, Any]] = field(default_factory=list)
    rows_key: str | None = None

    def render(self, fmt: OutputFormat) -> str:
        match fmt:
            case OutputFormat.JSON:
                return self._render_json()
            case OutputFormat.CSV:
                return self._render_csv()
            case OutputFormat.TEXT:
                return self._render_text()

    def _render_json(self) -> str:
        payload: dict[str, Any] = dict(self.summary)
        if self.rows_key is not None:
            payload[self.rows_key] = [dict(row) for row in self.rows]
        return json.dumps(payload, indent=2, allow_nan=False)

    def _render_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.csv_header)
        for row in self.csv_rows:
            if len(row) != len(self.csv_header):
                raise ValueError(f"CSV row has {len(row)} cells, header has {len(self.csv_header)}")
            writer.writerow([format_csv_value(v) for v in row])
        return buffer.getvalue().rstrip("\n")

    def _render_text(self) -> str:
        lines: list[str] = []
        if self.rows:
            columns = list(self.rows[0].keys())
            cells = [[format_text_value(row[c]) for c in columns] for row in self.rows]
            widths = [
                max(len(column), *(len(line[i]) for line in cells))
                for i, column in enumerate(columns)
            ]
            lines.append("  ".join(c.rjust(w) for c, w in zip(columns, widths, strict=True)))
            for line in cells:
                lines.append("  ".join(v.rjust(w) for v, w in zip(line, widths, strict=True)))
            lines.append("")
        width = max((len(key) for key in self.summary), default=0)
        for key, value in self.summary.items():
            lines.append(f"{key.ljust(width)}  {format_text_value(value)}")
        return "\n".join(lines)


def bound_report(n_runs: int, bound: float) -> Report:
    summary = {
        "n_runs": n_runs,
        "angle_bound_rad": bound,
        "angle_bound_deg": math.degrees(bound),
    }
    return Report(summary=summary, csv_header=BOUND_CSV_HEADER, csv_rows=[tuple(summary.values())])


def window_report(theta_ab: float, max_runs: int) -> Report:
    summary = {"theta_ab": theta_ab, "max_runs_in_window": max_runs}
    return Report(summary=summary, csv_header=WINDOW_CSV_HEADER, csv_rows=[tuple(summary.values())])


def simulate_report(
    model_label: str,
    theta_a: float,
    theta_b: float,
    theta_ab: float,
    n: int,
    m: int,
    c: float,
    s: float,
    c_exact: float | None,
    s_exact: float | None,
) -> Report:
    summary = {
        "model": model_label,
        "theta_a": theta_a,
        "theta_b": theta_b,
        "theta_ab": theta_ab,
        "n": n,
        "m": m,
        "c": c,
        "s": s,
        "c_exact": c_exact,
        "s_exact": s_exact,
    }
    return Report(summary=summary, csv_header=SIMULATE_CSV_HEADER, csv_rows=[tuple(summary.values())])


def gamma_report(
    model_label: str,
    seed: int,
    batch: BatchResult,
    violation_probability: float | None,
) -> Report:
    rows = [
        {
            "l": index + 1,
            "theta_a": experiment.theta_a,
            "theta_b": experiment.theta_b,
            "m": experiment.m,
            "s": experiment.s,
        }
        for index, experiment in enumerate(batch.experiments)
    ]
    summary: dict[str, Any] = {
        "model": model_label,
        "seed": seed,
        "n_runs": batch.n_runs,
        "n_experiments": batch.n_experiments,
        "total_same_sign": batch.total_same_sign,
        "gamma": batch.gamma,
        "threshold": batch.threshold,
        "margin": batch.margin,
        "verdict": batch.verdict.value,
    }
    if violation_probability is not None:
        summary["violation_probability"] = violation_probability

    csv_rows: list[tuple[object, ...]] = [tuple(row.values()) for row in rows]
    csv_rows.append(("total", None, None, batch.total_same_sign, batch.gamma))
    return Report(
        summary=summary,
        csv_header=GAMMA_CSV_HEADER,
        csv_rows=csv_rows,
        rows=rows,
        rows_key="experiments",
    )


def violation_report(report: ViolationReport) -> Report:
    # Flag indices are reported as 1-based experiment numbers
    summary = {
        "n_runs": report.n_runs,
        "n_experiments": report.n_experiments,
        "angle_window_upper": report.angle_window_upper,
        "exact_gamma_qm": report.exact_gamma_qm,
        "threshold": report.threshold,
        "margin": report.margin,
        "expectation_verdict": report.expectation_verdict.value,
        "finite_sample_violation_probability": report.finite_sample_violation_probability,
        "out_of_window": [i + 1 for i in report.out_of_window],
        "beyond_right_angle": [i + 1 for i in report.beyond_right_angle],
    }
    return Report(summary=summary, csv_header=REPORT_CSV_HEADER, csv_rows=[tuple(summary.values())])


def audit_report(audit: AssumptionAudit) -> Report:
    summary = {
        "model": audit.model.label,
        "theta_a": audit.theta_a,
        "theta_b": audit.theta_b,
        "theta_ab": audit.theta_ab,
        "n_runs": audit.n_runs,
        "trials": audit.trials,
        "zero_m_count": audit.zero_m_count,
        "zero_m_frequency": audit.zero_m_frequency,
        "expected_zero_m_frequency": audit.expected_zero_m_frequency,
        AUDIT_FLAG_KEY: audit.all_counts_positive,
    }
    return Report(summary=summary, csv_header=AUDIT_CSV_HEADER, csv_rows=[tuple(summary.values())])


def sweep_report(model_label: str, seed: int, n_runs: int, rows: Sequence[SweepRow]) -> Report:
    row_dicts = [row.model_dump() for row in rows]
    return Report(
        summary={"model": model_label, "seed": seed, "n_runs": n_runs, "steps": len(rows)},
        csv_header=SWEEP_CSV_HEADER,
        csv_rows=[tuple(row[c] for c in SWEEP_CSV_HEADER) for row in row_dicts],
        rows=row_dicts,
        rows_key="rows",
    )
