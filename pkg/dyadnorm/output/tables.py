"""CSV and JSON writers with the run configuration echoed as a header."""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

from dyadnorm.halfspace.estimate import Sample
from dyadnorm.norms.results import format_float, plain_value
from dyadnorm.profile.evaluate import ProfileRow
from dyadnorm.verify.report import ClaimReport

PROFILE_COLUMNS = ("lambda", "W", "lambda_p_W", "source")


def header_lines(header: Mapping[str, Any] | None) -> list[str]:
    """``# key=value`` lines in key order."""
    if not header:
        return []
    return [f"# {key}={_cell(header[key], 17)}" for key in sorted(header)]


def dumps_csv(
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    header: Mapping[str, Any] | None = None,
    digits: int = 17,
) -> str:
    buffer = io.StringIO()
    for line in header_lines(header):
        buffer.write(line + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v, digits) for v in row])
    return buffer.getvalue()


def profile_csv(
    rows: Sequence[ProfileRow], header: Mapping[str, Any] | None = None, digits: int = 17
) -> str:
    return dumps_csv(
        PROFILE_COLUMNS, ((r.lam, r.W, r.lam_p_W, r.source) for r in rows), header, digits
    )


def samples_csv(
    samples: Sequence[Sample], header: Mapping[str, Any] | None = None, digits: int = 17
) -> str:
    """One row per half-space sample: x_1 .. x_n, t, a."""
    n = len(samples[0][0]) if samples else 1
    columns = [f"x{i + 1}" for i in range(n)] + ["t", "a"]
    return dumps_csv(columns, ([*x, t, a] for x, t, a in samples), header, digits)


def trend_csv(
    report: ClaimReport, header: Mapping[str, Any] | None = None, digits: int = 17
) -> str:
    """The series of a report as a table; columns in order of first appearance."""
    columns: list[str] = []
    for row in report.series:
        columns.extend(key for key in row if key not in columns)
    rows = ([row.get(key, "") for key in columns] for row in report.series)
    return dumps_csv(columns, rows, header, digits)


def dumps_json(payload: Mapping[str, Any], header: Mapping[str, Any] | None = None, digits: int = 17) -> str:
    body: dict[str, Any] = {}
    if header:
        body["config"] = plain_value(dict(header), digits)
    body.update(plain_value(dict(payload), digits))
    return json.dumps(body, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def suite_json(
    reports: Sequence[ClaimReport], header: Mapping[str, Any] | None = None, digits: int = 17
) -> str:
    verdict = "consistent" if all(r.passed for r in reports) else "inconsistent"
    return dumps_json(
        {"reports": [r.record(digits) for r in reports], "verdict": verdict}, header, digits
    )


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def _cell(value: Any, digits: int) -> Any:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format_float(value, digits)
    if isinstance(value, list | tuple):
        return " ".join(str(_cell(v, digits)) for v in value)
    return value
