"""Reports: the full JSON record and a flat per-level CSV."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["SCHEMA_VERSION", "Report", "report_emit", "read_csv_aggregates", "to_json_text", "clean"]

SCHEMA_VERSION = 1
CSV_FIELDS = ("experiment", "level", "max_ratio", "count", "skipped")


def clean(value):
    """JSON-safe copy: numpy scalars become Python numbers, non-finite floats strings."""
    if isinstance(value, dict):
        return {str(k): clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _unclean(value):
    if value in ("inf", "-inf", "nan"):
        return float(value)
    return value


@dataclass
class Report:
    experiment: str
    claim: str
    config: dict
    provenance: dict
    records: list = field(default_factory=list)
    aggregates: list = field(default_factory=list)
    groups: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        """``pass``, ``fail`` or ``skip`` (nothing was assertable)."""
        if any(not a["passed"] for a in self.assertions):
            return "fail"
        if not self.assertions and self.records:
            return "skip"
        return "pass"

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "fail": 2, "skip": 3}[self.status]

    def to_dict(self) -> dict:
        return clean(
            {
                "schema_version": SCHEMA_VERSION,
                "experiment": self.experiment,
                "claim": self.claim,
                "config": self.config,
                "provenance": self.provenance,
                "records": self.records,
                "aggregates": self.aggregates,
                "groups": self.groups,
                "assertions": self.assertions,
                "extra": self.extra,
                "status": self.status,
            }
        )


def to_json_text(report: Report) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=1) + "\n"


def to_csv_text(report: Report) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in clean(report.aggregates):
        w.writerow({k: (repr(row[k]) if isinstance(row[k], float) else row[k]) for k in CSV_FIELDS})
    return buf.getvalue()


def report_emit(report: Report, path: str | Path, fmt: str = "json") -> Path:
    if fmt not in ("json", "csv"):
        raise ValueError("format must be json or csv")
    path = Path(path)
    text = to_json_text(report) if fmt == "json" else to_csv_text(report)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def read_csv_aggregates(path: str | Path) -> list[dict]:
    """Aggregate rows back from a CSV report, typed like the JSON ones."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        out.append(
            {
                "experiment": r["experiment"],
                "level": int(r["level"]),
                "max_ratio": _unclean(r["max_ratio"]) if r["max_ratio"] in ("inf", "-inf", "nan") else float(r["max_ratio"]),
                "count": int(r["count"]),
                "skipped": int(r["skipped"]),
            }
        )
    return out
