"""
akhiezer/report.py
──────────────────
Pydantic v2 models for the verification report written by ``verify`` and
``compare``. The JSON schema in docs/report_schema.md is generated from
these models by ``report_json_schema``.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, computed_field

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"


# ══════════════════════════════════════════════════════════════════════════════
# Record: one checked identity
# ══════════════════════════════════════════════════════════════════════════════

class CheckRecord(BaseModel):
    """
    One identity evaluated once.
    Key: check_id (unique within a report)
    """
    check_id: str                        # e.g. "opoly.wronskian.n3"
    reference: str                       # identity checked, e.g. "P_{n-1}Q_n - P_nQ_{n-1} = h_{n-1}"
    residual: Optional[float] = None     # None when skipped or when the check raised
    tolerance: float
    passed: bool
    skipped: bool = False                # e.g. surface checks at genus 0
    runtime_s: float = 0.0
    detail: Dict[str, Any] = Field(default_factory=dict)


# ══════════════════════════════════════════════════════════════════════════════
# Report
# ══════════════════════════════════════════════════════════════════════════════

class ReportSummary(BaseModel):
    total: int
    passed: int
    failed: int
    skipped: int


class Report(BaseModel):
    """
    Verification report.
    ``config`` echoes the effective run configuration.
    """
    schema_version: str = SCHEMA_VERSION
    command: str                         # "verify" | "compare"
    genus: int
    config: Dict[str, Any]
    records: List[CheckRecord] = Field(default_factory=list)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def summary(self) -> ReportSummary:
        failed = sum(not r.passed for r in self.records)
        skipped = sum(r.skipped for r in self.records)
        return ReportSummary(
            total=len(self.records),
            passed=len(self.records) - failed,
            failed=failed,
            skipped=skipped,
        )

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> List[CheckRecord]:
        return [r for r in self.records if not r.passed]


def write_report(report: Report, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info("Report written to %s (%d records, passed=%s)", path, len(report.records), report.passed)
    return path


def report_json_schema() -> str:
    """JSON schema of ``Report`` (serialization mode, so computed fields are included)."""
    return json.dumps(Report.model_json_schema(mode="serialization"), indent=2, sort_keys=True)


SCHEMA_DOC_HEADER = """# Verification report schema

Written by `verify` and `compare` as `<command>_report.json` in the output
directory. `summary` and `passed` are computed from `records`.

| field | type | meaning |
|---|---|---|
| schema_version | string | currently "1" |
| command | string | "verify" or "compare" |
| genus | integer | g of the interval set |
| config | object | effective run configuration |
| records | array of CheckRecord | one entry per checked identity |
| summary | ReportSummary | total / passed / failed / skipped counts |
| passed | boolean | every record passed (skipped records count as passed) |

A CheckRecord carries `check_id`, `reference`, `residual` (null when skipped
or when the check raised), `tolerance`, `passed`, `skipped`, `runtime_s`
(0.0 when `record_timing` is false) and a free-form `detail` object. A check
that raised stores the exception under `detail.error`; a skipped one stores
its reason under `detail.reason`.

## JSON schema
"""


def write_schema_doc(path: Path) -> Path:
    """Render ``docs/report_schema.md`` from the models."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(f"{SCHEMA_DOC_HEADER}\n```json\n{report_json_schema()}\n```\n", encoding="utf-8")
    return path
