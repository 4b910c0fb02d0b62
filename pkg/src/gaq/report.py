"""Check records and reports shared by verification routines and the CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import sympy as sp

REPORT_SCHEMA = "gaq-report/1"


@dataclass
class CheckRecord:
    """Outcome of one named check.

    ``witness`` holds a counterexample (or other evidence) when relevant;
    ``data`` holds exact results worth printing.
    """

    name: str
    passed: bool
    detail: str = ""
    witness: dict | None = None
    data: dict = field(default_factory=dict)
    seconds: float | None = None

    def to_dict(self, timings: bool = True) -> dict:
        out = {"name": self.name, "status": "pass" if self.passed else "fail"}
        if self.detail:
            out["detail"] = self.detail
        if self.witness is not None:
            out["witness"] = jsonable(self.witness)
        if self.data:
            out["data"] = jsonable(self.data)
        if timings and self.seconds is not None:
            out["seconds"] = round(self.seconds, 6)
        return out


@dataclass
class Report:
    """Ordered collection of check records."""

    checks: list[CheckRecord] = field(default_factory=list)

    def add(self, record: CheckRecord) -> CheckRecord:
        self.checks.append(record)
        return record

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __iter__(self):
        return iter(self.checks)

    def failures(self) -> list[CheckRecord]:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            lines.append(f"[{mark}] {c.name}" + (f": {c.detail}" if c.detail else ""))
        return "\n".join(lines)


def jsonable(obj: Any) -> Any:
    """Convert exact symbolic values to canonical text for JSON output."""
    from .symexpr import to_text

    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, complex):
        return {"re": float(f"{obj.real:.12g}"), "im": float(f"{obj.imag:.12g}")}
    if isinstance(obj, sp.MatrixBase):
        return [[jsonable(obj[i, j]) for j in range(obj.cols)] for i in range(obj.rows)]
    if isinstance(obj, sp.Basic):
        try:
            return to_text(obj)
        except TypeError:
            return str(obj)
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return str(obj)


def dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)
