"""Experiment reports: named checks with exact quantities, rendered canonically.

The JSON and CSV renderings are byte-stable for identical inputs and seeds:
they contain no timing and no environment data, and all maps are emitted in
sorted key order. Wall-clock durations are surfaced separately (console and
markdown summary only).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Check:
    """One verified statement; `detail` names the quantities being compared."""

    name: str
    passed: bool
    detail: str


@dataclass
class ExperimentReport:
    experiment: str
    parameters: dict[str, str] = field(default_factory=dict)
    quantities: dict[str, str] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add_check(self, name: str, passed: bool, detail: str) -> None:
        self.checks.append(Check(name, bool(passed), detail))

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "experiment": self.experiment,
            "parameters": {k: str(v) for k, v in sorted(self.parameters.items())},
            "quantities": {k: str(v) for k, v in sorted(self.quantities.items())},
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks
            ],
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    def to_csv(self) -> str:
        lines = ["experiment,check,passed,detail"]
        for c in self.checks:
            detail = c.detail.replace('"', '""')
            lines.append(f'{self.experiment},{c.name},{int(c.passed)},"{detail}"')
        return "\n".join(lines) + "\n"

    def to_markdown(self, duration_seconds: float | None = None) -> str:
        out = [f"# {self.experiment}", ""]
        if self.parameters:
            out.append("parameters: " + ", ".join(f"{k}={v}" for k, v in sorted(self.parameters.items())))
        if self.quantities:
            out.append("")
            out.append("| quantity | value |")
            out.append("|---|---|")
            out.extend(f"| {k} | {v} |" for k, v in sorted(self.quantities.items()))
        out.append("")
        out.append("| check | verdict | detail |")
        out.append("|---|---|---|")
        for c in self.checks:
            out.append(f"| {c.name} | {'PASS' if c.passed else 'FAIL'} | {c.detail} |")
        out.append("")
        out.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        if duration_seconds is not None:
            out.append(f"wall clock: {duration_seconds:.2f}s")
        return "\n".join(out) + "\n"
