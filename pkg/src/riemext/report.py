"""Verification reports shared by the extension and flow suites."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

from .expr import Verdict, ZeroVerdict

SCHEMA_VERSION = 1

PASS, FAIL, UNKNOWN = "pass", "fail", "unknown"
SKIPPED = "skipped"          # precondition not met; not a failure
DISCREPANCY = "discrepancy"  # documented mismatch with a printed reference value; informational
INFO = "info"

FAILING = frozenset({FAIL, UNKNOWN})

_STATUS = {Verdict.ZERO: PASS, Verdict.NONZERO: FAIL, Verdict.UNKNOWN: UNKNOWN}


@dataclass
class Check:
    name: str
    identity: str
    status: str
    witness: Optional[dict] = None
    detail: Optional[str] = None
    data: dict = field(default_factory=dict)

    @classmethod
    def from_verdict(cls, name: str, identity: str, verdict: ZeroVerdict, detail: Optional[str] = None) -> "Check":
        return cls(name, identity, _STATUS[verdict.verdict], verdict.witness_json(), detail)

    @property
    def failed(self) -> bool:
        return self.status in FAILING

    def to_json(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "identity": self.identity, "status": self.status,
                               "witness": self.witness}
        if self.detail:
            out["detail"] = self.detail
        if self.data:
            out["data"] = self.data
        return out


@dataclass
class Report:
    suite: str
    convention: str
    checks: list = field(default_factory=list)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)

    @property
    def ok(self) -> bool:
        return not any(c.failed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self) -> list:
        return [c.name for c in self.checks]

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "suite": self.suite,
            "convention": self.convention,
            "ok": self.ok,
            "checks": [c.to_json() for c in self.checks],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False)

    def text(self) -> str:
        lines = [f"suite {self.suite} (convention: {self.convention})"]
        for c in self.checks:
            line = f"  [{c.status:>11}] {c.name}: {c.identity}"
            if c.detail:
                line += f"  -- {c.detail}"
            lines.append(line)
        lines.append("  result: " + ("PASS" if self.ok else "FAIL"))
        return "\n".join(lines)
