"""Ordered check reports with text and JSON renderings."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from .symbolic import Equivalence, EquivResult


class CheckStatus(enum.Enum):
    PASS = "PASS"
    LIKELY_PASS = "LIKELY_PASS"
    FAIL = "FAIL"


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    status: CheckStatus
    detail: str = ""
    payload: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status is not CheckStatus.FAIL

    def line(self) -> str:
        return f"CHECK {self.check_id} {self.status.value} {self.detail}".rstrip()

    def as_dict(self) -> dict:
        return {"id": self.check_id, "status": self.status.value, "detail": self.detail,
                "payload": self.payload}


def status_of(result: EquivResult) -> CheckStatus:
    return {Equivalence.EQUAL: CheckStatus.PASS,
            Equivalence.LIKELY_EQUAL: CheckStatus.LIKELY_PASS,
            Equivalence.UNEQUAL: CheckStatus.FAIL}[result.status]


def from_equiv(check_id: str, result: EquivResult, detail: str = "", **payload) -> CheckResult:
    """Wrap an equivalence verdict; numeric-only agreement stays LIKELY_PASS."""
    payload = dict(payload, equivalence=result.status.value)
    if result.status is Equivalence.UNEQUAL and result.witness:
        payload["witness"] = {k: result.witness[k] for k in sorted(result.witness)}
        payload["lhs"] = result.lhs_value
        payload["rhs"] = result.rhs_value
    text = f"{detail} [{result.status.value}]".strip()
    return CheckResult(check_id, status_of(result), text, payload)


def combine(check_id: str, parts: list[CheckResult], detail: str = "") -> CheckResult:
    """Worst status wins; sub-results go into the payload."""
    if any(p.status is CheckStatus.FAIL for p in parts):
        status = CheckStatus.FAIL
    elif any(p.status is CheckStatus.LIKELY_PASS for p in parts):
        status = CheckStatus.LIKELY_PASS
    else:
        status = CheckStatus.PASS
    failed = [p.check_id for p in parts if p.status is CheckStatus.FAIL]
    if failed:
        detail = f"{detail} failed: {', '.join(failed)}".strip()
    return CheckResult(check_id, status, detail,
                       {"parts": [p.as_dict() for p in parts]})


class Report:
    """Checks in insertion order; overall PASS iff nothing failed."""

    def __init__(self) -> None:
        self.checks: list[CheckResult] = []

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    def extend(self, checks) -> None:
        for c in checks:
            self.add(c)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def overall(self) -> CheckStatus:
        return CheckStatus.PASS if self.ok else CheckStatus.FAIL

    def __getitem__(self, check_id: str) -> CheckResult:
        for c in self.checks:
            if c.check_id == check_id:
                return c
        raise KeyError(check_id)

    def to_text(self) -> str:
        lines = [c.line() for c in self.checks]
        lines.append(f"OVERALL {self.overall.value}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {"checks": [c.as_dict() for c in self.checks], "overall": self.overall.value}
        return json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
