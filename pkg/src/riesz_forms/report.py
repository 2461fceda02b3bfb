"""Uniform pass/fail records returned by every verification routine."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict

PASS = "pass"
FAIL = "fail"
INAPPLICABLE = "inapplicable"
STATUSES = (PASS, FAIL, INAPPLICABLE)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one verification case.

    ``difference`` holds the exact defect (an expression object) when a check
    fails; ``detail`` is a short human-readable string suitable for reports.
    """

    name: str
    status: str
    params: Dict[str, Any] = field(default_factory=dict)
    detail: str = ""
    difference: Any = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def __bool__(self):
        return self.status != FAIL


def outcome(name: str, ok: bool, params=None, detail: str = "", difference=None) -> CheckResult:
    return CheckResult(name, PASS if ok else FAIL, dict(params or {}), detail, difference)


def combine(name: str, results, params=None) -> CheckResult:
    """Fold several sub-results: fail if any fails, inapplicable if all are."""
    results = list(results)
    failed = [r for r in results if r.failed]
    if failed:
        first = failed[0]
        return CheckResult(name, FAIL, dict(params or {}),
                           f"{len(failed)}/{len(results)} failed; first: {first.name}: {first.detail}",
                           first.difference)
    if results and all(r.status == INAPPLICABLE for r in results):
        return CheckResult(name, INAPPLICABLE, dict(params or {}), results[0].detail)
    return CheckResult(name, PASS, dict(params or {}), f"{len(results)} checks passed")
