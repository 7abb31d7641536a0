from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Report:
    """Outcome of one verification run.

    ``passed`` is None when the result is indeterminate (e.g. truncated data).
    ``failures`` lists offending items verbatim; ``notes`` holds findings that
    are recorded but never fail the run.
    """

    check: str
    passed: bool | None
    params: dict[str, Any] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)
    failures: list[Any] = field(default_factory=list)
    notes: list[Any] = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.passed)

    @property
    def verdict(self) -> str:
        if self.passed is None:
            return "indeterminate"
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "verdict": self.verdict,
            "params": self.params,
            "details": self.details,
            "failures": self.failures,
            "notes": self.notes,
        }
