"""Claim and theorem verification reports."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, model_validator

from dyadnorm.norms.results import plain_value

Verdict = Literal["consistent", "inconsistent"]


class ClaimReport(BaseModel):
    """Computed series for one claim, the checks run on them and the verdict they imply."""

    claim: str
    params: dict[str, Any] = {}
    series: list[dict[str, Any]] = []
    checks: dict[str, bool] = {}
    measured: dict[str, float] = {}
    notes: list[str] = []
    verdict: Verdict = "consistent"

    @model_validator(mode="after")
    def derive_verdict(self) -> ClaimReport:
        self.verdict = "consistent" if all(self.checks.values()) else "inconsistent"
        return self

    @property
    def passed(self) -> bool:
        return self.verdict == "consistent"

    def failed_checks(self) -> list[str]:
        return sorted(name for name, ok in self.checks.items() if not ok)

    def record(self, digits: int = 17) -> dict[str, Any]:
        return {
            "claim": self.claim,
            "params": plain_value(self.params, digits),
            "series": [plain_value(row, digits) for row in self.series],
            "checks": dict(sorted(self.checks.items())),
            "measured": plain_value(self.measured, digits),
            "notes": list(self.notes),
            "verdict": self.verdict,
        }
