"""Uniform pass/fail report records for inequality and bound checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

__all__ = ["CheckReport"]


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one verification: what was checked, on which graph, the
    decisive statistic, and whether it passed."""

    check: str
    graph: str
    params: dict
    statistic: float
    passed: bool
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "graph": self.graph,
            "params": self.params,
            "statistic": self.statistic,
            "pass": self.passed,
            "details": self.details,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.as_dict(), **kwargs)
