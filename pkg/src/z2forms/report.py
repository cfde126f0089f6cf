"""Verification reports: named checks with deterministic JSON serialization.

Reports deliberately carry no wall-clock timing so that two runs with the
same seed serialize to byte-identical JSON.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


def jsonable(value):
    """Recursively convert numpy scalars/arrays and complex numbers."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in value]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)) and not isinstance(value, bool):
        return int(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


@dataclass
class Check:
    """One named verification with its measured details and tolerances."""

    name: str
    passed: bool
    tolerances: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "tolerances": jsonable(self.tolerances),
            "details": jsonable(self.details),
        }

    def summary_line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}"


@dataclass
class VerificationReport:
    suite: str
    descriptor: dict
    seed: int
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def first_failure(self) -> Check | None:
        return next((c for c in self.checks if not c.passed), None)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "descriptor": jsonable(self.descriptor),
            "seed": int(self.seed),
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"
