"""Structured verdicts shared by the deciders, the lab and the command line."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    name: str
    passed: bool
    witness: Any = None

    def to_json(self):
        return {"name": self.name, "pass": bool(self.passed), "witness": jsonable(self.witness)}


@dataclass
class Report:
    experiment: str
    params: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def check(self, name: str, passed: bool, witness=None) -> bool:
        self.checks.append(Check(name, bool(passed), witness))
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        out = {"experiment": self.experiment, **jsonable(self.params)}
        out["checks"] = [c.to_json() for c in self.checks]
        if self.data:
            out["data"] = jsonable(self.data)
        out["pass"] = self.passed
        return out


def jsonable(x):
    """Recursively convert values into JSON-compatible data."""
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(jsonable(v) for v in x)
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    if hasattr(x, "item"):  # numpy scalars
        return x.item()
    return str(x)


def dumps(x) -> str:
    return json.dumps(jsonable(x), sort_keys=True, indent=2)
