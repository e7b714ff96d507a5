"""Structured experiment reports written by the CLI."""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

import numpy as np


def jsonable(x: Any) -> Any:
    """Recursively convert numpy scalars/arrays, complex numbers and non-finite floats to JSON values."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": jsonable(x.real), "im": jsonable(x.imag)}
    if hasattr(x, "to_dict"):
        return jsonable(x.to_dict())
    return x


@dataclass
class Check:
    name: str
    inputs: dict
    value: Any
    reference: Any
    passed: bool
    asserted: bool = True

    def to_dict(self) -> dict:
        return {"name": self.name, "inputs": self.inputs, "value": self.value, "reference": self.reference,
                "passed": bool(self.passed), "asserted": self.asserted}


@dataclass
class ExperimentReport:
    command: list[str]
    config: dict
    seed: Any
    backend: str
    checks: list[Check] = field(default_factory=list)
    results: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    wall_time: float = 0.0
    _t0: float = field(default_factory=time.perf_counter, repr=False)

    def check(self, name: str, value, reference, passed: bool, asserted: bool = True, **inputs) -> Check:
        c = Check(name, inputs, value, reference, bool(passed), asserted)
        self.checks.append(c)
        return c

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if c.asserted and not c.passed]

    def finish(self) -> "ExperimentReport":
        self.wall_time = time.perf_counter() - self._t0
        return self

    def to_dict(self) -> dict:
        return jsonable({
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "backend": self.backend,
            "checks": [c.to_dict() for c in self.checks],
            "results": self.results,
            "notes": self.notes,
            "passed": not self.failures,
            "wall_time": self.wall_time,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def report_schema() -> dict:
    return json.loads(resources.files("dirichlet_lab").joinpath("report_schema.json").read_text())
