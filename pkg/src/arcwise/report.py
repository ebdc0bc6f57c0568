"""JSON run reports.

A report is deterministic given (inputs, config, seed): keys are sorted, numbers
are rendered through ``jsonable`` and wall time is only included on request.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from typing import Any

import mpmath
import numpy as np

from .polycore import GaussianRational, MPoly, format_poly

SCHEMA = "arcwise/run-report/v1"


@dataclass
class RunConfig:
    prec: int = 256
    trunc: int = 20
    steps: int = 64
    tol: float = 2.0 ** -64
    seed: int = 0
    grid: int = 21

    def to_dict(self) -> dict:
        return jsonable(asdict(self))


@dataclass
class RunReport:
    command: str
    inputs: dict
    config: RunConfig
    checks: list = field(default_factory=list)
    result: dict = field(default_factory=dict)
    wall_time: float | None = None

    def add(self, name: str, passed: bool | None = None, **detail) -> dict:
        """Record one check; passed=None marks a documented, unverified item.

        A ``pass`` key in ``detail`` (as returned by the check helpers) wins.
        """
        if "pass" in detail:
            passed = detail.pop("pass")
        item = {"name": name, "pass": passed, **detail}
        self.checks.append(item)
        return item

    @property
    def passed(self) -> bool:
        return all(c["pass"] is not False for c in self.checks)

    def to_dict(self) -> dict:
        out = {
            "$schema": SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "config": self.config.to_dict(),
            "checks": self.checks,
            "result": self.result,
            "summary": {"pass": self.passed,
                        "checks": len(self.checks),
                        "failed": [c["name"] for c in self.checks if c["pass"] is False]},
        }
        if self.wall_time is not None:
            out["wall_time_s"] = round(self.wall_time, 3)
        return jsonable(out)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


class Stopwatch:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        return False


def jsonable(x: Any) -> Any:
    """Convert exact and mpmath values to JSON-safe, deterministic forms."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return jsonable(x.item())
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return x if x == x and abs(x) != float("inf") else repr(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, GaussianRational):
        return [str(x.re), str(x.im)]
    if isinstance(x, MPoly):
        return format_poly(x)
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, 17)
    if isinstance(x, mpmath.mpc):  # no re-rounding: the context may be at a lower precision now
        return [mpmath.nstr(x.real, 17), mpmath.nstr(x.imag, 17)]
    if isinstance(x, complex):
        return [repr(x.real), repr(x.imag)]
    if hasattr(x, "to_dict"):
        return jsonable(x.to_dict())
    return str(x)
