"""The unit of output for every law check."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

FIELDS = ("name", "anchor", "deviation", "tol", "pass", "scalar", "tau_scalar", "backend", "config")


@dataclass
class CheckReport:
    """Outcome of one identity check.

    ``passed`` is ``deviation <= tol`` after any scalar fit or tau-corner
    removal the check declares.  A skipped check has ``passed = False`` and
    the reason in ``details["skipped"]``.
    """

    name: str
    anchor: str
    deviation: float
    tol: float
    passed: bool
    scalar: Optional[complex] = None
    tau_scalar: Optional[complex] = None
    backend: Optional[str] = None
    config: Optional[dict] = None
    details: dict = field(default_factory=dict)

    @classmethod
    def of(cls, name, anchor, deviation, tol, **kw) -> "CheckReport":
        deviation = float(deviation)
        return cls(name, anchor, deviation, tol, bool(deviation <= tol), **kw)

    @classmethod
    def skipped(cls, name, anchor, reason, **kw) -> "CheckReport":
        r = cls(name, anchor, math.inf, 0.0, False, **kw)
        r.details["skipped"] = reason
        return r

    @property
    def is_skipped(self) -> bool:
        return "skipped" in self.details

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "deviation": _json(self.deviation),
            "tol": self.tol,
            "pass": self.passed,
            "scalar": _json(self.scalar),
            "tau_scalar": _json(self.tau_scalar),
            "backend": self.backend,
            "config": self.config,
            "details": _json(self.details),
        }

    def line(self) -> str:
        mark = "SKIP" if self.is_skipped else ("PASS" if self.passed else "FAIL")
        return f"{mark:4s} {self.name}  dev={self.deviation:.3e} tol={self.tol:.0e}"


def _json(v: Any):
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, dict):
        return {str(k): _json(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_json(x) for x in v]
    return str(v)


def dumps(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=False) + "\n"
