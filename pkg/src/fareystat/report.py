"""Verification report records shared by the checks and the CLI."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np


@dataclass
class VerificationReport:
    """Outcome of one named numerical check.

    ``passed`` is the result of comparing ``computed`` against ``reference``
    under ``norm``; for ``norm="trend"`` the comparison is owned by the
    producing check and ``deviation`` holds the worst ratio observed.
    """

    name: str
    computed: Any
    reference: Any
    tolerance: float
    passed: bool
    norm: str = "abs"
    deviation: float = 0.0
    runtime: float = 0.0
    details: dict = field(default_factory=dict)

    @classmethod
    def compare(cls, name: str, computed, reference, tolerance: float,
                norm: str = "abs", **details) -> "VerificationReport":
        c = np.atleast_1d(np.asarray(computed, dtype=float))
        r = np.atleast_1d(np.asarray(reference, dtype=float))
        dev = float(np.max(np.abs(c - r))) if c.size else 0.0
        return cls(name=name, computed=_plain(computed), reference=_plain(reference),
                   tolerance=float(tolerance), passed=bool(dev <= tolerance),
                   norm=norm, deviation=dev, details=details)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (f"[{flag}] {self.name}: deviation={self.deviation:.3e} "
                f"tol={self.tolerance:.1e} ({self.norm}) t={self.runtime:.2f}s")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["computed"] = _plain(self.computed)
        d["reference"] = _plain(self.reference)
        d["details"] = {k: _plain(v) for k, v in self.details.items()}
        return d


def _plain(v):
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if math.isfinite(f) else str(f)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def summarize(reports: Sequence[VerificationReport]) -> bool:
    return all(r.passed for r in reports)
