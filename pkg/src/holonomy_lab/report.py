"""Machine-readable run reports (JSON canonical, CSV flat projection)."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from . import _kernels
from .phase import canonicalize_phase, phase_distance

TOOLKIT = "holonomy-lab"
CSV_COLUMNS = ("quantity", "raw", "canonical", "tolerance", "pass")


@dataclass
class Quantity:
    name: str
    raw: float
    canonical: float | None = None
    expected: float | None = None
    tolerance: float | None = None
    passed: bool | None = None

    @classmethod
    def phase(cls, name, raw, expected=None, tolerance=None):
        canonical = canonicalize_phase(raw)
        passed = None
        if expected is not None and tolerance is not None:
            passed = phase_distance(canonical, expected) <= tolerance
        return cls(name, float(raw), canonical, expected, tolerance, passed)

    @classmethod
    def value(cls, name, raw, expected=None, tolerance=None):
        """Plain number; with ``expected=None`` the tolerance is an upper bound."""
        passed = None
        if tolerance is not None:
            target = 0.0 if expected is None else expected
            dev = abs(raw) if expected is None else abs(raw - target)
            passed = dev <= tolerance
        return cls(name, float(raw), None, expected, tolerance, passed)

    def to_dict(self) -> dict:
        return {
            "quantity": self.name,
            "raw": self.raw,
            "canonical": self.canonical,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class RunReport:
    command: str
    config: dict
    quantities: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    convergence: list = field(default_factory=list)
    wall_time: float = 0.0

    def add(self, q: Quantity) -> Quantity:
        self.quantities.append(q)
        return q

    def get(self, name: str) -> Quantity:
        for q in self.quantities:
            if q.name == name:
                return q
        raise KeyError(name)

    @property
    def ok(self) -> bool:
        return all(q.passed is not False for q in self.quantities)

    def to_dict(self, include_wall_time: bool = True) -> dict:
        from . import __version__

        out = {
            "toolkit": TOOLKIT,
            "version": __version__,
            "kernel_backend": _kernels.BACKEND,
            "command": self.command,
            "config": self.config,
            "quantities": [q.to_dict() for q in self.quantities],
            "flags": self.flags,
            "details": self.details,
            "convergence": [
                {"N": n, "phase": p, "error": e} for n, p, e in self.convergence
            ],
        }
        if include_wall_time:
            out["wall_time_s"] = self.wall_time
        return out

    def to_json(self, include_wall_time: bool = True) -> str:
        return json.dumps(self.to_dict(include_wall_time), indent=2, ensure_ascii=False,
                          allow_nan=False) + "\n"

    def csv_rows(self) -> list[tuple]:
        rows = []
        for q in self.quantities:
            rows.append((q.name, q.raw, q.canonical, q.tolerance, q.passed))
        for n, p, e in self.convergence:
            rows.append((f"convergence_phase[N={n}]", p, canonicalize_phase(p), None, None))
            rows.append((f"convergence_error[N={n}]", e, None, None, None))
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for name, raw, canonical, tol, passed in self.csv_rows():
            writer.writerow([
                name,
                _num(raw),
                _num(canonical),
                _num(tol),
                "" if passed is None else str(passed).lower(),
            ])
        return buf.getvalue()


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError("non-finite value in report")
    return repr(float(x))
