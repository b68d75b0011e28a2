"""Aharonov-Bohm phases of polygonal paths around an ideal solenoid.

Natural units: the phase acquired per winding equals the enclosed flux.
Rescale with :data:`CHARGE_OVER_HBAR_C` for other unit systems.

The rest-of-system phase is not computed here; only the value that the
complementarity hypothesis predicts for it (minus the AB phase).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, InvariantViolation, ResolutionError, SingularityError
from .phase import TAU, GeometricPhase, canonicalize_phase, phase_distance

CHARGE_OVER_HBAR_C = 1.0
AXIS_TOL = 1e-12
PATH_AXIS_TOL = 1e-9
WINDING_RESIDUE_TOL = 1e-6


@dataclass(frozen=True)
class SolenoidField:
    flux: float
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        center = tuple(float(c) for c in self.center)
        if len(center) != 2 or not all(math.isfinite(c) for c in center):
            raise InvariantViolation("solenoid center must be a finite 2D point")
        if not math.isfinite(self.flux):
            raise InvariantViolation("flux must be finite")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "flux", float(self.flux))


@dataclass(frozen=True, eq=False)
class PlanarPath:
    """Polygon in the plane; the closing segment is implicit when ``closed``."""

    vertices: np.ndarray
    closed: bool = True

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise InvariantViolation("vertices must be 2D points")
        if not np.all(np.isfinite(v)):
            raise InvariantViolation("vertices must be finite")
        if self.closed and v.shape[0] < 3:
            raise InvariantViolation("a closed path needs at least 3 vertices")
        if v.shape[0] < 2:
            raise InvariantViolation("a path needs at least 2 vertices")
        nxt = np.roll(v, -1, axis=0) if self.closed else v[1:]
        cur = v if self.closed else v[:-1]
        if np.any(np.all(cur == nxt, axis=1)):
            raise InvariantViolation("consecutive vertices must be distinct")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return self.vertices.shape[0]

    def reversed(self) -> "PlanarPath":
        return PlanarPath(self.vertices[::-1].copy(), self.closed)

    @classmethod
    def circle(cls, center=(0.0, 0.0), radius: float = 1.0, samples: int = 360,
               winding: int = 1) -> "PlanarPath":
        """Regular polygon approximating a circle traversed ``winding`` times."""
        if winding == 0:
            raise InvariantViolation("winding must be nonzero")
        t = TAU * winding * np.arange(samples * abs(winding)) / (samples * abs(winding))
        pts = np.column_stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)])
        return cls(pts)


def vector_potential(field: SolenoidField, p) -> np.ndarray:
    """Azimuthal potential ``(flux / 2 pi) (-(y - cy), x - cx) / rho^2``."""
    dx = float(p[0]) - field.center[0]
    dy = float(p[1]) - field.center[1]
    rho2 = dx * dx + dy * dy
    if math.sqrt(rho2) <= AXIS_TOL:
        raise SingularityError(f"point {tuple(p)} lies on the solenoid axis")
    k = field.flux / TAU / rho2
    return np.array([-k * dy, k * dx])


def _swept_angle(path: PlanarPath, center) -> float:
    total, dist, seg = _kernels.segment_angle_sum(path.vertices, float(center[0]), float(center[1]),
                                                  path.closed)
    if dist < PATH_AXIS_TOL:
        raise SingularityError(f"segment {seg} passes within {dist:.1e} of the axis")
    return total


def winding_number(path: PlanarPath, center=(0.0, 0.0)) -> int:
    """Signed number of times ``path`` encircles ``center``."""
    if not path.closed:
        raise DomainError("winding number needs a closed path")
    turns = _swept_angle(path, center) / TAU
    n = round(turns)
    if abs(turns - n) >= WINDING_RESIDUE_TOL:
        raise ResolutionError(f"swept angle is {turns:.9f} turns, not an integer")
    return int(n)


@dataclass(frozen=True)
class ABPhase:
    canonical: GeometricPhase
    raw: float
    winding: int

    def __float__(self):
        return self.canonical


def ab_phase(field: SolenoidField, path: PlanarPath) -> ABPhase:
    """``oint A . dl`` by exact per-segment angle integration.

    Over a straight segment the azimuthal potential integrates to
    ``(flux / 2 pi) * (swept angle)``, so no quadrature error enters.
    """
    if not path.closed:
        raise DomainError("AB phase needs a closed path")
    swept = _swept_angle(path, field.center)
    turns = swept / TAU
    n = round(turns)
    if abs(turns - n) >= WINDING_RESIDUE_TOL:
        raise ResolutionError(f"swept angle is {turns:.9f} turns, not an integer")
    raw = CHARGE_OVER_HBAR_C * field.flux * turns
    return ABPhase(canonicalize_phase(raw), raw, int(n))


@dataclass(frozen=True)
class ComplementarityResult:
    sum: GeometricPhase
    vanishes: bool


def complementarity_check(phase_a: float, phase_b: float, tol: float = 1e-9) -> ComplementarityResult:
    total = canonicalize_phase(float(phase_a) + float(phase_b))
    return ComplementarityResult(total, phase_distance(total, 0.0) <= tol)


def complementary_phase_hypothesis(field: SolenoidField, path: PlanarPath) -> GeometricPhase:
    """Phase the rest of the system must carry if the total phase vanishes.

    This is a prediction of the hypothesis (the negated AB phase), not a
    computation of any physical mechanism.
    """
    return canonicalize_phase(-ab_phase(field, path).raw)
