"""Exchange phases of identical particles.

A full circulation of one particle around another is two exchanges, so it
contributes ``2 theta``. In three dimensions the circulation can be shrunk
to nothing, forcing ``theta`` to 0 (bosons) or pi (fermions); in two
dimensions any ``theta`` is allowed (anyons).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvariantViolation
from .phase import GeometricPhase, canonicalize_phase, phase_distance

DIMENSION_TOL = 1e-9


@dataclass(frozen=True)
class ExchangePhase:
    theta: GeometricPhase
    spatial_dimension: int = 2

    def __post_init__(self):
        if self.spatial_dimension not in (2, 3):
            raise InvariantViolation("spatial_dimension must be 2 or 3")
        theta = canonicalize_phase(self.theta)
        if self.spatial_dimension == 3 and not (
            phase_distance(theta, 0.0) <= DIMENSION_TOL
            or phase_distance(theta, math.pi) <= DIMENSION_TOL
        ):
            raise InvariantViolation(
                f"in 3D a single exchange gives a factor +1 (boson) or -1 (fermion); "
                f"theta = {theta!r} is neither"
            )
        object.__setattr__(self, "theta", theta)


@dataclass(frozen=True)
class Boson:
    name = "boson"


@dataclass(frozen=True)
class Fermion:
    name = "fermion"


@dataclass(frozen=True)
class Anyon:
    theta: GeometricPhase
    name = "anyon"


def circulation_phase(x: ExchangePhase) -> GeometricPhase:
    return canonicalize_phase(2.0 * x.theta)


def classify(x: ExchangePhase, tol: float = 1e-9):
    if phase_distance(x.theta, 0.0) <= tol:
        return Boson()
    if phase_distance(x.theta, math.pi) <= tol:
        return Fermion()
    return Anyon(x.theta)
