"""Shared numeric types: phases mod 2pi, unit kets and sampled parameter paths."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, InvariantViolation

TAU = 2.0 * math.pi

NORM_TOL = 1e-12
PHYSICS_TOL = 1e-9

# Geometric phases are plain floats in (-pi, pi]; the alias documents intent.
GeometricPhase = float
ParameterPoint = tuple


def canonicalize_phase(x: float) -> GeometricPhase:
    """Map ``x`` to its representative in ``(-pi, pi]``.

    ``math.remainder`` is exact, so the map is idempotent bit for bit.
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"phase must be finite, got {x!r}")
    y = math.remainder(x, TAU)
    if y <= -math.pi:
        y += TAU
    return y + 0.0  # no negative zero


def phase_distance(a: float, b: float) -> float:
    """Distance between two phases on the circle, in ``[0, pi]``."""
    return abs(math.remainder(float(a) - float(b), TAU))


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class QuantumState:
    """Unit vector in C^n, n >= 2.

    Amplitudes are checked against unit norm unless ``normalize=True``,
    in which case they are rescaled first.
    """

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes, normalize: bool = False):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        if amps.size < 2:
            raise InvariantViolation("a state needs dimension >= 2")
        if not np.all(np.isfinite(amps)):
            raise InvariantViolation("state amplitudes must be finite")
        norm = float(np.linalg.norm(amps))
        if normalize:
            if norm == 0.0:
                raise InvariantViolation("cannot normalize the zero vector")
            amps = amps / norm
        elif abs(norm - 1.0) > NORM_TOL:
            raise InvariantViolation(f"state norm {norm!r} differs from 1 by more than {NORM_TOL}")
        object.__setattr__(self, "amplitudes", _readonly(amps))

    def __setattr__(self, name, value):
        raise AttributeError("QuantumState is immutable")

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    def rephased(self, angle: float) -> "QuantumState":
        return QuantumState(self.amplitudes * np.exp(1j * angle), normalize=True)

    def inner(self, other: "QuantumState") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, as_amplitudes(other)))

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)

    def __len__(self):
        return self.amplitudes.size

    def __eq__(self, other):
        if not isinstance(other, QuantumState):
            return NotImplemented
        return np.array_equal(self.amplitudes, other.amplitudes)

    def __hash__(self):
        return hash(self.amplitudes.tobytes())

    def __repr__(self):
        return f"QuantumState({self.amplitudes.tolist()!r})"


def as_amplitudes(state) -> np.ndarray:
    """Amplitude vector of a :class:`QuantumState` or array-like ket."""
    if isinstance(state, QuantumState):
        return state.amplitudes
    return np.asarray(state, dtype=complex).reshape(-1)


def as_state_matrix(states) -> np.ndarray:
    """Stack kets row-wise into an ``(m, n)`` complex array, checking unit norm."""
    if isinstance(states, np.ndarray) and states.ndim == 2:
        arr = np.ascontiguousarray(states, dtype=complex)
    else:
        arr = np.array([as_amplitudes(s) for s in states], dtype=complex)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise InvariantViolation("states must be kets of a common dimension >= 2")
    norms = np.linalg.norm(arr, axis=1)
    if arr.shape[0] and np.max(np.abs(norms - 1.0)) > 1e-10:
        raise InvariantViolation("every state must have unit norm")
    return arr


@dataclass(frozen=True, eq=False)
class ParamPath:
    """Ordered parameter samples along a path.

    For a closed path the first sample is *not* repeated; the circuit
    returns to ``end``, which defaults to the first sample but may carry
    unwrapped coordinates (e.g. ``phi = 2*pi`` on a polar circle) so that
    multivalued gauges can be evaluated at the end of the circuit.
    ``ticks`` holds the path parameter of every sample, plus the end
    point when closed.
    """

    samples: np.ndarray
    closed: bool = True
    end: np.ndarray | None = None
    ticks: np.ndarray | None = field(default=None)

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float)
        if samples.ndim == 1:
            samples = samples[:, None]
        if samples.ndim != 2 or samples.shape[1] < 1:
            raise InvariantViolation("path samples must be points of dimension >= 1")
        if not np.all(np.isfinite(samples)):
            raise InvariantViolation("path samples must be finite")
        m = samples.shape[0]
        if self.closed and m < 3:
            raise InvariantViolation("a closed path needs at least 3 samples")
        if not self.closed and m < 1:
            raise InvariantViolation("a path needs at least one sample")
        if self.closed:
            end = samples[0].copy() if self.end is None else np.array(self.end, dtype=float).reshape(-1)
            if end.shape != samples[0].shape or not np.all(np.isfinite(end)):
                raise InvariantViolation("end point must match the sample dimension")
        else:
            end = samples[-1].copy() if self.end is None else np.array(self.end, dtype=float).reshape(-1)
        n_ticks = m + 1 if self.closed else m
        ticks = np.arange(n_ticks, dtype=float) if self.ticks is None else np.array(self.ticks, dtype=float)
        if ticks.shape != (n_ticks,):
            raise InvariantViolation(f"expected {n_ticks} ticks, got {ticks.shape}")
        object.__setattr__(self, "samples", _readonly(samples))
        object.__setattr__(self, "end", _readonly(end))
        object.__setattr__(self, "ticks", _readonly(ticks))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def dimension(self) -> int:
        return self.samples.shape[1]

    def points(self) -> list[ParameterPoint]:
        return [tuple(p) for p in self.samples.tolist()]

    def with_end(self) -> np.ndarray:
        """Samples followed by the end point, shape ``(m + 1, d)``."""
        return np.vstack([self.samples, self.end[None, :]])

    @classmethod
    def circle(cls, center: Sequence[float] = (0.0, 0.0), radius: float = 1.0,
               samples: int = 360, winding: int = 1, start_angle: float = 0.0) -> "ParamPath":
        """Closed Cartesian circle in a 2-parameter plane, traversed ``winding`` times."""
        if samples < 3:
            raise InvariantViolation("a closed path needs at least 3 samples")
        if winding == 0:
            raise InvariantViolation("winding must be nonzero")
        t = start_angle + TAU * winding * np.arange(samples + 1) / samples
        cx, cy = map(float, center)
        pts = np.column_stack([cx + radius * np.cos(t), cy + radius * np.sin(t)])
        return cls(pts[:-1], closed=True, end=pts[0], ticks=t)

    @classmethod
    def polar_circle(cls, radius: float = 1.0, samples: int = 360, winding: int = 1,
                     start_angle: float = 0.0) -> "ParamPath":
        """Closed circle in ``(r, phi)`` coordinates with phi unwrapped.

        The end point sits at ``phi = start_angle + 2*pi*winding``.
        """
        if samples < 3:
            raise InvariantViolation("a closed path needs at least 3 samples")
        if winding == 0:
            raise InvariantViolation("winding must be nonzero")
        t = start_angle + TAU * winding * np.arange(samples + 1) / samples
        pts = np.column_stack([np.full_like(t, float(radius)), t])
        return cls(pts[:-1], closed=True, end=pts[-1], ticks=t)
