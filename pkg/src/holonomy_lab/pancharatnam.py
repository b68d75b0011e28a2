"""Discrete geometric phases from products of state overlaps.

Two kets are in phase (Pancharatnam) when their overlap is real and
positive, i.e. when the intensity of their sum is maximal. The relation is
not transitive, and the failure of transitivity around a closed chain is
the geometric phase.

Orientation: the loop phase is ``arg prod_k <psi_k|psi_{k+1}>`` over the
forward chain, whose continuum limit is ``Im oint <psi|d psi>``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, UndefinedPhaseError
from .phase import GeometricPhase, as_amplitudes, as_state_matrix, canonicalize_phase

ORTH_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class OverlapChain:
    """Ordered kets of equal dimension; wraps around when ``closed``."""

    states: np.ndarray
    closed: bool = True
    orth_tol: float = ORTH_TOL

    def __post_init__(self):
        arr = as_state_matrix(self.states)
        if arr.shape[0] < 2:
            raise DomainError("an overlap chain needs at least 2 states")
        links = _kernels.link_overlaps(arr, self.closed)
        mags = np.abs(links)
        bad = np.flatnonzero(mags <= self.orth_tol)
        if bad.size:
            k = int(bad[0])
            raise UndefinedPhaseError(
                f"states {k} and {(k + 1) % arr.shape[0]} are orthogonal "
                f"(|overlap| = {mags[k]:.2e}); the phase is undefined"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "states", arr)

    def __len__(self):
        return self.states.shape[0]

    def links(self) -> np.ndarray:
        return _kernels.link_overlaps(self.states, self.closed)

    def reversed(self) -> "OverlapChain":
        return OverlapChain(self.states[::-1].copy(), self.closed, self.orth_tol)

    def rotated(self, shift: int) -> "OverlapChain":
        return OverlapChain(np.roll(self.states, -shift, axis=0), self.closed, self.orth_tol)


def _overlap(a, b) -> complex:
    a = as_amplitudes(a)
    b = as_amplitudes(b)
    if a.shape != b.shape:
        raise DomainError(f"state dimensions differ: {a.size} vs {b.size}")
    return complex(np.vdot(a, b))


def _checked_overlap(a, b) -> complex:
    z = _overlap(a, b)
    if abs(z) <= ORTH_TOL:
        raise UndefinedPhaseError(f"|<a|b>| = {abs(z):.2e} is too small for a phase")
    return z


def overlap_phase(a, b) -> GeometricPhase:
    """``arg <a|b>``; zero exactly when ``a`` and ``b`` are in phase."""
    return canonicalize_phase(cmath.phase(_checked_overlap(a, b)))


def in_phase(a, b, tol: float = 1e-9) -> bool:
    return abs(overlap_phase(a, b)) <= tol


def loop_phase_discrete(chain: OverlapChain) -> GeometricPhase:
    """Gauge-invariant phase of a closed chain, ``arg prod <psi_k|psi_{k+1 mod N}>``."""
    if not chain.closed:
        raise DomainError("loop phase needs a closed chain")
    return canonicalize_phase(_kernels.unit_product_angle(chain.links()))


def parallel_transport(chain: OverlapChain) -> tuple[np.ndarray, GeometricPhase]:
    """Rephase the chain so every consecutive overlap is real and positive.

    Returns the transported kets (rows) and the holonomy: for a closed chain,
    the phase of the closing overlap ``<transported[-1]|input[0]>``, which
    equals :func:`loop_phase_discrete`; for an open chain, 0.
    """
    moved = _kernels.transport(chain.states)
    if not chain.closed:
        return moved, 0.0
    return moved, overlap_phase(moved[-1], chain.states[0])


def transitivity_defect(a, b, c) -> GeometricPhase:
    """``arg(<a|b><b|c><c|a>)``: zero iff 'in phase' is transitive on this triple."""
    z = _checked_overlap(a, b) * _checked_overlap(b, c) * _checked_overlap(c, a)
    return canonicalize_phase(cmath.phase(z))
