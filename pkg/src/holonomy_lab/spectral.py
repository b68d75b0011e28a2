"""Small dense Hermitian eigensystems and band continuation along paths."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dsl import DEFAULT_HERMITICITY_TOL, HamiltonianFamily
from .errors import (
    DegeneracyError,
    DomainError,
    HermiticityError,
    NumericError,
    ResolutionError,
)
from .phase import ParamPath, QuantumState

DEFAULT_GAP_TOL = 1e-8
MIN_STEP_OVERLAP = 0.5
_OVERLAP_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Ascending eigenvalues; ``eigenvectors[:, k]`` pairs with ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def states(self) -> list[QuantumState]:
        return [QuantumState(v) for v in self.eigenvectors.T]

    def __iter__(self):
        yield self.eigenvalues
        yield self.eigenvectors


def _check_hermitian(H: np.ndarray, tol: float):
    dev = float(np.max(np.abs(H - np.conj(np.swapaxes(H, -1, -2))))) if H.size else 0.0
    if dev > tol:
        raise HermiticityError(dev, tol)


def eigh_many(Hs: np.ndarray, hermiticity_tol: float = DEFAULT_HERMITICITY_TOL):
    """Eigensystems of a stack ``(m, n, n)``: returns ``(w (m, n), V (m, n, n))``.

    Closed form for n = 2, cyclic Jacobi rotations otherwise. Eigenvector
    phases are fixed so the largest amplitude is real and positive.
    """
    Hs = np.asarray(Hs, dtype=complex)
    if Hs.ndim != 3 or Hs.shape[1] != Hs.shape[2] or Hs.shape[1] < 1:
        raise DomainError(f"expected a stack of square matrices, got shape {Hs.shape}")
    _check_hermitian(Hs, hermiticity_tol)
    if Hs.shape[1] == 2:
        return _kernels.eigh2_batch(Hs)
    w, V, ok = _kernels.jacobi_eigh_batch(Hs)
    if not np.all(ok):
        k = int(np.argmin(ok))
        raise NumericError(f"Jacobi iteration did not converge for matrix {k}")
    return w, V


def eigh(H, hermiticity_tol: float = DEFAULT_HERMITICITY_TOL) -> EigenSystem:
    """Eigendecomposition of one Hermitian matrix.

    >>> es = eigh([[1, 0], [0, -1]])
    >>> es.eigenvalues.tolist()
    [-1.0, 1.0]
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2:
        raise DomainError(f"expected a square matrix, got shape {H.shape}")
    w, V = eigh_many(H[None], hermiticity_tol)
    return EigenSystem(w[0], V[0])


def band_gaps(w: np.ndarray, band: int) -> np.ndarray:
    """Distance from ``band`` to its nearest neighbouring level, per sample."""
    n = w.shape[1]
    gaps = np.full(w.shape[0], np.inf)
    if band > 0:
        gaps = np.minimum(gaps, w[:, band] - w[:, band - 1])
    if band < n - 1:
        gaps = np.minimum(gaps, w[:, band + 1] - w[:, band])
    return gaps


@dataclass(frozen=True, eq=False)
class StateSection:
    """Band states sampled along a path, one row per sample.

    For closed paths ``end_state`` is the state carried once around the
    circuit back to the start (same ray as ``states[0]``, possibly a
    different phase).
    """

    path: ParamPath
    band_index: int
    states: np.ndarray
    gauge_label: str
    end_state: np.ndarray | None = None

    def __len__(self):
        return self.states.shape[0]

    def state(self, k: int) -> QuantumState:
        return QuantumState(self.states[k])


def _band_states(family: HamiltonianFamily, points: np.ndarray, band: int, gap_tol: float):
    n = family.dimension
    if not 0 <= band < n:
        raise DomainError(f"band index {band} out of range for a {n}x{n} family")
    w, V = eigh_many(family.evaluate_many(points), family.hermiticity_tol)
    gaps = band_gaps(w, band)
    low = np.flatnonzero(gaps < gap_tol)
    if low.size:
        raise DegeneracyError(int(low[0]), float(gaps[low[0]]), gap_tol)
    return V[:, :, band]


def continue_branch(family: HamiltonianFamily, path: ParamPath, band_index: int,
                    gap_tol: float = DEFAULT_GAP_TOL) -> StateSection:
    """Follow one band along ``path`` in the discrete parallel-transport gauge.

    Every consecutive overlap of the returned section is real and positive.
    The first state keeps the eigensolver's convention (largest amplitude
    real positive).
    """
    if family.parameter_names and path.dimension != len(family.parameter_names):
        raise DomainError(
            f"path has dimension {path.dimension}, family takes {len(family.parameter_names)} parameters"
        )
    points = path.with_end() if path.closed else path.samples
    raw = _band_states(family, points, band_index, gap_tol)
    mags = np.abs(_kernels.link_overlaps(raw, False))
    bad = np.flatnonzero(mags < MIN_STEP_OVERLAP - _OVERLAP_SLACK)
    if bad.size:
        k = int(bad[0])
        raise ResolutionError(
            f"overlap {mags[k]:.3f} between samples {k} and {k + 1} is below {MIN_STEP_OVERLAP}; "
            "refine the path (more samples) or check for an avoided crossing"
        )
    moved = _kernels.transport(raw)
    m = len(path)
    return StateSection(
        path=path,
        band_index=band_index,
        states=moved[:m],
        gauge_label="parallel-transport",
        end_state=moved[m] if path.closed else None,
    )


def detect_degeneracies(family: HamiltonianFamily, path: ParamPath,
                        gap_tol: float = DEFAULT_GAP_TOL) -> list[tuple[int, float]]:
    """Samples whose smallest adjacent level spacing is below ``gap_tol``."""
    w, _ = eigh_many(family.evaluate_many(path.samples), family.hermiticity_tol)
    if w.shape[1] < 2:
        return []
    gaps = np.min(np.diff(w, axis=1), axis=1)
    return [(int(k), float(gaps[k])) for k in np.flatnonzero(gaps < gap_tol)]
