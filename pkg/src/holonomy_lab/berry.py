"""Berry connections, loop phases, gauge transformations and single-valuedness audits.

Sign convention: ``F(C) = (1/i) oint <psi|grad psi> . dR = oint Im<psi|d psi>``.
This is the *negative* of the other common convention
``gamma = i oint <psi|grad psi> . dR``. A state rephased by ``exp(i g)``
picks up connection ``+grad g``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import _kernels
from .dsl import HamiltonianFamily
from .errors import (
    DegeneracyError,
    DomainError,
    GaugeError,
    InvariantViolation,
    NumericError,
    ResolutionError,
)
from .pancharatnam import overlap_phase
from .phase import TAU, GeometricPhase, ParamPath, canonicalize_phase, phase_distance
from .spectral import _OVERLAP_SLACK, DEFAULT_GAP_TOL, MIN_STEP_OVERLAP, StateSection, band_gaps, continue_branch, eigh_many

DEFAULT_RELATIVE_STEP = 1e-5
AUDIT_TOL = 1e-6
WINDING_TOL = 1e-9
# eigenvector rounding error, in units of ||H|| / gap
_EIG_NOISE = 1e-15
_MAX_STENCIL_NOISE = 1e-6


@dataclass(frozen=True)
class ConnectionSample:
    point: tuple
    components: tuple

    def __post_init__(self):
        if len(self.point) != len(self.components):
            raise InvariantViolation("one connection component per coordinate")
        if not all(math.isfinite(c) for c in self.components):
            raise InvariantViolation("connection components must be finite")


@dataclass(frozen=True)
class GaugeFunction:
    """Real phase function ``g`` applied as ``psi -> exp(i g) psi``.

    ``winding`` is the integer ``k`` with ``g(end) - g(start) = 2 pi k`` on
    the closed path where the gauge is used; it is checked on use. With
    ``argument="tick"`` the function receives the path parameter instead of
    the parameter point; with ``argument="path"`` it receives both
    ``(point, tick)``.

    The half-angle factor ``exp(i phi/2)`` has winding 1/2 and so cannot
    declare one. Pass it as a bare callable, or with ``winding=None``
    (undeclared): :func:`apply_gauge` and :func:`single_valuedness_audit`
    accept it, :func:`loop_integral` does not.
    """

    fn: Callable
    winding: int | None = 0
    argument: str = "point"

    def __post_init__(self):
        if self.winding is not None:
            if isinstance(self.winding, bool) or not float(self.winding).is_integer():
                raise InvariantViolation(f"gauge winding must be an integer, got {self.winding!r}")
            object.__setattr__(self, "winding", int(self.winding))
        if self.argument not in ("point", "tick", "path"):
            raise InvariantViolation("argument must be 'point', 'tick' or 'path'")

    def __call__(self, point) -> float:
        if self.argument != "point":
            raise GaugeError("this gauge is defined on the path parameter, not on points")
        return float(self.fn(tuple(point)))

    def check_winding(self, path: ParamPath) -> None:
        if self.winding is None:
            raise GaugeError("gauge has no declared winding, so it may be multivalued on this loop")
        g = gauge_values(self, path)
        actual = (g[-1] - g[0]) / TAU
        if abs(actual - self.winding) > WINDING_TOL:
            raise GaugeError(
                f"gauge declares winding {self.winding} but changes by 2*pi*{actual:.12g} around the path"
            )


def gauge_values(gauge, path: ParamPath) -> np.ndarray:
    """Gauge evaluated at every sample, plus the end point of a closed path."""
    if isinstance(gauge, GaugeFunction) and gauge.argument == "tick":
        vals = [float(gauge.fn(t)) for t in path.ticks]
    elif isinstance(gauge, GaugeFunction) and gauge.argument == "path":
        pts = path.with_end() if path.closed else path.samples
        vals = [float(gauge.fn(tuple(p), t)) for p, t in zip(pts.tolist(), path.ticks)]
    else:
        fn = gauge.fn if isinstance(gauge, GaugeFunction) else gauge
        pts = path.with_end() if path.closed else path.samples
        vals = [float(fn(tuple(p))) for p in pts.tolist()]
    vals = np.asarray(vals, dtype=float)
    if not np.all(np.isfinite(vals)):
        k = int(np.argmin(np.isfinite(vals)))
        raise GaugeError(f"gauge is not finite at sample {k}")
    return vals


def apply_gauge(section: StateSection, gauge) -> StateSection:
    """Multiply state ``k`` by ``exp(i g(R_k))`` (and the end state by ``exp(i g(end))``).

    Any pointwise-finite gauge is accepted; whether the result is
    single-valued is for :func:`single_valuedness_audit` to decide.
    """
    g = gauge_values(gauge, section.path)
    m = len(section)
    factors = np.exp(1j * g)
    states = section.states * factors[:m, None]
    end = section.end_state * factors[m] if section.end_state is not None else None
    label = f"{section.gauge_label}+gauge"
    return replace(section, states=states, end_state=end, gauge_label=label)


def _stencil_points(point: np.ndarray, steps: np.ndarray) -> np.ndarray:
    d = point.size
    pts = np.repeat(point[None, :], 2 * d + 1, axis=0)
    for j in range(d):
        pts[1 + 2 * j, j] += steps[j]
        pts[2 + 2 * j, j] -= steps[j]
    return pts


def connection_numeric(family: HamiltonianFamily, band: int, point, step=None,
                       gauge=None, gap_tol: float = DEFAULT_GAP_TOL) -> ConnectionSample:
    """Connection components ``Im<psi|d_j psi>`` by centered differences.

    Neighbour states are first aligned to the centre state by parallel
    transport, so without a gauge the result is the (vanishing) connection
    of the locally parallel-transported section; with ``gauge`` the
    section is rephased by ``exp(i g)`` first. The default step in
    coordinate ``j`` is ``1e-5 * max(1, |R_j|)``.
    """
    point = np.asarray(point, dtype=float).reshape(-1)
    d = point.size
    if family.parameter_names and d != len(family.parameter_names):
        raise DomainError(f"point has dimension {d}, family takes {len(family.parameter_names)}")
    if not 0 <= band < family.dimension:
        raise DomainError(f"band index {band} out of range")
    if step is None:
        steps = DEFAULT_RELATIVE_STEP * np.maximum(1.0, np.abs(point))
    else:
        steps = np.broadcast_to(np.asarray(step, dtype=float), (d,)).copy()
    if np.any(~(steps > 0)):
        raise DomainError("step must be positive")

    pts = _stencil_points(point, steps)
    Hs = family.evaluate_many(pts)
    w, V = eigh_many(Hs, family.hermiticity_tol)
    gaps = band_gaps(w, band)
    low = np.flatnonzero(gaps < gap_tol)
    if low.size:
        raise DegeneracyError(int(low[0]), float(gaps[low[0]]), gap_tol)
    noise = _EIG_NOISE * (1.0 + np.max(np.abs(w)) / np.min(gaps)) / np.min(steps)
    if noise > _MAX_STENCIL_NOISE:
        raise NumericError(
            f"step {np.min(steps):.1e} too small: estimated cancellation error {noise:.1e}"
        )

    psi = V[:, :, band]
    ov = psi @ np.conj(psi[0])  # <psi_0|psi_k>
    if np.min(np.abs(ov)) < MIN_STEP_OVERLAP - _OVERLAP_SLACK:
        raise ResolutionError(
            f"step {np.max(steps):.1e} too large: stencil overlap {np.min(np.abs(ov)):.3g}"
        )
    psi = psi * (np.conj(ov) / np.abs(ov))[:, None]
    if gauge is not None:
        g = np.array([float(gauge(tuple(p))) for p in pts.tolist()])
        if not np.all(np.isfinite(g)):
            raise GaugeError("gauge is not finite inside the stencil")
        psi = psi * np.exp(1j * g)[:, None]
    comps = []
    for j in range(d):
        diff = psi[1 + 2 * j] - psi[2 + 2 * j]
        comps.append(float(np.vdot(psi[0], diff).imag / (2.0 * steps[j])))
    return ConnectionSample(tuple(point.tolist()), tuple(comps))


def _checked_gauge(gauge, path: ParamPath) -> None:
    if gauge is None:
        return
    if not isinstance(gauge, GaugeFunction):
        raise GaugeError("loop_integral needs a GaugeFunction with a declared integer winding")
    gauge.check_winding(path)


def loop_integral(family: HamiltonianFamily, band: int, path: ParamPath, gauge=None,
                  gap_tol: float = DEFAULT_GAP_TOL) -> GeometricPhase:
    """Geometric phase ``F(C)`` of ``band`` around the closed ``path``.

    Computed as the argument of the closed overlap product of the
    (optionally gauged) section, which is gauge invariant by construction.
    """
    if not path.closed:
        raise DomainError("loop_integral needs a closed path")
    _checked_gauge(gauge, path)
    section = continue_branch(family, path, band, gap_tol)
    if gauge is not None:
        section = apply_gauge(section, gauge)
    return section_loop_phase(section)


def section_loop_phase(section: StateSection) -> GeometricPhase:
    """Closed overlap product over the sampled states of a section."""
    links = _kernels.link_overlaps(section.states, True)
    return canonicalize_phase(_kernels.unit_product_angle(links))


def loop_integral_quadrature(family: HamiltonianFamily, band: int, path: ParamPath,
                             gauge=None, gap_tol: float = DEFAULT_GAP_TOL) -> GeometricPhase:
    """Cross-check of :func:`loop_integral` by trapezoidal quadrature.

    Integrates :func:`connection_numeric` samples along the path and adds
    the closure mismatch of the gauged section, which accounts for a
    section that is not single-valued. Point gauges only.
    """
    if not path.closed:
        raise DomainError("quadrature needs a closed path")
    pts = path.with_end()
    comps = np.array([
        connection_numeric(family, band, p, gauge=gauge, gap_tol=gap_tol).components
        for p in pts
    ])
    dR = np.diff(pts, axis=0)
    integral = float(np.sum(0.5 * (comps[:-1] + comps[1:]) * dR))
    audit = single_valuedness_audit(family, band, path, gauge, gap_tol)
    return canonicalize_phase(integral + audit.closure_phase)


@dataclass(frozen=True)
class AuditResult:
    closure_phase: GeometricPhase
    single_valued: bool
    sign_flip: bool


def single_valuedness_audit(family: HamiltonianFamily, band: int, path: ParamPath,
                            gauge=None, gap_tol: float = DEFAULT_GAP_TOL,
                            tol: float = AUDIT_TOL) -> AuditResult:
    """Does the (gauged) parallel-transported state come back to itself?

    ``closure_phase`` is the phase of ``<end|start>`` after one full
    circuit: 0 for a single-valued section, pi when the ket changes sign.
    """
    if not path.closed:
        raise DomainError("the audit needs a closed path")
    section = continue_branch(family, path, band, gap_tol)
    if gauge is not None:
        section = apply_gauge(section, gauge)
    closure = overlap_phase(section.end_state, section.states[0])
    return AuditResult(
        closure_phase=closure,
        single_valued=phase_distance(closure, 0.0) <= tol,
        sign_flip=phase_distance(closure, math.pi) <= tol,
    )


def orthogonal_gauge_check(section: StateSection) -> float:
    """``max_k |Im<psi_k|psi_{k+1}>|``: how far the section is from ``A . dR = 0``."""
    if len(section) < 2:
        return 0.0
    links = _kernels.link_overlaps(section.states, False)
    return float(np.max(np.abs(links.imag)))
