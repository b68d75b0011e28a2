"""Command-line entry point.

Subcommands: demo-spinor, berry, pancharatnam, ab, classify-exchange,
check-complementarity. Exit codes: 0 ok, 2 configuration, 3 computation,
4 I/O.
"""
from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import spinor
from .aharonov_bohm import (
    PlanarPath,
    SolenoidField,
    ab_phase,
    complementarity_check,
    complementary_phase_hypothesis,
)
from .berry import (
    GaugeFunction,
    apply_gauge,
    connection_numeric,
    gauge_values,
    loop_integral,
    orthogonal_gauge_check,
    section_loop_phase,
    single_valuedness_audit,
)
from .config import RunConfig, build_config, convert, load_config_file
from .dsl import BUILTINS, HamiltonianFamily, eval_node, parse_expression, parse_family
from .errors import ConfigError, DSLError, HolonomyError
from .exchange import ExchangePhase, circulation_phase, classify
from .pancharatnam import OverlapChain, loop_phase_discrete, parallel_transport
from .phase import TAU, ParamPath, QuantumState, phase_distance
from .report import Quantity, RunReport
from .spectral import continue_branch

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_IO = 0, 2, 3, 4

LOOP_TOL = 1e-4
AUDIT_TOL = 1e-6
AGREEMENT_TOL = 1e-10
CONVERGENCE_NS = (100, 1000, 10000)
DEFAULT_SAMPLES = 360


def _half_angle(point):
    return 0.5 * point[1]


# --------------------------------------------------------------------------
# commands

def cmd_demo_spinor(samples: int = 10000) -> RunReport:
    """End-to-end run of the two-level example on the unit phi-circle."""
    if samples < 3:
        raise ConfigError("samples must be at least 3")
    report = RunReport("demo-spinor", {"samples": samples})
    family = BUILTINS["spinor"]()
    path = ParamPath.polar_circle(1.0, samples)
    section = continue_branch(family, path, 0)

    product = report.add(Quantity.phase(
        "loop_phase_pancharatnam", loop_phase_discrete(OverlapChain(section.states)), math.pi, LOOP_TOL))
    gauged = apply_gauge(section, _half_angle)
    integral = report.add(Quantity.phase(
        "loop_phase_gauged_section", section_loop_phase(gauged), math.pi, LOOP_TOL))
    report.add(Quantity.value(
        "engine_disagreement", phase_distance(product.canonical, integral.canonical),
        tolerance=AGREEMENT_TOL))
    three = [spinor.chi_minus(phi) for phi in (0.0, TAU / 3, 2 * TAU / 3)]
    report.add(Quantity.phase(
        "loop_phase_three_point", loop_phase_discrete(OverlapChain(three)), math.pi, 1e-12))

    plain = single_valuedness_audit(family, 0, path)
    report.add(Quantity.phase(
        "closure_phase_parallel_transport", plain.closure_phase, math.pi, AUDIT_TOL))
    report.add(Quantity.value(
        "orthogonal_gauge_violation_parallel_transport", orthogonal_gauge_check(section),
        tolerance=1e-10))
    fixed = single_valuedness_audit(family, 0, path, gauge=_half_angle)
    report.add(Quantity.phase(
        "closure_phase_half_angle_gauge", fixed.closure_phase, 0.0, AUDIT_TOL))
    step = TAU / samples
    report.add(Quantity.value(
        "orthogonal_gauge_violation_half_angle_gauge", orthogonal_gauge_check(gauged),
        expected=0.5 * math.sin(step), tolerance=1e-9))

    phi = 1.0
    a_num = connection_numeric(family, 0, (1.0, phi), gauge=_half_angle).components[1]
    report.add(Quantity.value("connection_phi_half_angle_gauge", a_num, expected=0.5, tolerance=1e-6))
    report.add(Quantity.value(
        "connection_phi_half_angle_gauge_analytic", spinor.gauged_minus_connection(phi),
        expected=0.5, tolerance=0.0))
    a_pt = connection_numeric(family, 0, (1.0, phi)).components[1]
    report.add(Quantity.value("connection_phi_parallel_transport", a_pt, tolerance=1e-8))

    report.flags = {
        "parallel_transport_sign_flip": plain.sign_flip,
        "parallel_transport_single_valued": plain.single_valued,
        "half_angle_gauge_single_valued": fixed.single_valued,
        "half_angle_gauge_sign_flip": fixed.sign_flip,
    }
    if samples >= max(CONVERGENCE_NS):
        for n in CONVERGENCE_NS:
            sec = continue_branch(family, ParamPath.polar_circle(1.0, n), 0)
            p = loop_phase_discrete(OverlapChain(sec.states))
            report.convergence.append((n, p, phase_distance(p, math.pi)))
    return report


def load_family(cfg: RunConfig) -> tuple[HamiltonianFamily, str]:
    """Family and its kind ('polar' for the builtin spinor, else 'plain')."""
    if cfg.dsl_file is not None:
        text = Path(cfg.dsl_file).read_text(encoding="utf-8")
        return _parse_cfg_family(text, cfg.params), "plain"
    if cfg.dsl is not None:
        return _parse_cfg_family(cfg.dsl, cfg.params), "plain"
    name = cfg.family or "spinor"
    if name not in BUILTINS:
        raise ConfigError(f"unknown builtin family {name!r}; choose from {sorted(BUILTINS)}")
    return BUILTINS[name](), ("polar" if name == "spinor" else "plain")


def _parse_cfg_family(text, params):
    try:
        return parse_family(text, params)
    except DSLError as exc:
        raise ConfigError(f"family definition: {exc}") from None


def build_param_path(cfg: RunConfig, dimension: int, kind: str, samples: int | None = None) -> ParamPath:
    """Closed parameter path from an explicit vertex list or circle settings.

    Circles live in the plane of the first two parameters. For the polar
    builtin the Cartesian circle is converted to ``(r, phi)`` with phi
    unwrapped, so the end point carries the accumulated angle.
    """
    if cfg.vertices is not None:
        try:
            verts = np.array(cfg.vertices, dtype=float)
        except (TypeError, ValueError):
            raise ConfigError("vertices must be a list of numeric points") from None
        if verts.ndim == 1:
            verts = verts[:, None]
        if verts.ndim != 2 or verts.shape[1] != dimension:
            raise ConfigError(f"vertices must be points of dimension {dimension}")
        if verts.shape[0] < 3:
            raise ConfigError("a closed path needs at least 3 vertices")
        return ParamPath(verts, closed=True)
    if dimension != 2:
        raise ConfigError("circle paths need a two-parameter family; give explicit vertices")
    n = samples or cfg.samples or DEFAULT_SAMPLES
    circle = ParamPath.circle(cfg.center, cfg.radius, n, cfg.winding)
    if kind != "polar":
        return circle
    xy = circle.with_end()
    r = np.hypot(xy[:, 0], xy[:, 1])
    phi = np.unwrap(np.arctan2(xy[:, 1], xy[:, 0]))
    pts = np.column_stack([r, phi])
    return ParamPath(pts[:-1], closed=True, end=pts[-1], ticks=circle.ticks)


def build_gauge(cfg: RunConfig, family: HamiltonianFamily, path: ParamPath):
    """Gauge from an expression in the family parameters and the path parameter ``t``.

    Returns ``(gauge, turns)``. The gauge declares its winding when the
    measured change around the loop is a whole number of turns; otherwise
    it stays undeclared (fine for the audit, refused by the loop integral).
    """
    names = family.parameter_names
    if "t" in names:
        raise ConfigError("gauge expressions use 't' for the path parameter; rename the family parameter")
    try:
        node = parse_expression(cfg.gauge, names + ("t",))
    except DSLError as exc:
        raise ConfigError(f"gauge expression: {exc}") from None

    def fn(point, t):
        env = {name: float(v) for name, v in zip(names, point)}
        env["t"] = float(t)
        value = complex(eval_node(node, env))
        if value.imag != 0.0:
            raise ConfigError("gauge expression must be real")
        return value.real

    g = gauge_values(GaugeFunction(fn, None, argument="path"), path)
    turns = float((g[-1] - g[0]) / TAU)
    winding = int(round(turns)) if abs(turns - round(turns)) <= 1e-9 else None
    return GaugeFunction(fn, winding, argument="path"), turns


def cmd_berry(cfg: RunConfig) -> RunReport:
    family, kind = load_family(cfg)
    if not 0 <= cfg.band < family.dimension:
        raise ConfigError(f"band index {cfg.band} out of range for a {family.dimension}x{family.dimension} family")
    report = RunReport("berry", cfg.echo())
    path = build_param_path(cfg, len(family.parameter_names), kind)
    report.details["samples"] = len(path)

    gauge = None
    if cfg.gauge is not None:
        gauge, turns = build_gauge(cfg, family, path)
        report.details["gauge_turns"] = turns

    section = continue_branch(family, path, cfg.band, cfg.gap_tol)
    if gauge is None or gauge.winding is not None:
        phase = loop_integral(family, cfg.band, path, gauge, cfg.gap_tol)
    else:
        phase = section_loop_phase(apply_gauge(section, gauge))
    report.add(Quantity.phase("loop_phase", phase))

    audit = single_valuedness_audit(family, cfg.band, path, gauge, cfg.gap_tol)
    report.add(Quantity.phase("closure_phase", audit.closure_phase))
    shown = apply_gauge(section, gauge) if gauge is not None else section
    report.add(Quantity.value("orthogonal_gauge_violation", orthogonal_gauge_check(shown)))
    report.flags = {"single_valued": audit.single_valued, "sign_flip": audit.sign_flip}
    report.details["gauge_label"] = shown.gauge_label

    if cfg.convergence:
        top = cfg.samples or DEFAULT_SAMPLES
        ns = sorted({max(3, top // 100), max(3, top // 10), top})
        if cfg.vertices is not None:
            ns = [len(path)]
        values = []
        for n in ns:
            p = build_param_path(cfg, len(family.parameter_names), kind, n)
            values.append((n, loop_integral(family, cfg.band, p, None, cfg.gap_tol)))
        ref = values[-1][1]
        report.convergence = [(n, v, phase_distance(v, ref)) for n, v in values]
    return report


def _parse_states(raw) -> list[QuantumState]:
    if not isinstance(raw, list) or len(raw) < 2:
        raise ConfigError("states must be a JSON array of at least two kets")
    kets = []
    for k, ket in enumerate(raw):
        if not isinstance(ket, list):
            raise ConfigError(f"state {k} must be an array of amplitudes")
        amps = []
        for a in ket:
            if isinstance(a, list) and len(a) == 2 and all(isinstance(x, (int, float)) for x in a):
                amps.append(complex(a[0], a[1]))
            elif isinstance(a, (int, float)) and not isinstance(a, bool):
                amps.append(complex(a))
            else:
                raise ConfigError(f"state {k}: amplitudes must be numbers or [re, im] pairs")
        try:
            kets.append(QuantumState(amps, normalize=True))
        except HolonomyError as exc:
            raise ConfigError(f"state {k}: {exc}") from None
    if len({s.dimension for s in kets}) != 1:
        raise ConfigError("all states must have the same dimension")
    return kets


def cmd_pancharatnam(cfg: RunConfig) -> RunReport:
    if cfg.states is None:
        raise ConfigError("pancharatnam needs --states (JSON array of kets)")
    kets = _parse_states(cfg.states)
    report = RunReport("pancharatnam", cfg.echo())
    chain = OverlapChain(kets, closed=cfg.closed)
    moved, holonomy = parallel_transport(chain)
    if chain.closed:
        report.add(Quantity.phase("loop_phase", loop_phase_discrete(chain)))
    report.add(Quantity.phase("holonomy", holonomy))
    report.add(Quantity.value("min_link_magnitude", float(np.min(np.abs(chain.links())))))
    report.details["states"] = len(chain)
    report.details["closed"] = chain.closed
    return report


def cmd_ab(cfg: RunConfig) -> RunReport:
    if cfg.flux is None:
        raise ConfigError("ab needs --flux")
    field = SolenoidField(cfg.flux, cfg.solenoid_center)
    if cfg.vertices is not None:
        try:
            path = PlanarPath(cfg.vertices)
        except (HolonomyError, ValueError, TypeError) as exc:
            raise ConfigError(f"vertices: {exc}") from None
    else:
        path = PlanarPath.circle(cfg.center, cfg.radius, cfg.samples or DEFAULT_SAMPLES, cfg.winding)
    report = RunReport("ab", cfg.echo())
    phase = ab_phase(field, path)
    other = complementary_phase_hypothesis(field, path)
    check = complementarity_check(phase.canonical, other, cfg.tol)
    report.add(Quantity.phase("ab_phase", phase.raw))
    report.add(Quantity.phase("complementary_phase_hypothesis", other))
    report.add(Quantity.phase("complementarity_sum", check.sum, 0.0, cfg.tol))
    report.details["winding_number"] = phase.winding
    report.details["complementary_phase_is_hypothesis"] = True
    report.flags = {"vanishes": check.vanishes}
    return report


def cmd_classify_exchange(theta: float, dimension: int = 2) -> RunReport:
    x = ExchangePhase(theta, dimension)
    kind = classify(x)
    report = RunReport("classify-exchange", {"theta": theta, "dimension": dimension})
    report.add(Quantity.phase("exchange_phase", x.theta))
    report.add(Quantity.phase("circulation_phase", circulation_phase(x)))
    report.details["classification"] = kind.name
    return report


def cmd_check_complementarity(phase_a: float, phase_b: float, tol: float = 1e-9) -> RunReport:
    check = complementarity_check(phase_a, phase_b, tol)
    report = RunReport("check-complementarity", {"phase_a": phase_a, "phase_b": phase_b, "tol": tol})
    report.add(Quantity.phase("sum", check.sum, 0.0, tol))
    report.flags = {"vanishes": check.vanishes}
    return report


# --------------------------------------------------------------------------
# argument handling

_S = argparse.SUPPRESS


def _add_common(p):
    p.add_argument("--config", default=_S, help="key = value config file; flags override it")
    p.add_argument("--format", default=_S, help="json (default) or csv")
    p.add_argument("--output", "-o", default=_S, help="write the report here instead of stdout")


def _add_path(p):
    p.add_argument("--center", default=_S, help="circle center 'cx,cy'")
    p.add_argument("--radius", default=_S)
    p.add_argument("--winding", default=_S)
    p.add_argument("--samples", default=_S)
    p.add_argument("--vertices", default=_S, help="JSON list of points (closed polygon)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="holonomy-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo-spinor", help="the two-level example end to end")
    p.add_argument("--samples", default=_S)
    _add_common(p)

    p = sub.add_parser("berry", help="loop phase of a band around a closed parameter path")
    p.add_argument("--family", default=_S, help=f"builtin family: {', '.join(sorted(BUILTINS))}")
    p.add_argument("--dsl", default=_S, help="matrix text, e.g. '[[x, y],[y, -x]]'")
    p.add_argument("--dsl-file", dest="dsl_file", default=_S)
    p.add_argument("--params", default=_S, help="comma-separated parameter names")
    p.add_argument("--band", default=_S)
    p.add_argument("--gauge", default=_S, help="gauge phase expression in the parameters and t")
    p.add_argument("--gap-tol", dest="gap_tol", default=_S)
    p.add_argument("--convergence", action="store_const", const="true", default=_S)
    _add_path(p)
    _add_common(p)

    p = sub.add_parser("pancharatnam", help="phase of an explicit chain of kets")
    p.add_argument("--states", default=_S, help="JSON array of kets; amplitudes as [re, im]")
    p.add_argument("--open", dest="closed", action="store_const", const="false", default=_S)
    _add_common(p)

    p = sub.add_parser("ab", help="Aharonov-Bohm phase of a planar loop")
    p.add_argument("--flux", default=_S)
    p.add_argument("--solenoid-center", dest="solenoid_center", default=_S)
    p.add_argument("--tol", default=_S)
    _add_path(p)
    _add_common(p)

    p = sub.add_parser("classify-exchange", help="boson / fermion / anyon from an exchange phase")
    p.add_argument("--theta", default=_S)
    p.add_argument("--dimension", default=_S)
    _add_common(p)

    p = sub.add_parser("check-complementarity", help="does a pair of phases sum to zero mod 2 pi?")
    p.add_argument("phase_a", nargs="?", default=_S)
    p.add_argument("phase_b", nargs="?", default=_S)
    p.add_argument("--tol", default=_S)
    _add_common(p)
    return parser


def _run(cfg: RunConfig) -> RunReport:
    if cfg.command == "demo-spinor":
        return cmd_demo_spinor(cfg.samples or 10000)
    if cfg.command == "berry":
        return cmd_berry(cfg)
    if cfg.command == "pancharatnam":
        return cmd_pancharatnam(cfg)
    if cfg.command == "ab":
        return cmd_ab(cfg)
    if cfg.command == "classify-exchange":
        if cfg.theta is None:
            raise ConfigError("classify-exchange needs --theta")
        return cmd_classify_exchange(cfg.theta, cfg.dimension or 2)
    if cfg.command == "check-complementarity":
        if cfg.phase_a is None or cfg.phase_b is None:
            raise ConfigError("check-complementarity needs two phases")
        return cmd_check_complementarity(cfg.phase_a, cfg.phase_b, cfg.tol)
    raise ConfigError(f"unknown command {cfg.command!r}")


def main(argv=None) -> int:
    try:
        args = vars(make_parser().parse_args(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    command = args.pop("command")
    config_path = args.pop("config", None)
    try:
        file_values = load_config_file(config_path) if config_path else {}
        flags = {key: convert(key, value) for key, value in args.items()}
        cfg = build_config(command, file_values, flags)
        start = time.perf_counter()
        report = _run(cfg)
        report.wall_time = time.perf_counter() - start
        text = report.to_json() if cfg.format == "json" else report.to_csv()
        if cfg.output:
            Path(cfg.output).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    except ConfigError as exc:
        print(f"holonomy-lab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HolonomyError as exc:
        print(f"holonomy-lab: computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"holonomy-lab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
