"""holonomy-lab: geometric phases of parameterized quantum systems.

Three routes to the same loop phase: discrete overlap (Pancharatnam)
products, Berry-connection loop integrals, and Aharonov-Bohm line
integrals of a solenoid vector potential.
"""
from ._kernels import BACKEND
from .aharonov_bohm import (
    PlanarPath,
    SolenoidField,
    ab_phase,
    complementarity_check,
    complementary_phase_hypothesis,
    vector_potential,
    winding_number,
)
from .berry import (
    GaugeFunction,
    apply_gauge,
    connection_numeric,
    loop_integral,
    loop_integral_quadrature,
    orthogonal_gauge_check,
    single_valuedness_audit,
)
from .dsl import HamiltonianFamily, builtin_spinor_family, parse_family
from .exchange import Anyon, Boson, ExchangePhase, Fermion, circulation_phase, classify
from .pancharatnam import (
    OverlapChain,
    in_phase,
    loop_phase_discrete,
    overlap_phase,
    parallel_transport,
    transitivity_defect,
)
from .phase import ParamPath, QuantumState, canonicalize_phase, phase_distance
from .spectral import EigenSystem, StateSection, continue_branch, detect_degeneracies, eigh

__version__ = "0.1.0"
