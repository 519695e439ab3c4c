"""Cascaded quantum light spectroscopy toolkit.

A driven two-level emitter feeds its Mollow-triplet output one way into
a target cavity (Jaynes-Cummings or optomechanical); weak internal
coupling of the target is detected as a deviation of the cavity's
photon statistics from the uncoupled baseline.
"""

from .analytic import OracleInput, discrepancy_report, g2_resonant, na_closed_form, na_resonant
from .hilbert import (
    HilbertSpace,
    SparseOperator,
    annihilation,
    embed,
    lowering_two_level,
    vectorize_left,
    vectorize_right,
)
from .models import (
    ConfigurationError,
    LiouvillianMatrix,
    ModelKind,
    ModelParams,
    assemble,
    cascaded_term,
    cavity_slot,
    dissipator,
    jc_hamiltonian,
    oms_hamiltonian,
    source_hamiltonian,
    space_for,
)
from .observables import (
    MollowWindows,
    PhotonStats,
    classify,
    deviation,
    expectation,
    find_mollow_windows,
    photon_stats,
    refined_maximum,
)
from .scan import GridSpec, ScanConfig, ScanResult, calibrate_windows, emit, load_config, parse_config, run_scan
from .steadystate import (
    NonUniqueSteadyStateError,
    SolverError,
    SteadyState,
    TruncationError,
    converge_truncation,
    solve,
)

__all__ = [
    "HilbertSpace", "SparseOperator", "annihilation", "lowering_two_level", "embed",
    "vectorize_left", "vectorize_right",
    "ModelKind", "ModelParams", "LiouvillianMatrix", "ConfigurationError",
    "source_hamiltonian", "jc_hamiltonian", "oms_hamiltonian",
    "dissipator", "cascaded_term", "assemble", "space_for", "cavity_slot",
    "SteadyState", "solve", "converge_truncation",
    "SolverError", "NonUniqueSteadyStateError", "TruncationError",
    "PhotonStats", "MollowWindows", "expectation", "photon_stats",
    "deviation", "find_mollow_windows", "refined_maximum", "classify",
    "OracleInput", "na_closed_form", "na_resonant", "g2_resonant", "discrepancy_report",
    "GridSpec", "ScanConfig", "ScanResult", "run_scan", "calibrate_windows",
    "emit", "load_config", "parse_config",
]
