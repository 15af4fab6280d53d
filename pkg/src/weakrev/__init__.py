"""Weak-measurement reversal protection of damped multiqubit GHZ correlations.

Engines: an exact dense density-matrix engine for small systems and an O(n)
compact engine for protocol states; entanglement measures in stable closed
form with dense cross-checks; reversal-strength optimization; teleportation
and information-splitting fidelities; an experiment runner with a CLI.
"""

from .compact import (
    CompactGhzState,
    compact_apply_damping,
    compact_apply_reversal,
    compact_apply_weak,
    compact_from_gghz,
    compact_to_dense,
    protocol_compact,
    transmissivity,
)
from .dense import (
    DenseState,
    KrausPair,
    apply_channel_all_qubits,
    apply_single_qubit_map,
    damping_kraus,
    make_gghz,
    mask_first_m,
    negativity_dense,
    normalize_mask,
    partial_transpose,
    project_and_renormalize,
    protocol_dense,
    reversal_kraus,
    weak_kraus,
)
from .eig import HermEigResult, backend_name, herm_eigenvalues, singular_values
from .errors import (
    BracketError,
    DomainError,
    NumericalError,
    UnsupportedMeasureError,
    UsageError,
)
from .experiments import CsvRow, ExperimentConfig, emit_csv, run_experiment
from .fidelity import (
    BranchOutcome,
    FidelityReport,
    UnknownQubit,
    fidelity_is_closed,
    fidelity_tel_closed,
    report_fidelity,
    simulate_splitting_dense,
    simulate_teleportation_dense,
)
from .measures import (
    LnResult,
    MwResult,
    critical_p_closed_form,
    ln_block_eigenvalue,
    ln_epsilon_continued,
    ln_dense,
    mw_dense,
    mw_global_entanglement,
)
from .optimize import CriticalResult, OptResult, find_critical_p, maximize_over_r
from .params import GhzParams, ProtocolParams

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "BranchOutcome",
    "CompactGhzState",
    "CriticalResult",
    "CsvRow",
    "DenseState",
    "DomainError",
    "ExperimentConfig",
    "FidelityReport",
    "GhzParams",
    "HermEigResult",
    "KrausPair",
    "LnResult",
    "MwResult",
    "NumericalError",
    "OptResult",
    "ProtocolParams",
    "UnknownQubit",
    "UnsupportedMeasureError",
    "UsageError",
    "apply_channel_all_qubits",
    "apply_single_qubit_map",
    "backend_name",
    "compact_apply_damping",
    "compact_apply_reversal",
    "compact_apply_weak",
    "compact_from_gghz",
    "compact_to_dense",
    "critical_p_closed_form",
    "damping_kraus",
    "emit_csv",
    "fidelity_is_closed",
    "fidelity_tel_closed",
    "find_critical_p",
    "herm_eigenvalues",
    "ln_block_eigenvalue",
    "ln_epsilon_continued",
    "ln_dense",
    "make_gghz",
    "mask_first_m",
    "maximize_over_r",
    "mw_dense",
    "mw_global_entanglement",
    "negativity_dense",
    "normalize_mask",
    "partial_transpose",
    "project_and_renormalize",
    "protocol_compact",
    "protocol_dense",
    "report_fidelity",
    "reversal_kraus",
    "run_experiment",
    "singular_values",
    "transmissivity",
    "weak_kraus",
]
