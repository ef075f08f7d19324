"""Steady-state heat transport and photon squeezing in a quadratically
coupled qubit-resonator system, via the dressed population master equation
with full counting statistics."""

__version__ = "0.1.0"

from .baths import (
    BathSpec,
    RateSet,
    bose_occupation,
    build_rate_set,
    qubit_rates,
    resonator_rates,
    spectral_density,
)
from .counting import (
    CumulantResult,
    TiltedGenerator,
    build_generator,
    cumulants_fd,
    cumulants_perturbative,
    direct_current,
    dominant_eigenvalue,
    steady_state,
)
from .observables import (
    RectificationResult,
    SqueezingResult,
    WeakCouplingCurrent,
    detect_ndtc,
    quadrature_variance,
    rectification,
    squeezing_factor,
    weak_coupling_current,
)
from .overlaps import (
    OverlapTable,
    SqueezeMismatch,
    brute_force_overlap,
    overlap,
    overlap_table,
)
from .spectrum import (
    BranchData,
    SystemParams,
    brute_force_spectrum,
    build_branch,
    build_branches,
    eigen_energy,
    energy_levels,
    validate_params,
)
from .sweep import (
    AxisSpec,
    SweepConfig,
    SweepRecord,
    compute_point,
    emit_csv,
    figure_preset,
    parse_config,
    run_sweep,
)

__all__ = [
    "AxisSpec",
    "BathSpec",
    "BranchData",
    "CumulantResult",
    "OverlapTable",
    "RateSet",
    "RectificationResult",
    "SqueezeMismatch",
    "SqueezingResult",
    "SweepConfig",
    "SweepRecord",
    "SystemParams",
    "TiltedGenerator",
    "WeakCouplingCurrent",
    "bose_occupation",
    "brute_force_overlap",
    "brute_force_spectrum",
    "build_branch",
    "build_branches",
    "build_generator",
    "build_rate_set",
    "compute_point",
    "cumulants_fd",
    "cumulants_perturbative",
    "detect_ndtc",
    "direct_current",
    "dominant_eigenvalue",
    "eigen_energy",
    "emit_csv",
    "energy_levels",
    "figure_preset",
    "overlap",
    "overlap_table",
    "parse_config",
    "quadrature_variance",
    "qubit_rates",
    "rectification",
    "resonator_rates",
    "run_sweep",
    "spectral_density",
    "squeezing_factor",
    "steady_state",
    "validate_params",
    "weak_coupling_current",
]
