"""Single-excitation dynamics and localization diagnostics for chirally
coupled 1D emitter chains with a clean/disordered zone interface."""

__version__ = "0.1.0"

from .analysis import (
    CrossoverEstimate,
    InterfaceProfile,
    crossover_from_dplr,
    crossover_from_gap_ratio,
    interface_profile,
)
from .ensemble import (
    EnsembleSpec,
    SweepSpec,
    derive_seeds,
    run_ensemble,
    run_spectrum_ensemble,
    run_sweep,
)
from .evolve import (
    AmplitudeTrajectory,
    TimeGrid,
    eigendecompose,
    linear_time_grid,
    log_time_grid,
    propagate,
)
from .model import (
    AmplitudeState,
    CouplingMatrix,
    DisorderRealization,
    SystemConfig,
    build_coupling_matrix,
    dicke_initial_state,
    sample_disorder,
    site_phases,
    zone_sites,
)
from .observables import (
    NORM_FLOOR,
    OBSERVABLE_KINDS,
    ObservableSeries,
    dplr,
    flux_series,
    half_chain_entropy,
    imbalance,
    participation_ratio,
    photon_flux,
    trajectory_series,
    zone_population,
)
from .spectral import (
    GapStatistics,
    R_BAR_GOE,
    R_BAR_POISSON,
    SpectralSample,
    aggregate_statistics,
    filter_levels,
    gap_ratios,
    realization_gap_ratios,
    sample_surmise_gap_ratios,
    weight_constrained_filter,
    zone_weights,
)

__all__ = [
    "__version__",
    "AmplitudeState",
    "AmplitudeTrajectory",
    "CouplingMatrix",
    "CrossoverEstimate",
    "DisorderRealization",
    "EnsembleSpec",
    "GapStatistics",
    "InterfaceProfile",
    "NORM_FLOOR",
    "OBSERVABLE_KINDS",
    "ObservableSeries",
    "R_BAR_GOE",
    "R_BAR_POISSON",
    "SpectralSample",
    "SweepSpec",
    "SystemConfig",
    "TimeGrid",
    "aggregate_statistics",
    "build_coupling_matrix",
    "crossover_from_dplr",
    "crossover_from_gap_ratio",
    "derive_seeds",
    "dicke_initial_state",
    "dplr",
    "eigendecompose",
    "filter_levels",
    "flux_series",
    "gap_ratios",
    "half_chain_entropy",
    "imbalance",
    "interface_profile",
    "linear_time_grid",
    "log_time_grid",
    "participation_ratio",
    "photon_flux",
    "propagate",
    "realization_gap_ratios",
    "run_ensemble",
    "run_spectrum_ensemble",
    "run_sweep",
    "sample_disorder",
    "sample_surmise_gap_ratios",
    "site_phases",
    "trajectory_series",
    "weight_constrained_filter",
    "zone_population",
    "zone_sites",
    "zone_weights",
]
