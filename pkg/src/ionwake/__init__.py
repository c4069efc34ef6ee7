"""ionwake: concurrent tunneling ionization and strong-field excitation
of a two-level ionic system driven by intense low-frequency pulses.

Two propagators share one physical model: a reference density-matrix
integration of the diabatic equation of motion, and a quasistatic
semi-analytic solution built in the adiabatic (instantaneous eigenstate)
basis.  Analysis utilities quantify where the quasistatic picture holds,
decompose the ionization source terms, and locate the odd-order
phase-matching wavelengths of the coherence buildup.
"""

__version__ = "0.1.0"

from .adiabatic import (
    adiabatic_energy,
    adiabatic_to_diabatic,
    default_grid,
    diabatic_to_adiabatic,
    dynamic_phase,
    mixing_angle,
    sample_dynamics,
    semianalytic_evolve,
    source_matrix_adiabatic,
)
from .analysis import (
    CepResponse,
    CoherenceSplit,
    Diagnostics,
    PopulationDecomposition,
    SecondOrderDeviation,
    UndefinedMetricError,
    WeakCouplingParams,
    buildup_function,
    cep_response,
    coherent_fraction,
    decompose_coherence,
    decompose_population,
    diagnostics,
    halfcycle_increments,
    phase_matching_wavelength,
    qsa_error,
    rise_window,
    second_order_consistency,
    second_order_sources,
    sign_pattern,
    weak_coupling_coherence,
)
from .pulse import (
    InvalidPulseError,
    LaserPulse,
    PulseParams,
    TimeGrid,
    derive_pulse_parameters,
    envelope_at,
    field_at,
    make_pulse,
    single_cycle_duration,
)
from .reference import IntegrationError, Tolerances, solve_diabatic
from .sweep import ConfigError, ScanAxis, ScanSpec, load_config, run_scan, spec_from_config
from .trajectory import DensityState, Trajectory, write_trajectory_csv
from .tunneling import (
    N2_CHANNEL2_CALIBRATION,
    IonChannel,
    SourceMatrix,
    Subchannel,
    TwoLevelIonSystem,
    ionization_amplitude,
    n2_calibrated,
    n2_preset,
    source_matrix_diabatic,
    static_rate,
    survival_probability,
    total_rate,
)

__all__ = [
    "__version__",
    "adiabatic_energy",
    "adiabatic_to_diabatic",
    "default_grid",
    "diabatic_to_adiabatic",
    "dynamic_phase",
    "mixing_angle",
    "sample_dynamics",
    "semianalytic_evolve",
    "source_matrix_adiabatic",
    "CepResponse",
    "CoherenceSplit",
    "Diagnostics",
    "PopulationDecomposition",
    "SecondOrderDeviation",
    "UndefinedMetricError",
    "WeakCouplingParams",
    "buildup_function",
    "cep_response",
    "coherent_fraction",
    "decompose_coherence",
    "decompose_population",
    "diagnostics",
    "halfcycle_increments",
    "phase_matching_wavelength",
    "qsa_error",
    "rise_window",
    "second_order_consistency",
    "second_order_sources",
    "sign_pattern",
    "weak_coupling_coherence",
    "InvalidPulseError",
    "LaserPulse",
    "PulseParams",
    "TimeGrid",
    "derive_pulse_parameters",
    "envelope_at",
    "field_at",
    "make_pulse",
    "single_cycle_duration",
    "IntegrationError",
    "Tolerances",
    "solve_diabatic",
    "ConfigError",
    "ScanAxis",
    "ScanSpec",
    "load_config",
    "run_scan",
    "spec_from_config",
    "DensityState",
    "Trajectory",
    "write_trajectory_csv",
    "IonChannel",
    "SourceMatrix",
    "Subchannel",
    "TwoLevelIonSystem",
    "ionization_amplitude",
    "N2_CHANNEL2_CALIBRATION",
    "n2_calibrated",
    "n2_preset",
    "source_matrix_diabatic",
    "static_rate",
    "survival_probability",
    "total_rate",
]
