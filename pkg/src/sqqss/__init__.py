"""Simulation of single-qubit quantum secret sharing with polarization-entangled pairs."""
from .attack import (
    EveStrategy,
    PerPhotonProbs,
    eve_success_closedform,
    eve_success_exact,
    eve_success_exact_lossy,
    eve_success_montecarlo,
    per_photon_probs,
    sweep_a2,
)
from .config import ConfigError, ExperimentConfig, load_config, save_config
from .protocol import (
    PhaseAction,
    RunRecord,
    SessionStats,
    Variant,
    purity_scan,
    reconstruct_secret,
    run_round,
    run_session,
    simulate_cheater_intercept_resend,
)
from .source import (
    SourceModel,
    emit,
    fidelity_from_visibility,
    purity_from_visibility,
    visibility_from_purity,
    x_basis_coefficients,
)

__version__ = "0.1.0"
