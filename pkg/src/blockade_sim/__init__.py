"""Nonreciprocal photon blockade in a pumped asymmetric atom-cavity system."""
from .amplitudes import (
    AmplitudeState,
    g2_approx,
    g2_from_amplitudes,
    g3_from_amplitudes,
    integrate_amplitudes,
    ode_steady_amplitudes,
    photon_population_amplitudes,
    steady_amplitudes,
)
from .blockade import (
    Blockade,
    Branch,
    PumpSetting,
    classify_blockade,
    nonreciprocal_ratio,
    optimal_pump_single,
    optimal_pump_two,
    poisson_deviation,
    select_branch,
    single_photon_resonance,
)
from .estimators import PhotonStatistics
from .hilbert import FockQubitSpace, Operator, make_space
from .lindblad import (
    DensityMatrix,
    Liouvillian,
    build_liouvillian,
    check_truncation,
    evolve,
    g2,
    g3,
    photon_distribution,
    steady_state,
)
from .model import (
    Direction,
    SystemParams,
    effective_drive,
    hamiltonian,
    non_hermitian_hamiltonian,
    output_decay,
    physical_units,
)
from .sweep import SweepConfig, load_config, load_preset, run_sweep

__version__ = "0.1.0"
