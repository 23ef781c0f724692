"""System-level simulator for non-terrestrial network downlinks.

Two experiments: (1) single-LEO multi-user capacity with user-centric
MMSE / location-based MMSE beamforming versus FR3/FR4 beam lattices, and
(2) UAV-assisted NOMA uplink energy-efficiency optimization versus a
greedy baseline.
"""

from .antenna import ArrayGeometry, BeamLattice, element_gain, generate_beam_lattice, steering_vector
from .channel import (
    ChannelMatrix,
    ImpairmentProfile,
    TerminalPopulation,
    apply_3gpp_impairments,
    build_clear_sky,
    drop_terminals,
    estimate_csi,
    infer_from_location,
)
from .config import LeoParams, ScenarioConfig, UavParams, load_config
from .errors import (
    ConfigurationError,
    ContractError,
    DomainError,
    InfeasibleError,
    NumericalError,
)
from .geometry import (
    GeometryContext,
    LinkGeometry,
    max_doppler,
    misalignment_interval,
    orbital_speed,
    propagation_delay,
    slant_range,
)
from .noma import (
    EEResult,
    NomaGrouping,
    UavScenarioParams,
    UplinkScenario,
    allocate_subcarriers,
    draw_uplink_scenario,
    ee_sweep,
    greedy_baseline,
    iterative_power_allocation,
    kmeans_cluster,
    select_k,
)
from .precoding import (
    LinkResult,
    PrecodingMatrix,
    capacity,
    compute_sinr,
    fr_transmit,
    lb_mmse_precoder,
    mmse_precoder,
    zf_precoder,
)
from .runner import ResultRecord, derive_drop_seed, emit_results, run, run_uav

__version__ = "0.1.0"
