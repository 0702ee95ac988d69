"""Joint power control and constant-modulus analog beamforming for a
2-user uplink mmWave NOMA cell: closed-form gain allocation, a dual-bisection
CM beamformer, channel generators, and seeded figure-class experiments."""

__version__ = "0.1.0"

from .allocation import (
    GainAllocation,
    InfeasibleRateError,
    OrderComparison,
    SystemParams,
    allocate_case1,
    allocate_case2,
    check_r1_feasibility,
    choose_decoding_order,
    relabel_users,
    sum_rate_bound,
)
from .arraymath import (
    EffectiveChannel,
    MultipathChannel,
    beam_gain,
    beam_pattern,
    effective_channel,
    pattern_grid,
    steering_vector,
)
from .beamformer import (
    BeamformingRequest,
    BeamformingSolution,
    BeamVerification,
    InfeasibleGainError,
    brute_force_beamformer,
    solve_cm_beamforming,
    solve_fixed_phase,
    verify_solution,
)
from .channels import (
    ChannelScenario,
    sample_aoa_pair,
    sample_channel,
    sample_path_aoas,
    trial_rng,
)
from .evaluation import (
    GainErrorReport,
    MonteCarloStats,
    RateReport,
    TrialResult,
    gain_error,
    oma_sum_rate,
    rates_case1,
    rates_case2,
    run_monte_carlo,
    run_trial,
)

__all__ = [
    "__version__",
    "BeamVerification",
    "BeamformingRequest",
    "BeamformingSolution",
    "ChannelScenario",
    "EffectiveChannel",
    "GainAllocation",
    "GainErrorReport",
    "InfeasibleGainError",
    "InfeasibleRateError",
    "MonteCarloStats",
    "MultipathChannel",
    "OrderComparison",
    "RateReport",
    "SystemParams",
    "TrialResult",
    "allocate_case1",
    "allocate_case2",
    "beam_gain",
    "beam_pattern",
    "brute_force_beamformer",
    "check_r1_feasibility",
    "choose_decoding_order",
    "effective_channel",
    "gain_error",
    "oma_sum_rate",
    "pattern_grid",
    "rates_case1",
    "rates_case2",
    "relabel_users",
    "run_monte_carlo",
    "run_trial",
    "sample_aoa_pair",
    "sample_channel",
    "sample_path_aoas",
    "solve_cm_beamforming",
    "solve_fixed_phase",
    "steering_vector",
    "sum_rate_bound",
    "trial_rng",
    "verify_solution",
]
