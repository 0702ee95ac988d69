"""Figure-class experiments: each produces a column-named results table.

Fixed-channel experiments (beam pattern, gains vs array size, rates vs
constraint / SNR) are deterministic; the gain-error and NOMA-vs-OMA
experiments are seeded Monte Carlo runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import allocation
from .allocation import InfeasibleRateError, SystemParams
from .arraymath import EffectiveChannel, beam_pattern, pattern_grid, steering_vector
from .beamformer import BeamformingRequest, solve_cm_beamforming
from .channels import ChannelScenario, sample_aoa_pair, trial_rng
from .config import ExperimentConfig
from .evaluation import gain_error, rates_case1, run_monte_carlo


@dataclass(frozen=True)
class ExperimentResult:
    columns: list[str]
    rows: list[list]
    feasible_points: int
    total_points: int


def _desired_gains(cfg: ExperimentConfig, n: int) -> tuple[float, float, float]:
    """Target beam gains (c1*, c2*) from the user-1 fraction rule, plus g.

    c1* = fraction * N; c2* takes the remaining budget. The fraction must
    not exceed |lambda1|^2 or user 1 alone would overrun the budget.
    """
    lam1, lam2 = cfg.channel.lambda1, cfg.channel.lambda2
    c1s = cfg.gain_fraction_user1 * n
    residual = n - c1s / lam1**2
    if residual < 0:
        raise InfeasibleRateError(
            f"user-1 gain fraction {cfg.gain_fraction_user1} exceeds |lambda1|^2",
            required=c1s / lam1**2,
            budget=float(n),
        )
    c2s = residual * lam2**2
    return c1s, c2s, math.sqrt(residual)


def _solve_for_gains(cfg: ExperimentConfig, n: int, omega1: float, omega2: float):
    c1s, c2s, g = _desired_gains(cfg, n)
    sol = solve_cm_beamforming(
        BeamformingRequest(
            a1=steering_vector(n, omega1),
            a2=steering_vector(n, omega2),
            gain_target=g,
            num_phases=cfg.phase_candidates,
        )
    )
    return c1s, c2s, sol


def run_beampattern(cfg: ExperimentConfig) -> ExperimentResult:
    """Designed beam pattern against the two-rectangle target pattern."""
    n = cfg.antennas
    ch = cfg.channel
    c1s, c2s, sol = _solve_for_gains(cfg, n, ch.omega1, ch.omega2)
    grid = pattern_grid(cfg.grid_points)
    designed = beam_pattern(sol.weights, grid)
    # target pattern: flat lobes of one beamwidth at each user direction
    level1 = c1s / ch.lambda1**2
    level2 = c2s / ch.lambda2**2
    ideal = np.where(
        np.abs(grid - ch.omega1) <= 1.0 / n,
        level1,
        np.where(np.abs(grid - ch.omega2) <= 1.0 / n, level2, 0.0),
    )
    rows = [
        [float(om), float(gd), float(gi)]
        for (om, gd), gi in zip(designed, ideal)
    ]
    return ExperimentResult(
        columns=["omega", "gain_designed", "gain_ideal"],
        rows=rows,
        feasible_points=1,
        total_points=1,
    )


def run_gain_vs_n(cfg: ExperimentConfig) -> ExperimentResult:
    """Designed vs target beam gains over a sweep of array sizes."""
    ch = cfg.channel
    rows = []
    for n in cfg.sweep:
        n = int(n)
        c1s, c2s, sol = _solve_for_gains(cfg, n, ch.omega1, ch.omega2)
        c1d = ch.lambda1**2 * sol.objective**2
        c2d = ch.lambda2**2 * sol.user2_amplitude**2
        rows.append([n, c1s, c2s, c1s + c2s, c1d, c2d, c1d + c2d])
    return ExperimentResult(
        columns=[
            "n",
            "c1_ideal",
            "c2_ideal",
            "sum_ideal",
            "c1_designed",
            "c2_designed",
            "sum_designed",
        ],
        rows=rows,
        feasible_points=len(rows),
        total_points=len(rows),
    )


def run_gain_error(cfg: ExperimentConfig) -> ExperimentResult:
    """Mean relative gain errors over random separated user directions.

    Per trial the two directions are redrawn under the beamwidth-separation
    constraint, the target gains follow the fraction rule, and errors are
    measured between designed and target gains.
    """
    ch = cfg.channel
    rows = []
    for n in cfg.sweep:
        n = int(n)
        errs = np.empty((cfg.trials, 3))
        for t in range(cfg.trials):
            rng = trial_rng(cfg.seed, t)
            omega1, omega2 = sample_aoa_pair(n, rng)
            c1s, c2s, sol = _solve_for_gains(cfg, n, omega1, omega2)
            report = gain_error(
                (
                    ch.lambda1**2 * sol.objective**2,
                    ch.lambda2**2 * sol.user2_amplitude**2,
                ),
                (c1s, c2s),
            )
            errs[t] = (report.err_user1, report.err_user2, report.err_sum)
        mean = errs.mean(axis=0)
        std = errs.std(axis=0)
        rows.append(
            [n, mean[0], std[0], mean[1], std[1], mean[2], std[2], cfg.trials]
        )
    return ExperimentResult(
        columns=[
            "n",
            "err_user1_mean",
            "err_user1_std",
            "err_user2_mean",
            "err_user2_std",
            "err_sum_mean",
            "err_sum_std",
            "trials",
        ],
        rows=rows,
        feasible_points=len(rows),
        total_points=len(rows),
    )


def _effective_pair(cfg: ExperimentConfig, params: SystemParams):
    """Fixed effective channels, relabeled so user 1 is the stronger one."""
    ch = cfg.channel
    eff1 = EffectiveChannel(ch.lambda1, ch.omega1, cfg.antennas)
    eff2 = EffectiveChannel(ch.lambda2, ch.omega2, cfg.antennas)
    if eff2.modulus > eff1.modulus:
        eff1, eff2 = eff2, eff1
        params = replace(params, r1=params.r2, r2=params.r1)
    return eff1, eff2, params


def _designed_rate_row(sweep_value: float, params: SystemParams, cfg: ExperimentConfig):
    """One sweep point of a rate experiment; NaNs mark infeasible points."""
    eff1, eff2, params = _effective_pair(cfg, params)
    nan_row = [sweep_value] + [math.nan] * 6
    try:
        alloc = allocation.allocate_case1(eff1.modulus, eff2.modulus, params)
    except InfeasibleRateError:
        return nan_row, False
    if not allocation.check_r1_feasibility(alloc, eff1.modulus, eff2.modulus, params):
        return nan_row, False
    g = math.sqrt(alloc.c2) / eff2.modulus
    sol = solve_cm_beamforming(
        BeamformingRequest(
            a1=eff1.steering(),
            a2=eff2.steering(),
            gain_target=g,
            num_phases=params.num_phases,
        )
    )
    r1d, r2d = rates_case1(
        eff1.vector(), eff2.vector(), sol.weights, alloc.p1, alloc.p2, params.noise_power
    )
    p = params.max_power
    s2 = params.noise_power
    r1b = math.log2(1.0 + alloc.c1 * p / (alloc.c2 * p + s2))
    r2b = math.log2(1.0 + alloc.c2 * p / s2)
    return [sweep_value, r1d, r2d, r1d + r2d, r1b, r2b, r1b + r2b], True


_RATE_COLUMNS = [
    "R1_designed",
    "R2_designed",
    "sum_designed",
    "R1_bound",
    "R2_bound",
    "sum_bound",
]


def run_rate_vs_constraint(cfg: ExperimentConfig) -> ExperimentResult:
    """Designed and bound rates while sweeping the common rate constraint."""
    rows, feasible = [], 0
    for r in cfg.sweep:
        params = SystemParams(
            num_antennas=cfg.antennas,
            max_power=cfg.power_mw,
            noise_power=cfg.noise_mw,
            r1=r,
            r2=r,
            num_phases=cfg.phase_candidates,
        )
        row, ok = _designed_rate_row(r, params, cfg)
        rows.append(row)
        feasible += ok
    return ExperimentResult(
        columns=["r"] + _RATE_COLUMNS,
        rows=rows,
        feasible_points=feasible,
        total_points=len(rows),
    )


def run_rate_vs_snr(cfg: ExperimentConfig) -> ExperimentResult:
    """Designed and bound rates while sweeping P/sigma^2 in dB."""
    rows, feasible = [], 0
    for snr_db in cfg.sweep:
        params = SystemParams(
            num_antennas=cfg.antennas,
            max_power=cfg.noise_mw * 10.0 ** (snr_db / 10.0),
            noise_power=cfg.noise_mw,
            r1=cfg.r1,
            r2=cfg.r2,
            num_phases=cfg.phase_candidates,
        )
        row, ok = _designed_rate_row(snr_db, params, cfg)
        rows.append(row)
        feasible += ok
    return ExperimentResult(
        columns=["snr_db"] + _RATE_COLUMNS,
        rows=rows,
        feasible_points=feasible,
        total_points=len(rows),
    )


def run_noma_vs_oma(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Monte Carlo NOMA (theoretical and practical) vs the OMA baseline."""
    sc = cfg.scenario
    scenarios = tuple(
        ChannelScenario(
            kind=sc.kind,
            num_paths=sc.paths,
            num_antennas=cfg.antennas,
            los_power=sc.los_power,
            nlos_path_power=sc.nlos_path_power,
            user_power_scale=scale,
        )
        for scale in sc.user_power_scales
    )
    rows, feasible = [], 0
    for value in cfg.sweep:
        if cfg.sweep_axis == "rate":
            r1 = r2 = value
            power = cfg.noise_mw * 10.0 ** (cfg.snr_db / 10.0)
        else:
            r1, r2 = cfg.r1, cfg.r2
            power = cfg.noise_mw * 10.0 ** (value / 10.0)
        params = SystemParams(
            num_antennas=cfg.antennas,
            max_power=power,
            noise_power=cfg.noise_mw,
            r1=r1,
            r2=r2,
            num_phases=cfg.phase_candidates,
        )
        stats = run_monte_carlo(scenarios, params, cfg.trials, cfg.seed, workers=workers)
        rows.append(
            [
                value,
                stats.means["sum_theory"],
                stats.stds["sum_theory"],
                stats.means["sum_practical"],
                stats.stds["sum_practical"],
                stats.means["oma_sum_rate"],
                stats.stds["oma_sum_rate"],
                stats.feasible_trials,
                stats.infeasible_trials,
            ]
        )
        feasible += stats.feasible_trials > 0
    return ExperimentResult(
        columns=[
            "r" if cfg.sweep_axis == "rate" else "snr_db",
            "sum_theoretical_mean",
            "sum_theoretical_std",
            "sum_practical_mean",
            "sum_practical_std",
            "oma_mean",
            "oma_std",
            "feasible_trials",
            "infeasible_trials",
        ],
        rows=rows,
        feasible_points=feasible,
        total_points=len(rows),
    )


RUNNERS = {
    "beampattern": run_beampattern,
    "gain-vs-n": run_gain_vs_n,
    "gain-error": run_gain_error,
    "rate-vs-constraint": run_rate_vs_constraint,
    "rate-vs-snr": run_rate_vs_snr,
    "noma-vs-oma": run_noma_vs_oma,
}


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Dispatch to the configured experiment."""
    runner = RUNNERS[cfg.experiment]
    if cfg.experiment == "noma-vs-oma":
        return runner(cfg, workers=workers)
    return runner(cfg)
