"""Rate evaluation, OMA baseline, gain-error metrics, and Monte Carlo trials.

A trial draws both users' multipath channels, reduces them to their
strongest paths, relabels users so user 1 is the stronger one, allocates
power and beam gains in closed form, designs the CM beamforming vector, and
evaluates rates twice: "theoretical" on the single-path effective channels
the design assumed, and "practical" on the full multipath channels.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import allocation
from .allocation import InfeasibleRateError, SystemParams
from .arraymath import beam_gain, effective_channel
from .beamformer import BeamformingRequest, solve_cm_beamforming
from .channels import ChannelScenario, sample_channel, sample_path_aoas, trial_rng

# retries for redrawing channels whose strongest paths land closer than the
# designed beamwidth; the acceptance region is most of the square, so this
# is effectively never exhausted
_MAX_CHANNEL_REDRAWS = 10_000


def rates_case1(h1, h2, w, p1: float, p2: float, sigma2: float) -> tuple[float, float]:
    """Achievable rates when user 1 is decoded first (user 2 seen as noise).

    R1 = log2(1 + |h1^H w|^2 p1 / (|h2^H w|^2 p2 + sigma^2))
    R2 = log2(1 + |h2^H w|^2 p2 / sigma^2)
    """
    g1 = beam_gain(h1, w)
    g2 = beam_gain(h2, w)
    r1 = math.log2(1.0 + g1 * p1 / (g2 * p2 + sigma2))
    r2 = math.log2(1.0 + g2 * p2 / sigma2)
    return r1, r2


def rates_case2(h1, h2, w, p1: float, p2: float, sigma2: float) -> tuple[float, float]:
    """Achievable rates when user 2 is decoded first (user 1 seen as noise)."""
    g1 = beam_gain(h1, w)
    g2 = beam_gain(h2, w)
    r1 = math.log2(1.0 + g1 * p1 / sigma2)
    r2 = math.log2(1.0 + g2 * p2 / (g1 * p1 + sigma2))
    return r1, r2


def oma_sum_rate(lambda1: float, lambda2: float, n: int, power: float, sigma2: float) -> float:
    """Orthogonal baseline: users time-share, each with beam gain N/2.

    Each user transmits in half the time with instantaneous power 2P (same
    average power), so the sum rate is
    1/2 log2(1 + (N/2)|lambda1|^2 2P/sigma^2)
    + 1/2 log2(1 + (N/2)|lambda2|^2 2P/sigma^2).
    """
    half_gain = n / 2.0
    return 0.5 * math.log2(1.0 + half_gain * lambda1**2 * 2.0 * power / sigma2) + 0.5 * math.log2(
        1.0 + half_gain * lambda2**2 * 2.0 * power / sigma2
    )


@dataclass(frozen=True)
class GainErrorReport:
    """Relative errors of designed beam gains against their targets."""

    err_user1: float
    err_user2: float
    err_sum: float


def gain_error(designed: tuple[float, float], ideal: tuple[float, float]) -> GainErrorReport:
    """Relative gain errors err_i = |c_i - c_i*| / c_i*.

    A zero target with a nonnegative designed gain counts as zero error
    (nothing was asked for); the sum error uses the summed gains.
    """

    def rel(value: float, target: float) -> float:
        if target == 0:
            return 0.0 if value >= 0 else math.inf
        return abs(value - target) / target

    c1, c2 = designed
    c1s, c2s = ideal
    return GainErrorReport(
        err_user1=rel(c1, c1s),
        err_user2=rel(c2, c2s),
        err_sum=rel(c1 + c2, c1s + c2s),
    )


@dataclass(frozen=True)
class RateReport:
    """Per-user rates plus the allocation bound and OMA baseline."""

    r1: float
    r2: float
    sum_rate: float
    bound: float
    oma_sum_rate: float
    decode_first: int


@dataclass(frozen=True)
class TrialResult:
    """One Monte Carlo draw: channel, design, and both rate evaluations.

    feasible is False when the rate constraints cannot be met for the drawn
    channels (reports are then None). swapped records whether the configured
    users were relabeled so that user 1 is the stronger one.
    """

    feasible: bool
    swapped: bool
    theoretical: RateReport | None
    practical: RateReport | None
    gains: GainErrorReport | None
    infeasible_reason: str = ""


def _separated(omega1: float, omega2: float, n: int) -> bool:
    gap = abs(omega1 - omega2)
    return 2.0 / n < gap < 2.0 - 2.0 / n


def run_trial(
    scenarios: tuple[ChannelScenario, ChannelScenario],
    params: SystemParams,
    seed_or_rng,
) -> TrialResult:
    """Run one seeded end-to-end trial.

    Channels are redrawn until the two strongest paths are separated by more
    than one beamwidth (and less than its aliased complement), which is the
    regime the gain budget line models. Theoretical rates use the effective
    single-path channels; practical rates apply the same beamforming vector
    to the full multipath channels.
    """
    sc1, sc2 = scenarios
    if sc1.num_antennas != sc2.num_antennas or sc1.num_antennas != params.num_antennas:
        raise ValueError("scenario and system antenna counts disagree")
    rng = trial_rng(seed_or_rng, 0) if isinstance(seed_or_rng, int) else seed_or_rng
    n = params.num_antennas

    for _ in range(_MAX_CHANNEL_REDRAWS):
        ch1 = sample_channel(sc1, sample_path_aoas(sc1.num_paths, rng), rng)
        ch2 = sample_channel(sc2, sample_path_aoas(sc2.num_paths, rng), rng)
        eff1 = effective_channel(ch1)
        eff2 = effective_channel(ch2)
        if _separated(eff1.cos_aoa, eff2.cos_aoa, n):
            break
    else:
        raise RuntimeError("could not draw separated channels")

    # relabel so user 1 is the stronger user; rate constraints follow users
    strong, _ = allocation.relabel_users(eff1.modulus, eff2.modulus)
    swapped = strong == 1
    if swapped:
        eff1, eff2 = eff2, eff1
        ch1, ch2 = ch2, ch1
        params = replace(params, r1=params.r2, r2=params.r1)

    try:
        alloc = allocation.allocate_case1(eff1.modulus, eff2.modulus, params)
    except InfeasibleRateError as exc:
        return TrialResult(
            feasible=False,
            swapped=swapped,
            theoretical=None,
            practical=None,
            gains=None,
            infeasible_reason=f"weak-user rate unreachable: {exc}",
        )
    if not allocation.check_r1_feasibility(alloc, eff1.modulus, eff2.modulus, params):
        return TrialResult(
            feasible=False,
            swapped=swapped,
            theoretical=None,
            practical=None,
            gains=None,
            infeasible_reason="strong-user rate unreachable",
        )

    g = math.sqrt(alloc.c2) / eff2.modulus
    sol = solve_cm_beamforming(
        BeamformingRequest(
            a1=eff1.steering(),
            a2=eff2.steering(),
            gain_target=g,
            num_phases=params.num_phases,
        )
    )

    bound = allocation.sum_rate_bound(alloc, params)
    oma = oma_sum_rate(eff1.modulus, eff2.modulus, n, params.max_power, params.noise_power)

    def report(h1, h2) -> RateReport:
        r1, r2 = rates_case1(h1, h2, sol.weights, alloc.p1, alloc.p2, params.noise_power)
        return RateReport(
            r1=r1,
            r2=r2,
            sum_rate=r1 + r2,
            bound=bound,
            oma_sum_rate=oma,
            decode_first=alloc.decode_first,
        )

    designed = (
        eff1.modulus**2 * sol.objective**2,
        eff2.modulus**2 * sol.user2_amplitude**2,
    )
    return TrialResult(
        feasible=True,
        swapped=swapped,
        theoretical=report(eff1.vector(), eff2.vector()),
        practical=report(ch1.vector(), ch2.vector()),
        gains=gain_error(designed, (alloc.c1, alloc.c2)),
    )


_METRICS = (
    "r1_theory",
    "r2_theory",
    "sum_theory",
    "r1_practical",
    "r2_practical",
    "sum_practical",
    "bound",
    "oma_sum_rate",
    "err_user1",
    "err_user2",
    "err_sum",
)


@dataclass(frozen=True)
class MonteCarloStats:
    """Aggregates over the feasible trials of a Monte Carlo run."""

    trials: int
    feasible_trials: int
    infeasible_trials: int
    means: dict[str, float]
    stds: dict[str, float]


def _trial_row(result: TrialResult) -> list[float] | None:
    if not result.feasible:
        return None
    t, p, e = result.theoretical, result.practical, result.gains
    return [
        t.r1,
        t.r2,
        t.sum_rate,
        p.r1,
        p.r2,
        p.sum_rate,
        t.bound,
        t.oma_sum_rate,
        e.err_user1,
        e.err_user2,
        e.err_sum,
    ]


def _run_one(args) -> TrialResult:
    scenarios, params, base_seed, index = args
    return run_trial(scenarios, params, trial_rng(base_seed, index))


def run_monte_carlo(
    scenarios: tuple[ChannelScenario, ChannelScenario],
    params: SystemParams,
    trials: int,
    base_seed: int,
    workers: int = 1,
) -> MonteCarloStats:
    """Aggregate `trials` seeded trials (seed = base_seed + index).

    Trials are independent; with workers > 1 they run in a process pool.
    Results are reduced in trial order, so the aggregates do not depend on
    the degree of parallelism.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    jobs = [(scenarios, params, base_seed, i) for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        results = [_run_one(job) for job in jobs]

    rows = [row for row in map(_trial_row, results) if row is not None]
    if rows:
        data = np.asarray(rows)
        means = {k: float(v) for k, v in zip(_METRICS, data.mean(axis=0))}
        stds = {k: float(v) for k, v in zip(_METRICS, data.std(axis=0))}
    else:
        means = {k: math.nan for k in _METRICS}
        stds = {k: math.nan for k in _METRICS}
    return MonteCarloStats(
        trials=trials,
        feasible_trials=len(rows),
        infeasible_trials=trials - len(rows),
        means=means,
        stds=stds,
    )
