"""Closed-form power control and beam-gain allocation for 2-user uplink NOMA.

Under idealized beamforming the two users' beam gains trade off linearly
along the budget line c1/|lambda1|^2 + c2/|lambda2|^2 = N. Both users
transmit at full power, and the sum rate is maximized by giving the weak
user exactly the gain its rate constraint requires and the strong user all
of the rest. Decoding the strong user first is provably at least as good as
the reverse order, which this module makes checkable by computing both.

Conventions: user 1 is the strong user (|lambda1| >= |lambda2|); powers are
in mW, rates in bps/Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

USER1 = 1
USER2 = 2

# Relative tolerance for the budget-line identity checks.
BUDGET_RTOL = 1e-9


class InfeasibleRateError(Exception):
    """A rate constraint cannot be met even with the whole gain budget."""

    def __init__(self, message: str, required: float, budget: float):
        super().__init__(message)
        self.required = required
        self.budget = budget


@dataclass(frozen=True)
class SystemParams:
    """Scalar scenario configuration.

    Attributes:
        num_antennas: array size N.
        max_power: per-user transmit power cap P (mW).
        noise_power: receiver noise power sigma^2 (mW).
        r1: minimum rate of user 1 (bps/Hz).
        r2: minimum rate of user 2 (bps/Hz).
        num_phases: candidate-phase count M for the beamforming sweep.
    """

    num_antennas: int
    max_power: float
    noise_power: float
    r1: float
    r2: float
    num_phases: int = 20

    def __post_init__(self):
        if self.num_antennas < 2:
            raise ValueError("num_antennas must be >= 2")
        if self.max_power <= 0 or self.noise_power <= 0:
            raise ValueError("max_power and noise_power must be positive")
        if self.r1 < 0 or self.r2 < 0:
            raise ValueError("rate constraints must be nonnegative")
        if self.num_phases < 1:
            raise ValueError("num_phases must be >= 1")


@dataclass(frozen=True)
class GainAllocation:
    """Power and beam-gain operating point (p1, p2, c1, c2) plus SIC order."""

    p1: float
    p2: float
    c1: float
    c2: float
    decode_first: int  # USER1 or USER2


def relabel_users(modulus_a: float, modulus_b: float) -> tuple[int, int]:
    """Order two users by channel modulus, strongest first.

    Returns indices (0 or 1) as (strong, weak); an exact tie keeps the input
    order so relabeling is deterministic.
    """
    if modulus_b > modulus_a:
        return 1, 0
    return 0, 1


def _check_ordering(lambda1: float, lambda2: float) -> None:
    if lambda2 <= 0:
        raise ValueError("channel moduli must be positive")
    if lambda1 < lambda2:
        raise ValueError(
            "user 1 must be the stronger user; relabel inputs "
            f"(got |lambda1|={lambda1}, |lambda2|={lambda2})"
        )


def _weak_user_budget_check(c2: float, lambda2: float, n: int) -> None:
    required = c2 / lambda2**2
    if required > n:
        raise InfeasibleRateError(
            f"user 2 needs normalized gain {required:.6g} but the array "
            f"budget is {n}",
            required=required,
            budget=float(n),
        )


def allocate_case1(
    lambda1: float, lambda2: float, params: SystemParams
) -> GainAllocation:
    """Optimal allocation when the strong user is decoded first.

    Both users transmit at full power. The weak user's gain is the smallest
    value meeting its rate constraint against noise only,
    c2 = (2^r2 - 1) * sigma^2 / P, and the strong user takes the remaining
    budget c1 = |lambda1|^2 * (N - c2 / |lambda2|^2).

    Raises:
        InfeasibleRateError: r2 is unreachable even with the whole budget.
        ValueError: inputs are not ordered |lambda1| >= |lambda2| > 0.
    """
    _check_ordering(lambda1, lambda2)
    p = params.max_power
    c2 = (2.0**params.r2 - 1.0) * params.noise_power / p
    _weak_user_budget_check(c2, lambda2, params.num_antennas)
    c1 = lambda1**2 * (params.num_antennas - c2 / lambda2**2)
    return GainAllocation(p1=p, p2=p, c1=c1, c2=c2, decode_first=USER1)


def allocate_case2(
    lambda1: float, lambda2: float, params: SystemParams
) -> GainAllocation:
    """Optimal allocation when the weak user is decoded first.

    The weak user now sees the strong user's signal as interference, so the
    smallest gain meeting its constraint is
    c2 = (|lambda1|^2*N*P + sigma^2)(2^r2 - 1)
         / ((1 + (|lambda1|^2/|lambda2|^2)(2^r2 - 1)) * P),
    never below the interference-free value of the other decoding order.
    """
    _check_ordering(lambda1, lambda2)
    p = params.max_power
    n = params.num_antennas
    t = 2.0**params.r2 - 1.0
    c2 = (lambda1**2 * n * p + params.noise_power) * t / (
        (1.0 + (lambda1**2 / lambda2**2) * t) * p
    )
    _weak_user_budget_check(c2, lambda2, n)
    c1 = lambda1**2 * (n - c2 / lambda2**2)
    return GainAllocation(p1=p, p2=p, c1=c1, c2=c2, decode_first=USER2)


def sum_rate_bound(alloc: GainAllocation, params: SystemParams) -> float:
    """Sum rate log2(1 + (c1*p1 + c2*p2) / sigma^2) at an allocation."""
    return math.log2(
        1.0 + (alloc.c1 * alloc.p1 + alloc.c2 * alloc.p2) / params.noise_power
    )


@dataclass(frozen=True)
class OrderComparison:
    """Both decoding orders' optimal allocations, with the winner selected."""

    case1: GainAllocation
    case2: GainAllocation
    bound_case1: float
    bound_case2: float

    @property
    def selected(self) -> GainAllocation:
        # decoding the strong user first never loses
        return self.case1


def choose_decoding_order(
    lambda1: float, lambda2: float, params: SystemParams
) -> OrderComparison:
    """Evaluate both decoding orders and select strong-user-first.

    The selected allocation is always the strong-user-first one; the weaker
    order's allocation and bound are retained so callers can verify the
    ordering numerically.
    """
    case1 = allocate_case1(lambda1, lambda2, params)
    case2 = allocate_case2(lambda1, lambda2, params)
    return OrderComparison(
        case1=case1,
        case2=case2,
        bound_case1=sum_rate_bound(case1, params),
        bound_case2=sum_rate_bound(case2, params),
    )


def check_r1_feasibility(
    alloc: GainAllocation,
    lambda1: float,
    lambda2: float,
    params: SystemParams,
) -> bool:
    """Whether the strong user's rate constraint holds at this allocation.

    The strong user's gain is already maximal given the weak user's
    constraint, so an infeasible r1 means the scenario itself has no
    solution; callers should report it rather than adjust the allocation.
    """
    r1 = math.log2(
        1.0 + alloc.c1 * alloc.p1 / (alloc.c2 * alloc.p2 + params.noise_power)
    )
    return r1 >= params.r1


def budget_residual(
    alloc: GainAllocation, lambda1: float, lambda2: float, n: int
) -> float:
    """Deviation of an allocation from the gain budget line, relative to N."""
    return (alloc.c1 / lambda1**2 + alloc.c2 / lambda2**2 - n) / n
