"""Seeded stochastic generation of sparse mmWave multipath channels.

All randomness flows through numpy's PCG64 generator (``np.random.default_rng``)
so that runs are reproducible from a single 64-bit seed and portable across
platforms. Monte Carlo substreams are derived as ``base_seed + trial_index``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arraymath import MultipathChannel

LOS = "los"
NLOS = "nlos"


@dataclass(frozen=True)
class ChannelScenario:
    """Statistical description of one user's multipath channel.

    For ``kind="los"`` path 0 is the line-of-sight path with a constant
    modulus sqrt(los_power) and uniformly random phase; the remaining paths
    are i.i.d. circular complex Gaussian with per-path average power
    nlos_path_power. For ``kind="nlos"`` all paths are Gaussian.

    user_power_scale multiplies every path amplitude, so average powers scale
    by its square; it is how a weaker user is configured.
    """

    kind: str
    num_paths: int
    num_antennas: int
    nlos_path_power: float
    los_power: float = 1.0
    user_power_scale: float = 1.0

    def __post_init__(self):
        if self.kind not in (LOS, NLOS):
            raise ValueError(f"kind must be '{LOS}' or '{NLOS}', got {self.kind!r}")
        if self.num_paths < 1:
            raise ValueError("num_paths must be >= 1")
        if self.num_antennas < 1:
            raise ValueError("num_antennas must be >= 1")
        if self.nlos_path_power < 0 or self.los_power < 0:
            raise ValueError("path powers must be nonnegative")
        if self.user_power_scale <= 0:
            raise ValueError("user_power_scale must be positive")


def as_rng(seed_or_rng) -> np.random.Generator:
    """Accept an integer seed or a Generator and return a Generator."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def trial_rng(base_seed: int, trial_index: int) -> np.random.Generator:
    """Per-trial PCG64 substream, seeded with base_seed + trial_index."""
    return np.random.default_rng(int(base_seed) + int(trial_index))


def sample_aoa_pair(n: int, seed_or_rng) -> tuple[float, float]:
    """Draw two user cos-AoAs, uniform on [-1, 1], with angular separation.

    Rejection-samples until 2/n < |omega1 - omega2| < 2 - 2/n, i.e. the users
    are at least one beamwidth apart and not aliased onto the same response.

    Args:
        n: number of antennas (>= 3; the constraint is unsatisfiable at n = 2).
        seed_or_rng: integer seed or numpy Generator.
    """
    if n < 2:
        raise ValueError("need at least 2 antennas")
    lo = 2.0 / n
    hi = 2.0 - 2.0 / n
    if lo >= hi:
        raise ValueError(f"separation constraint is unsatisfiable for n={n}")
    rng = as_rng(seed_or_rng)
    while True:
        omega1, omega2 = rng.uniform(-1.0, 1.0, size=2)
        if lo < abs(omega1 - omega2) < hi:
            return float(omega1), float(omega2)


def sample_path_aoas(num_paths: int, seed_or_rng) -> np.ndarray:
    """Per-path cos-AoAs, i.i.d. uniform on [-1, 1] (no separation imposed)."""
    rng = as_rng(seed_or_rng)
    return rng.uniform(-1.0, 1.0, size=num_paths)


def sample_channel(scenario: ChannelScenario, aoas, seed_or_rng) -> MultipathChannel:
    """Draw path coefficients for the given AoAs under a channel scenario.

    Draw order is fixed (LOS phase first, then the Gaussian block) so a given
    (scenario, aoas, seed) triple always produces the identical channel.

    Args:
        scenario: statistical channel description.
        aoas: cos-AoA per path; length must equal scenario.num_paths.
        seed_or_rng: integer seed or numpy Generator.
    """
    aoas = np.asarray(aoas, dtype=np.float64)
    if aoas.shape != (scenario.num_paths,):
        raise ValueError(
            f"expected {scenario.num_paths} AoAs, got shape {aoas.shape}"
        )
    rng = as_rng(seed_or_rng)
    scale = scenario.user_power_scale
    coeffs = np.empty(scenario.num_paths, dtype=np.complex128)
    start = 0
    if scenario.kind == LOS:
        phase = rng.uniform(0.0, 2.0 * np.pi)
        coeffs[0] = np.sqrt(scenario.los_power) * scale * np.exp(1j * phase)
        start = 1
    n_gauss = scenario.num_paths - start
    if n_gauss > 0:
        # circular complex Gaussian with E|coeff|^2 = nlos_path_power * scale^2
        sigma = np.sqrt(scenario.nlos_path_power / 2.0) * scale
        re = rng.standard_normal(n_gauss)
        im = rng.standard_normal(n_gauss)
        coeffs[start:] = sigma * (re + 1j * im)
    return MultipathChannel(
        coefficients=coeffs, cos_aoas=aoas, num_antennas=scenario.num_antennas
    )
