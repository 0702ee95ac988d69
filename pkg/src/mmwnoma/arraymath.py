"""Complex-vector math for uniform linear arrays.

Half-wavelength ULA conventions throughout: a direction is described by the
cosine of its angle of arrival, Omega in [-1, 1], and the array response to
that direction is the steering vector with entries exp(j*pi*k*Omega) for
antenna index k = 0..N-1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def steering_vector(n: int, omega: float) -> np.ndarray:
    """Array response of an n-element half-wavelength ULA toward cos-AoA omega.

    Entry k is exp(j*pi*k*omega), so the squared two-norm is exactly n.

    Args:
        n: number of antennas, >= 1.
        omega: cosine of the angle of arrival, in [-1, 1].

    Returns:
        Complex array of shape (n,).
    """
    if n < 1:
        raise ValueError(f"antenna count must be >= 1, got {n}")
    if not np.isfinite(omega) or abs(omega) > 1:
        raise ValueError(f"cos-AoA must lie in [-1, 1], got {omega}")
    return np.exp(1j * np.pi * omega * np.arange(n))


def as_complex_vector(x) -> np.ndarray:
    """Validate and return a 1-D finite complex array (length >= 1)."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("expected a non-empty 1-D complex vector")
    if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
        raise ValueError("complex vector contains NaN or Inf entries")
    return v


@dataclass(frozen=True)
class MultipathChannel:
    """Sparse multipath channel: a set of (complex coefficient, cos-AoA) paths.

    The full channel vector is the coefficient-weighted sum of the steering
    vectors of all paths.
    """

    coefficients: np.ndarray
    cos_aoas: np.ndarray
    num_antennas: int

    def __post_init__(self):
        coeffs = as_complex_vector(self.coefficients)
        aoas = np.asarray(self.cos_aoas, dtype=np.float64)
        if aoas.shape != coeffs.shape:
            raise ValueError("coefficients and cos_aoas must have equal length")
        if not np.all(np.isfinite(aoas)) or np.any(np.abs(aoas) > 1):
            raise ValueError("every cos-AoA must lie in [-1, 1]")
        if self.num_antennas < 1:
            raise ValueError("num_antennas must be >= 1")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "cos_aoas", aoas)

    @property
    def num_paths(self) -> int:
        return self.coefficients.size

    def vector(self) -> np.ndarray:
        """Full channel vector: sum over paths of coeff * steering vector."""
        h = np.zeros(self.num_antennas, dtype=np.complex128)
        for lam, omega in zip(self.coefficients, self.cos_aoas):
            h += lam * steering_vector(self.num_antennas, omega)
        return h


@dataclass(frozen=True)
class EffectiveChannel:
    """Single-path approximation of a multipath channel: lambda * a(N, Omega)."""

    coefficient: complex
    cos_aoa: float
    num_antennas: int

    def __post_init__(self):
        if abs(self.coefficient) == 0:
            raise ValueError("effective channel coefficient must be nonzero")
        if not np.isfinite(self.cos_aoa) or abs(self.cos_aoa) > 1:
            raise ValueError("cos-AoA must lie in [-1, 1]")
        if self.num_antennas < 1:
            raise ValueError("num_antennas must be >= 1")

    @property
    def modulus(self) -> float:
        return abs(self.coefficient)

    def steering(self) -> np.ndarray:
        return steering_vector(self.num_antennas, self.cos_aoa)

    def vector(self) -> np.ndarray:
        return self.coefficient * self.steering()


def effective_channel(ch: MultipathChannel) -> EffectiveChannel:
    """Reduce a multipath channel to its strongest path.

    Selects the path with the largest coefficient modulus; ties are broken by
    the lowest path index so the reduction is deterministic.
    """
    moduli = np.abs(ch.coefficients)
    m = int(np.argmax(moduli))  # argmax returns the first maximal index
    return EffectiveChannel(
        coefficient=complex(ch.coefficients[m]),
        cos_aoa=float(ch.cos_aoas[m]),
        num_antennas=ch.num_antennas,
    )


def beam_gain(h, w) -> float:
    """Power gain |h^H w|^2 of beamforming vector w toward channel vector h."""
    h = as_complex_vector(h)
    w = as_complex_vector(w)
    if h.size != w.size:
        raise ValueError(f"length mismatch: {h.size} vs {w.size}")
    return float(np.abs(np.vdot(h, w)) ** 2)


def pattern_grid(points: int = 1001) -> np.ndarray:
    """Uniform cos-AoA grid over [-1, 1] (default 1001 points)."""
    if points < 1:
        raise ValueError("grid needs at least one point")
    return np.linspace(-1.0, 1.0, points)


def beam_pattern(w, grid) -> np.ndarray:
    """Beam pattern of w: gain |a(N, Omega)^H w|^2 at each grid direction.

    Args:
        w: beamforming vector of length N.
        grid: cos-AoA sample points, each in [-1, 1].

    Returns:
        Array of shape (len(grid), 2) with columns (omega, gain).
    """
    w = as_complex_vector(w)
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-D array")
    if not np.all(np.isfinite(grid)) or np.any(np.abs(grid) > 1):
        raise ValueError("grid points must lie in [-1, 1]")
    # a(N, Omega)^H w for all grid points at once
    phases = np.exp(-1j * np.pi * np.outer(grid, np.arange(w.size)))
    gains = np.abs(phases @ w) ** 2
    return np.column_stack([grid, gains])
