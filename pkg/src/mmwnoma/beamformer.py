"""Constant-modulus beamforming toward two directions via a phase sweep.

Problem: choose w with |w_k| = 1/sqrt(N) for every antenna k, maximizing the
amplitude |a1^H w| toward the strong user subject to a floor |a2^H w| >= g
toward the weak user. The solver works through a chain of reformulations:

1. The modulus equalities are relaxed to convex disks |w_k| <= 1/sqrt(N).
   Nothing is lost: the maximizer constructed below has every entry on the
   disk boundary, so the relaxed optimum is feasible for the original
   constraint set.
2. The constraint |a2^H w| >= g is non-convex in w. Fixing the phase of
   a2^H w turns it into the linear constraint Re(e^{j*phi} a2^H w) >= g;
   sweeping phi over M candidates 2*pi*m/M (m = 1..M) and keeping the best
   solution recovers the free-phase optimum up to the sweep resolution.
3. Each fixed-phase program is convex and is solved exactly by dual
   bisection. The Lagrangian decouples per antenna: for multiplier mu >= 0
   the inner maximizer is w_k(mu) = q_k / (sqrt(N) |q_k|) with
   q_k = a1_k + mu e^{-j*phi} a2_k, and the constraint value
   Re(e^{j*phi} a2^H w(mu)) is non-decreasing in mu, so the active
   multiplier is a bisection root.

After the sweep the winning phase is polished by re-solving at
phi = -arg(a2^H w) until a2^H w is (numerically) real-positive under the
rotation. This removes the sweep-resolution overshoot in |a2^H w|, so the
weak user's amplitude lands on g whenever the constraint is active.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .allocation import GainAllocation, SystemParams, sum_rate_bound
from .arraymath import as_complex_vector

_MU_CAP = 2.0**61
_MAX_BISECT = 200
_MAX_POLISH = 60
_UNIT_MODULUS_TOL = 1e-9


class InfeasibleGainError(Exception):
    """The requested amplitude toward user 2 exceeds what any CM vector gives."""


@dataclass(frozen=True)
class BeamformingRequest:
    """Inputs of the two-direction CM beamforming problem.

    a1/a2 are the users' steering vectors (unit-modulus entries, equal
    length N); gain_target is the required amplitude g = |a2^H w|, feasible
    iff g <= sqrt(N). tol bounds the constraint residual of the solution.
    """

    a1: np.ndarray
    a2: np.ndarray
    gain_target: float
    num_phases: int = 20
    tol: float = 1e-8

    def __post_init__(self):
        a1 = as_complex_vector(self.a1)
        a2 = as_complex_vector(self.a2)
        if a1.size != a2.size:
            raise ValueError("a1 and a2 must have the same length")
        for name, a in (("a1", a1), ("a2", a2)):
            if np.max(np.abs(np.abs(a) - 1.0)) > _UNIT_MODULUS_TOL:
                raise ValueError(f"{name} entries must have unit modulus")
        if not math.isfinite(self.gain_target) or self.gain_target < 0:
            raise ValueError("gain_target must be finite and nonnegative")
        if self.num_phases < 1:
            raise ValueError("num_phases must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "a2", a2)


@dataclass(frozen=True)
class BeamformingSolution:
    """A CM beamforming vector with its achieved amplitudes.

    objective is |a1^H w|; user2_amplitude is |a2^H w| (>= g - tol).
    phase_index is the winning candidate m in 1..M (0 when the vector did
    not come from the sweep, e.g. the brute-force search). dual_mu is the
    constraint multiplier; 0 means the floor was inactive.
    """

    weights: np.ndarray
    objective: float
    user2_amplitude: float
    phase_index: int
    dual_mu: float
    constraint_active: bool


def _batch_weights(a1: np.ndarray, e2neg: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Inner dual maximizers, one row per phase candidate.

    q_k = a1_k + mu * e^{-j*phi} a2_k; entries with q_k = 0 (exact
    cancellation) take phase 0, which is optimal and deterministic.
    """
    q = a1[None, :] + mu[:, None] * e2neg
    mod = np.abs(q)
    safe = np.where(mod > 0, mod, 1.0)
    u = np.where(mod > 0, q / safe, 1.0 + 0.0j)
    return u / np.sqrt(a1.size)


def _solve_phase_batch(a1, a2, g, phases, tol):
    """Solve the fixed-phase programs for all rows of `phases` in lockstep.

    Returns (weights, z1, z2rot, mu) where z1[m] = a1^H w_m and
    z2rot[m] = e^{j*phi_m} a2^H w_m (its real part is the constraint value).
    """
    n = a1.size
    if g > math.sqrt(n) + tol:
        raise InfeasibleGainError(
            f"required amplitude {g:.6g} exceeds the array maximum sqrt({n})"
        )
    e2neg = np.exp(-1j * phases)[:, None] * a2[None, :]

    def constraint(w):
        # e^{j*phi} a2^H w, rowwise
        return np.sum(np.conj(e2neg) * w, axis=1)

    mu = np.zeros(phases.size)
    c_now = np.real(constraint(_batch_weights(a1, e2neg, mu)))
    search = c_now < g
    if np.any(search):
        lo = np.zeros(phases.size)
        hi = np.ones(phases.size)
        for _ in range(62):
            c_hi = np.real(constraint(_batch_weights(a1, e2neg, hi)))
            unsat = search & (c_hi < g) & (hi < _MU_CAP)
            if not np.any(unsat):
                break
            lo = np.where(unsat, hi, lo)
            hi = np.where(unsat, hi * 2.0, hi)
        c_hi = np.real(constraint(_batch_weights(a1, e2neg, hi)))
        # The cap is only reachable when g sits within tol of sqrt(N); the
        # asymptotic (a2-aligned) vector is then accepted if within tol.
        if np.any(search & (c_hi < g - tol)):
            raise InfeasibleGainError(
                f"required amplitude {g:.6g} not reachable within tolerance"
            )
        for _ in range(_MAX_BISECT):
            done = ~search | (c_hi - g <= tol) | (hi - lo <= 1e-15 * hi)
            if np.all(done):
                break
            mid = 0.5 * (lo + hi)
            c_mid = np.real(constraint(_batch_weights(a1, e2neg, mid)))
            take = ~done & search
            ge = c_mid >= g
            hi = np.where(take & ge, mid, hi)
            c_hi = np.where(take & ge, c_mid, c_hi)
            lo = np.where(take & ~ge, mid, lo)
        mu = np.where(search, hi, 0.0)

    # exactly at a cancellation crossing (a1_k antiparallel to mu e^{-j*phi}
    # a2_k) the maximizer direction is rounding noise; nudging mu upward
    # moves off the crossing and stays feasible because the constraint value
    # is non-decreasing in mu
    q_min = np.min(np.abs(a1[None, :] + mu[:, None] * e2neg), axis=1)
    shaky = (mu > 0) & (q_min < 1e-12 * (1.0 + mu))
    if np.any(shaky):
        mu = np.where(shaky, mu * (1.0 + 1e-9), mu)

    w = _batch_weights(a1, e2neg, mu)
    z1 = w @ np.conj(a1)
    z2rot = constraint(w)
    return w, z1, z2rot, mu


def _solution_from_row(w_row, z1, z2rot, mu, phase_index) -> BeamformingSolution:
    return BeamformingSolution(
        weights=w_row,
        objective=float(np.abs(z1)),
        user2_amplitude=float(np.abs(z2rot)),
        phase_index=phase_index,
        dual_mu=float(mu),
        constraint_active=bool(mu > 0),
    )


def solve_fixed_phase(a1, a2, g: float, phi: float, tol: float = 1e-8) -> BeamformingSolution:
    """Exactly solve one fixed-phase program.

    Maximizes Re(a1^H w) subject to Re(e^{j*phi} a2^H w) >= g and
    |w_k| <= 1/sqrt(N). If the floor already holds at mu = 0 the
    unconstrained maximizer (w aligned with a1) is returned; otherwise the
    multiplier is bisected until the constraint value meets g within tol.
    Every returned entry has modulus exactly 1/sqrt(N) by construction.

    Raises:
        InfeasibleGainError: g > sqrt(N) + tol.
    """
    a1 = as_complex_vector(a1)
    a2 = as_complex_vector(a2)
    if a1.size != a2.size:
        raise ValueError("a1 and a2 must have the same length")
    phases = np.asarray([float(phi)])
    w, z1, z2rot, mu = _solve_phase_batch(a1, a2, g, phases, tol)
    return _solution_from_row(w[0], z1[0], z2rot[0], mu[0], phase_index=0)


def _alignment_residual(z2rot: complex) -> float:
    """Misalignment angle of the rotated weak-user response e^{j*phi} a2^H w.

    Zero means the response is real-positive under its own candidate phase,
    i.e. |a2^H w| equals the constraint value exactly. Active solutions have
    Re >= g > 0, so the residual always lies inside (-pi/2, pi/2), and by the
    envelope theorem the objective's phase derivative is proportional to
    sin(residual): downward zero crossings of the residual are exactly the
    local maxima of the objective over the candidate phase.
    """
    return float(-np.angle(z2rot))


def _align_root(a1, a2, g, tol, pa, fa, pb, fb):
    """Illinois root-find for the aligned phase inside a bracketing interval.

    (pa, fa) and (pb, fb) are phases and alignment residuals with a sign
    change between them. Returns (solution, phase) at alignment, or None if
    the residual tolerance is not reached.
    """
    im_tol = math.sqrt((g + tol) * tol)
    for _ in range(_MAX_POLISH):
        if fb == fa:
            break
        x = (pa * fb - pb * fa) / (fb - fa)
        if not (min(pa, pb) < x < max(pa, pb)):
            x = 0.5 * (pa + pb)
        sol = solve_fixed_phase(a1, a2, g, x % (2.0 * np.pi), tol)
        if not sol.constraint_active:
            return None
        z2rot = np.exp(1j * x) * np.vdot(a2, sol.weights)
        if abs(z2rot.imag) <= im_tol:
            return sol, float(x % (2.0 * np.pi))
        fx = _alignment_residual(z2rot)
        if fx * fb < 0:
            pa, fa = pb, fb
        else:
            fa *= 0.5  # Illinois: damp the stale endpoint
        pb, fb = x, fx
    return None


def _downward_crossings(phases, rho, active):
    """Ring-adjacent phase intervals where rho crosses zero from above.

    Yields (phi_a, rho_a, phi_b, rho_b) with phi_b unwrapped past phi_a.
    """
    m = phases.size
    step = 2.0 * np.pi / m
    for a in range(m):
        b = (a + 1) % m
        if active[a] and active[b] and rho[a] >= 0 >= rho[b]:
            yield float(phases[a]), float(rho[a]), float(phases[a]) + step, float(rho[b])


def solve_cm_beamforming(req: BeamformingRequest) -> BeamformingSolution:
    """Sweep the M candidate phases, keep the best, and polish it.

    Candidates phi_m = 2*pi*m/M for m = 1..M are solved in lockstep;
    solutions are compared by the amplitude |a1^H w| (not the per-candidate
    real part) with ties going to the lowest m, so threaded and serial
    sweeps agree. The strongest few candidates are then phase-polished.

    Raises:
        InfeasibleGainError: gain_target > sqrt(N) + tol (no candidate is
            feasible).
    """
    a1, a2, g = req.a1, req.a2, req.gain_target
    m_count = req.num_phases
    phases = 2.0 * np.pi * np.arange(1, m_count + 1) / m_count
    w, z1, z2rot, mu = _solve_phase_batch(a1, a2, g, phases, req.tol)
    objectives = np.abs(z1)
    raw_idx = int(np.argmax(objectives))
    best = _solution_from_row(w[raw_idx], z1[raw_idx], z2rot[raw_idx], mu[raw_idx], raw_idx + 1)
    if not best.constraint_active:
        # the floor is slack at the sweep winner: w is fully aligned with a1,
        # which no constrained candidate can beat
        return best

    # ring of alignment residuals; tiny sweeps are widened so the zero
    # crossings of the residual are resolved
    if m_count >= 8:
        ring_phases, ring_rho, ring_active = phases, -np.angle(z2rot), mu > 0
    else:
        ring_phases = 2.0 * np.pi * np.arange(1, 17) / 16
        _, _, rz2rot, rmu = _solve_phase_batch(a1, a2, g, ring_phases, req.tol)
        ring_rho, ring_active = -np.angle(rz2rot), rmu > 0

    # every downward residual crossing is a local phase optimum; root-find
    # each and keep the best aligned solution
    aligned_best = None
    aligned_phi = 0.0
    for pa, fa, pb, fb in _downward_crossings(ring_phases, ring_rho, ring_active):
        found = _align_root(a1, a2, g, req.tol, pa, fa, pb, fb)
        if found is None:
            continue
        sol, phi = found
        if aligned_best is None or sol.objective > aligned_best.objective:
            aligned_best, aligned_phi = sol, phi

    # an aligned solution pins |a2^H w| to the floor exactly; prefer it
    # whenever it costs no more than the solver tolerance
    if aligned_best is not None and aligned_best.objective >= best.objective - req.tol:
        spacing = 2.0 * np.pi / m_count
        nearest = int(round(aligned_phi / spacing)) % m_count
        best = replace(aligned_best, phase_index=nearest if nearest else m_count)
    return best


def brute_force_beamformer(a1, a2, g: float, phase_levels: int) -> BeamformingSolution:
    """Exhaustive search over per-entry quantized phases (test oracle).

    Enumerates every w with w_k = exp(j*2*pi*q_k/phase_levels)/sqrt(N) and
    returns the feasible maximizer of |a1^H w|. Cost is phase_levels**N, so
    instances are capped at N <= 6, phase_levels <= 256 and 2**28 candidates.

    Raises:
        ValueError: instance too large.
        InfeasibleGainError: no enumerated vector satisfies |a2^H w| >= g.
    """
    a1 = as_complex_vector(a1)
    a2 = as_complex_vector(a2)
    if a1.size != a2.size:
        raise ValueError("a1 and a2 must have the same length")
    n = a1.size
    if n > 6:
        raise ValueError(f"instance too large: N={n} > 6")
    if not 1 <= phase_levels <= 256:
        raise ValueError("phase_levels must be in 1..256")
    if phase_levels**n > 2**28:
        raise ValueError(
            f"instance too large: {phase_levels}**{n} candidates exceed 2**28"
        )

    root_n = math.sqrt(n)
    ph = np.exp(2j * np.pi * np.arange(phase_levels) / phase_levels)

    def partial_sums(entries):
        # all Sum_k conj(entries[k]) * ph[q_k]; first entry varies slowest
        s = np.conj(entries[0]) * ph
        for e in entries[1:]:
            s = (s[:, None] + np.conj(e) * ph[None, :]).ravel()
        return s

    split = n // 2 if n > 1 else 1
    lead1 = partial_sums(a1[:split])
    lead2 = partial_sums(a2[:split])
    if split < n:
        tail1 = partial_sums(a1[split:])
        tail2 = partial_sums(a2[split:])
    else:
        tail1 = np.zeros(1, dtype=np.complex128)
        tail2 = np.zeros(1, dtype=np.complex128)

    g_scaled = g * root_n  # compare against unnormalized sums
    best_obj = -1.0
    best_pair = None
    block = max(1, 2**20 // tail1.size)
    for start in range(0, lead1.size, block):
        stop = min(start + block, lead1.size)
        t2 = np.abs(lead2[start:stop, None] + tail2[None, :])
        feasible = t2 >= g_scaled
        if not feasible.any():
            continue
        t1 = np.abs(lead1[start:stop, None] + tail1[None, :])
        t1 = np.where(feasible, t1, -1.0)
        flat = int(np.argmax(t1))
        val = float(t1.flat[flat])
        if val > best_obj:
            best_obj = val
            best_pair = (start + flat // tail1.size, flat % tail1.size)

    if best_pair is None:
        raise InfeasibleGainError(
            f"no quantized vector reaches amplitude {g:.6g} toward a2"
        )

    def decode(index, count):
        digits = []
        for _ in range(count):
            digits.append(index % phase_levels)
            index //= phase_levels
        return digits[::-1]  # first entry varies slowest

    digits = decode(best_pair[0], split) + decode(best_pair[1], n - split)
    weights = ph[np.asarray(digits)] / root_n
    return BeamformingSolution(
        weights=weights,
        objective=float(np.abs(np.vdot(a1, weights))),
        user2_amplitude=float(np.abs(np.vdot(a2, weights))),
        phase_index=0,
        dual_mu=math.nan,
        constraint_active=True,
    )


@dataclass(frozen=True)
class BeamVerification:
    """Post-hoc check of a beamforming solution against the rate targets."""

    cm_residual: float
    r1: float
    r2: float
    r1_met: bool
    r2_met: bool
    sum_rate: float
    bound: float


def verify_solution(
    sol: BeamformingSolution,
    req: BeamformingRequest,
    h1,
    h2,
    alloc: GainAllocation,
    params: SystemParams,
) -> BeamVerification:
    """Report CM residual, achieved rates (strong user decoded first), and bound."""
    w = as_complex_vector(sol.weights)
    h1 = as_complex_vector(h1)
    h2 = as_complex_vector(h2)
    if not (w.size == h1.size == h2.size == req.a1.size):
        raise ValueError("inconsistent vector lengths")
    cm_residual = float(np.max(np.abs(np.abs(w) - 1.0 / math.sqrt(w.size))))
    g1 = float(np.abs(np.vdot(h1, w)) ** 2)
    g2 = float(np.abs(np.vdot(h2, w)) ** 2)
    sigma2 = params.noise_power
    r1 = math.log2(1.0 + g1 * alloc.p1 / (g2 * alloc.p2 + sigma2))
    r2 = math.log2(1.0 + g2 * alloc.p2 / sigma2)
    return BeamVerification(
        cm_residual=cm_residual,
        r1=r1,
        r2=r2,
        r1_met=r1 >= params.r1,
        r2_met=r2 >= params.r2,
        sum_rate=r1 + r2,
        bound=sum_rate_bound(alloc, params),
    )
