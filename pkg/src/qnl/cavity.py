"""Isolated single-mode cavity holding N two-level atoms.

State: m light quanta and n = N - m excited atoms. Emission occurs at rate
n (m + 1) and absorption at rate (N - n) m, in units where the coupling is
one. The stationary photon-number law is binomial with mean N/2 and
variance N/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .ensemble import as_generator


@dataclass(frozen=True)
class CavityParams:
    N: int
    rate_scale: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("atom count must be a positive integer")


@dataclass(frozen=True)
class CavityState:
    m: int
    n: int

    def check(self, N: int) -> None:
        if not 0 <= self.m <= N or self.m + self.n != N:
            raise ValueError("invalid cavity state")


def statistical_weight(N: int, n: int) -> int:
    if not 0 <= n <= N:
        raise ValueError("n must lie in [0, N]")
    return math.comb(N, n)


def partition(N: int) -> int:
    return sum(statistical_weight(N, n) for n in range(N + 1))


def stationary_distribution(N: int) -> np.ndarray:
    """pr(m) = N! / (2^N m! (N - m)!) for m = 0..N."""
    if N < 1:
        raise ValueError("N must be at least 1")
    return np.array([math.comb(N, m) / 2.0**N for m in range(N + 1)])


def stationary_exact(N: int) -> list[Fraction]:
    return [Fraction(math.comb(N, m), 2**N) for m in range(N + 1)]


def moments(N: int) -> tuple[float, float]:
    pr = stationary_distribution(N)
    m = np.arange(N + 1)
    mean = float(pr @ m)
    return mean, float(pr @ (m - mean) ** 2)


def jump_rates(state: CavityState, N: int) -> tuple[int, int]:
    """(emission, absorption) = (n (m + 1), (N - n) m)."""
    state.check(N)
    return state.n * (state.m + 1), (N - state.n) * state.m


def detailed_balance_exact(N: int) -> bool:
    """pr(m+1) R_a(m+1) == pr(m) R_e(m) in rational arithmetic for every m."""
    pr = stationary_exact(N)
    for m in range(N):
        _, r_a = jump_rates(CavityState(m + 1, N - m - 1), N)
        r_e, _ = jump_rates(CavityState(m, N - m), N)
        if pr[m + 1] * r_a != pr[m] * r_e:
            return False
    return True


def drift(m, N: int):
    """Exact mean rate of change of m, (N - m)(m + 1) - m^2."""
    m = np.asarray(m)
    return (N - m) * (m + 1) - m * m


def drift_large_m(m, N: int):
    m = np.asarray(m, dtype=float)
    return N * m - 2.0 * m * m


@dataclass(frozen=True)
class CavityTrajectory:
    """Photon number before each jump and the holding time spent there."""

    N: int
    states: np.ndarray
    holds: np.ndarray

    @property
    def excited(self) -> np.ndarray:
        return self.N - self.states

    def occupancy(self) -> np.ndarray:
        """Time-weighted empirical law of m."""
        w = np.bincount(self.states, weights=self.holds, minlength=self.N + 1)
        return w / w.sum()

    def jump_times(self) -> np.ndarray:
        return np.concatenate(([0.0], np.cumsum(self.holds)))


def simulate(N: int, jumps: int, seed=None, start: int = 0, burn_in: int | None = None) -> CavityTrajectory:
    """Event-driven simulation of the jump process; the first ``burn_in`` jumps are dropped."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if not 0 <= start <= N:
        raise ValueError("start must lie in [0, N]")
    rng = as_generator(seed)
    if burn_in is None:
        burn_in = 10 * N
    total_jumps = int(jumps) + int(burn_in)
    m_grid = np.arange(N + 1)
    r_e = (N - m_grid) * (m_grid + 1)
    r_a = m_grid * m_grid
    tot = (r_e + r_a).astype(float)
    p_up = (r_e / tot).tolist()
    u = rng.random(total_jumps).tolist()
    states = np.empty(total_jumps, dtype=np.int64)
    m = start
    for k in range(total_jumps):
        states[k] = m
        m = m + 1 if u[k] < p_up[m] else m - 1
    holds = rng.standard_exponential(total_jumps) / tot[states]
    return CavityTrajectory(N, states[burn_in:], holds[burn_in:])


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def langevin_spectrum(N: int, omega, beta: float = 1.0):
    """Photon-number fluctuation spectrum (beta N^2 / 2) / (N^2 + W^2)."""
    omega = np.asarray(omega, dtype=float)
    return 0.5 * beta * N**2 / (N**2 + omega**2)


def langevin_variance(N: int, beta: float = 1.0) -> float:
    """Integral of the spectrum over all W, d W / 2 pi."""
    return beta * N / 4.0


def binned_series(traj: CavityTrajectory, dt: float) -> np.ndarray:
    """Average of m(t) over consecutive bins of width dt."""
    edges_t = traj.jump_times()
    cum = np.concatenate(([0.0], np.cumsum(traj.states * traj.holds)))
    nbins = int(edges_t[-1] / dt)
    grid = dt * np.arange(nbins + 1)
    integral = np.interp(grid, edges_t, cum)
    return np.diff(integral) / dt


@dataclass(frozen=True)
class SpectrumBands:
    centre: np.ndarray
    value: np.ndarray
    stderr: np.ndarray
    reference: np.ndarray


def estimate_spectrum(traj: CavityTrajectory, dt: float, band_edges, reference=None) -> SpectrumBands:
    """Band-averaged periodogram of m(t) with the bin-average sinc^2 removed.

    Standard errors come from the scatter of the periodogram within each
    band. ``reference``, a callable of W, is averaged over the same
    frequencies so that curvature inside a band does not bias comparisons.
    """
    x = binned_series(traj, dt)
    x = x - x.mean()
    T = x.size * dt
    spec = np.abs(np.fft.rfft(x) * dt) ** 2 / T
    omega = 2.0 * math.pi * np.fft.rfftfreq(x.size, dt)
    half = omega * dt / 2.0
    with np.errstate(invalid="ignore", divide="ignore"):
        sinc2 = np.where(half > 0, (np.sin(half) / half) ** 2, 1.0)
    spec = spec / sinc2
    centres, values, errors, refs = [], [], [], []
    for lo, hi in zip(band_edges[:-1], band_edges[1:]):
        sel = (omega >= lo) & (omega < hi)
        if sel.sum() < 2:
            raise ValueError(f"band [{lo}, {hi}) holds fewer than two frequencies")
        s = spec[sel]
        centres.append(float(omega[sel].mean()))
        values.append(float(s.mean()))
        errors.append(float(s.std(ddof=1) / math.sqrt(s.size)))
        refs.append(float(np.mean(reference(omega[sel]))) if reference is not None else math.nan)
    return SpectrumBands(np.array(centres), np.array(values), np.array(errors), np.array(refs))


def central_weight_ratio(N: int) -> float:
    """W(N/2) divided by its Gaussian estimate 2^N sqrt(2 / (pi N))."""
    return math.comb(N, N // 2) / (2.0**N * math.sqrt(2.0 / (math.pi * N)))
