"""Pendulum clock kept going by a weight that loses molecules at random.

Each one-second period the weight drops by ``dz``. With probability ``pr``
a molecule of mass ``m`` is picked up, which lowers the height from h to
h / (1 + m/M) and dissipates the energy m g h / (1 + m/M). The dissipation
events form a marked Poisson process on the integer periods whose marks
obey a linear recursion.
"""

from __future__ import annotations

import itertools
import math
from functools import partial
from dataclasses import dataclass

import numpy as np

from .constants import G_EARTH
from .ensemble import as_generator, map_runs
from .point_process import EventSeries, jackknife, periodogram


@dataclass(frozen=True)
class PendulumParams:
    M: float = 1.0
    m: float = 1e-3
    pr: float = 0.01
    dz: float = 1e-6
    g: float = G_EARTH
    period: float = 1.0

    def __post_init__(self):
        if min(self.M, self.m, self.pr, self.dz, self.g, self.period) <= 0:
            raise ValueError("all pendulum parameters must be positive")
        if self.pr > 1:
            raise ValueError("pr is a probability")

    @property
    def ratio(self) -> float:
        return self.m / self.M

    @property
    def shrink(self) -> float:
        """Height factor 1 / (1 + m/M) applied at each pick-up."""
        return 1.0 / (1.0 + self.ratio)


@dataclass(frozen=True)
class DerivedQuantities:
    mean_height: float
    mark: float
    lifetime: float
    power: float
    energy: float


def derived_quantities(p: PendulumParams) -> DerivedQuantities:
    """Small-parameter values of <h>, the mean mark, tau_p, <P_d> and <E>."""
    mean_height = p.M * p.dz / (p.m * p.pr)
    mark = p.m * p.g * mean_height
    return DerivedQuantities(
        mean_height=mean_height,
        mark=mark,
        lifetime=p.M * p.period / (p.pr * p.m),
        power=p.M * p.g * p.dz / p.period,
        energy=p.M * p.g * mean_height,
    )


def stationary_mean_height(p: PendulumParams) -> float:
    """Exact long-run mean height, dz / (pr (1 - shrink)); exceeds <h> by a factor 1 + m/M."""
    return p.dz / (p.pr * (1.0 - p.shrink))


def stationary_mean_mark(p: PendulumParams) -> float:
    """Exact mean dissipated energy per event, M g dz / pr."""
    return p.M * p.g * p.dz / p.pr


@dataclass(frozen=True)
class DissipationRecord:
    periods: np.ndarray
    marks: np.ndarray
    horizon: int
    first_mark: float

    def to_series(self) -> EventSeries:
        return EventSeries(self.periods.astype(float), float(self.horizon), self.marks)


def mark_step(p: PendulumParams):
    """The recursion mu_i = q mu_{i-1} + m g q dz (k_i - k_{i-1})."""
    q = p.shrink
    b = p.m * p.g * q * p.dz
    return lambda prev, gap: q * prev + b * gap


def simulate(p: PendulumParams, periods: int, seed=None, burn_in: int | None = None) -> DissipationRecord:
    """Events on periods 1..periods, starting at the stationary mean height ``burn_in`` periods earlier."""
    rng = as_generator(seed)
    if burn_in is None:
        burn_in = int(math.ceil(10.0 / p.pr))
    span = periods + burn_in
    chunks = []
    total = 0
    expected = int(span * p.pr * 1.05) + 64
    while total <= span:
        gaps = rng.geometric(p.pr, expected)
        chunks.append(gaps)
        total += int(gaps.sum())
    gaps = np.concatenate(chunks)
    k = np.cumsum(gaps) - burn_in
    # height just before the first event, then the recursion
    h0 = stationary_mean_height(p)
    first = p.m * p.g * p.shrink * (h0 + p.dz * (int(gaps[0]) - 1))
    step = mark_step(p)
    marks = np.fromiter(
        itertools.accumulate(gaps[1:].tolist(), step, initial=first), dtype=float, count=gaps.size
    )
    keep = (k >= 1) & (k <= periods)
    return DissipationRecord(k[keep], marks[keep], periods, first)


def check_recursion(record: DissipationRecord, p: PendulumParams) -> bool:
    """Replay the mark recursion on the kept events and compare bit for bit."""
    if record.marks.size < 2:
        return True
    step = mark_step(p)
    gaps = np.diff(record.periods).tolist()
    replay = list(itertools.accumulate(gaps, step, initial=float(record.marks[0])))
    return bool(np.array_equal(np.array(replay), record.marks))


def analytic_spectrum(omega, lifetime: float, mark: float, power: float):
    """(W tau)^2 / (1 + (W tau)^2) times mark * power."""
    x = np.asarray(omega, dtype=float) * lifetime
    return x * x / (1.0 + x * x) * mark * power


def frequency_indices(periods: int, lifetime: float, lo: float = 0.2, hi: float = 20.0) -> np.ndarray:
    """Integers n with W_n tau = 2 pi n tau / periods inside [lo, hi]."""
    scale = 2.0 * math.pi * lifetime / periods
    return np.arange(int(math.ceil(lo / scale)), int(math.floor(hi / scale)) + 1)


def band_edges_for(n_values: np.ndarray, min_width: int = 16, growth: float = 1.5) -> list[int]:
    """Integer band edges, each band at least ``min_width`` frequencies wide."""
    edges = [int(n_values[0])]
    end = int(n_values[-1]) + 1
    while edges[-1] < end:
        width = max(min_width, int(edges[-1] * (growth - 1.0)))
        nxt = edges[-1] + width
        if end - nxt < min_width:
            nxt = end
        edges.append(nxt)
    return edges


def _run(index: int, rng: np.random.Generator, p: PendulumParams, periods: int, n_values: np.ndarray):
    rec = simulate(p, periods, rng)
    pg = periodogram(rec.to_series(), n_values, rec.marks)
    return pg, float(rec.marks.sum()), float(rec.marks.size), check_recursion(rec, p)


def _mean_and_sem(per_run: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    runs = per_run.shape[0]
    return per_run.mean(axis=0), per_run.std(axis=0, ddof=1) / math.sqrt(runs)


@dataclass(frozen=True)
class SpectrumResult:
    omega_tau: np.ndarray
    sim: np.ndarray
    analytic: np.ndarray
    stderr: np.ndarray
    power: float
    power_err: float
    mean_mark: float
    mean_mark_err: float
    recursion_ok: bool


def spectrum_experiment(
    p: PendulumParams, periods: int, runs: int, seed: int, workers: int | None = None, min_width: int = 16
) -> SpectrumResult:
    """Band-averaged mark-weighted spectrum over W tau in [0.2, 20] against the closed form."""
    d = derived_quantities(p)
    n_values = frequency_indices(periods, d.lifetime)
    out = map_runs(partial(_run, p=p, periods=periods, n_values=n_values), runs, seed, workers)
    pg = np.array([o[0] for o in out]) / periods
    sums = np.array([o[1] for o in out])
    counts = np.array([o[2] for o in out])
    edges = band_edges_for(n_values, min_width)
    band = np.zeros((len(edges) - 1, n_values.size))
    for b, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        band[b] = ((n_values >= lo) & (n_values < hi)) / ((n_values >= lo) & (n_values < hi)).sum()
    omega = 2.0 * math.pi * n_values / periods
    target = band @ analytic_spectrum(omega, d.lifetime, d.mark, d.power)
    sim, err = _mean_and_sem(pg @ band.T)
    pw, pw_err = _mean_and_sem(sums / periods)
    mk, mk_err = jackknife(lambda s, c: s / c, sums, counts)
    return SpectrumResult(
        omega_tau=band @ (omega * d.lifetime),
        sim=sim,
        analytic=target,
        stderr=err,
        power=float(pw),
        power_err=float(pw_err),
        mean_mark=float(mk),
        mean_mark_err=float(mk_err),
        recursion_ok=all(o[3] for o in out),
    )
