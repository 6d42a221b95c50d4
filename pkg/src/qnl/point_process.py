"""Point processes on [0, T] and second-order estimators.

Generators return :class:`EventSeries`. Estimators work on an ensemble,
a sequence of independent series sharing one horizon, and report
delete-one-run jackknife standard errors.

Conventions
-----------
Rate D = <n>/T. Spectrum S(W) = <|sum_k m_k exp(i W t_k)|^2> / T at
W_n = 2 pi n / T, n >= 1 (m_k = 1 unless marks are used). Pair
correlation g(tau) normalised to 1 at long lags. Relative noise
N = S / D^2 - 1 / D. Windowed variance V(T') = var(n) / <n> - 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .core_math import RenewalLaw
from .ensemble import as_generator

__all__ = [
    "EventSeries",
    "CurveEstimate",
    "gen_poisson",
    "gen_inhomogeneous",
    "gen_renewal",
    "gen_darkroom",
    "gen_periodic",
    "thin",
    "superpose",
    "jackknife",
    "estimate_rate",
    "periodogram",
    "estimate_spectrum",
    "estimate_relative_noise",
    "band_reference",
    "bin_reference",
    "estimate_g",
    "estimate_variance_curve",
    "noise_from_correlation",
    "correlation_from_noise",
    "triangle_cosine_sum",
    "darkroom_g",
    "darkroom_spectrum",
    "darkroom_variance",
]


@dataclass(frozen=True)
class EventSeries:
    """Sorted event times in [0, horizon], with optional real marks."""

    times: np.ndarray
    horizon: float
    marks: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", t)
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if t.ndim != 1:
            raise ValueError("times must be one-dimensional")
        if t.size and (t[0] < 0 or t[-1] > self.horizon):
            raise ValueError("event times must lie in [0, horizon]")
        if t.size > 1 and np.any(np.diff(t) < 0):
            raise ValueError("event times must be sorted")
        if self.marks is not None:
            m = np.asarray(self.marks, dtype=float)
            if m.shape != t.shape:
                raise ValueError("marks must match times")
            object.__setattr__(self, "marks", m)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def rate(self) -> float:
        return len(self) / self.horizon


@dataclass(frozen=True)
class CurveEstimate:
    x: np.ndarray
    value: np.ndarray
    stderr: np.ndarray

    def zscore(self, target) -> np.ndarray:
        return (self.value - np.asarray(target)) / self.stderr


# ---------------------------------------------------------------- generators


def gen_poisson(rate: float, horizon: float, seed=None) -> EventSeries:
    if rate < 0:
        raise ValueError("rate must be non-negative")
    rng = as_generator(seed)
    n = rng.poisson(rate * horizon)
    return EventSeries(np.sort(rng.uniform(0.0, horizon, n)), horizon)


def _invert_increasing(func: Callable[[np.ndarray], np.ndarray], targets: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Solve func(t) = target for each target by bisection on [lo, hi]."""
    a = np.full(targets.shape, lo)
    b = np.full(targets.shape, hi)
    for _ in range(64):
        mid = 0.5 * (a + b)
        below = func(mid) < targets
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
    return 0.5 * (a + b)


def gen_inhomogeneous(
    rate_fn: Callable[[np.ndarray], np.ndarray],
    horizon: float,
    seed=None,
    cumulative: Callable[[np.ndarray], np.ndarray] | None = None,
    grid_points: int = 1 << 16,
) -> EventSeries:
    """Inhomogeneous Poisson process by time rescaling.

    A unit-rate process on [0, L(T)] is mapped back through the inverse of
    the cumulative rate L(t). Without a closed-form ``cumulative`` the rate
    is integrated on a uniform grid and inverted by linear interpolation.
    """
    rng = as_generator(seed)
    grid = np.linspace(0.0, horizon, grid_points)
    lam = np.asarray(rate_fn(grid), dtype=float)
    if np.any(lam < 0):
        raise ValueError("rate must be non-negative on [0, horizon]")
    if cumulative is None:
        cum = integrate.cumulative_trapezoid(lam, grid, initial=0.0)
        total = cum[-1]
        n = rng.poisson(total)
        u = np.sort(rng.uniform(0.0, total, n))
        times = np.interp(u, cum, grid)
    else:
        total = float(cumulative(np.array([horizon]))[0] - cumulative(np.array([0.0]))[0])
        n = rng.poisson(total)
        u = np.sort(rng.uniform(0.0, total, n))
        base = float(cumulative(np.array([0.0]))[0])
        times = _invert_increasing(lambda t: cumulative(t) - base, u, 0.0, horizon)
    return EventSeries(np.clip(times, 0.0, horizon), horizon)


def gen_renewal(
    law: RenewalLaw | Callable[[np.random.Generator, int], np.ndarray],
    horizon: float,
    seed=None,
    burn_in: float = 0.0,
) -> EventSeries:
    """Renewal process with i.i.d. intervals, first event drawn from t = -burn_in.

    ``law`` is a :class:`RenewalLaw` or a sampler ``f(rng, size)``. A burn-in
    of several mean intervals makes the retained record close to stationary.
    """
    rng = as_generator(seed)
    draw = law.sample if isinstance(law, RenewalLaw) else law
    mean = law.mean() if isinstance(law, RenewalLaw) else None
    span = horizon + burn_in
    chunk = int(span / mean * 1.1) + 64 if mean else 1024
    pieces = []
    last = 0.0
    while last <= span:
        gaps = np.asarray(draw(rng, chunk), dtype=float)
        t = last + np.cumsum(gaps)
        pieces.append(t)
        last = float(t[-1])
    t = np.concatenate(pieces) - burn_in
    t = t[(t >= 0.0) & (t <= horizon)]
    return EventSeries(t, horizon)


def gen_darkroom(tau_r: float, horizon: float, seed=None, origin: float | None = None) -> EventSeries:
    """Jittered comb: t_k = origin + k + u_k with u_k uniform on [0, tau_r).

    The comb alone is only periodically stationary, so by default its origin
    is drawn uniformly in [0, 1); pass ``origin=0`` for the bare lattice.
    Starting the comb at k = -ceil(tau_r) - 1 leaves no gap at t = 0.
    """
    if tau_r <= 0:
        raise ValueError("tau_r must be positive")
    rng = as_generator(seed)
    if origin is None:
        origin = rng.random()
    k = np.arange(-math.ceil(tau_r) - 1, math.floor(horizon) + 1, dtype=float) + origin
    t = np.sort(k + rng.uniform(0.0, tau_r, k.size))
    t = t[(t >= 0.0) & (t <= horizon)]
    return EventSeries(t, horizon)


def gen_periodic(horizon: float, period: float = 1.0) -> EventSeries:
    """Regular comb t_k = k * period for k = 1, 2, ... up to the horizon."""
    n = int(math.floor(horizon / period + 1e-12))
    return EventSeries(period * np.arange(1, n + 1, dtype=float), horizon)


def thin(series: EventSeries, pr: float, seed=None) -> EventSeries:
    """Keep each event independently with probability ``pr``."""
    if not 0.0 <= pr <= 1.0:
        raise ValueError("pr must lie in [0, 1]")
    rng = as_generator(seed)
    keep = rng.random(len(series)) < pr
    marks = series.marks[keep] if series.marks is not None else None
    return EventSeries(series.times[keep], series.horizon, marks)


def superpose(series: Sequence[EventSeries]) -> EventSeries:
    """Merge independent series sharing one horizon."""
    if not series:
        raise ValueError("need at least one series")
    horizon = series[0].horizon
    if any(s.horizon != horizon for s in series):
        raise ValueError("series must share the same horizon")
    t = np.concatenate([s.times for s in series])
    order = np.argsort(t, kind="stable")
    if all(s.marks is not None for s in series):
        marks = np.concatenate([s.marks for s in series])[order]
    else:
        marks = None
    return EventSeries(t[order], horizon, marks)


# ---------------------------------------------------------------- estimators


def jackknife(statistic: Callable[..., np.ndarray], *per_run: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Delete-one-run jackknife for a statistic of run-summed quantities.

    Each array in ``per_run`` has the run index first. ``statistic`` receives
    the arrays summed over runs (all runs, then each leave-one-out subset).
    """
    arrays = [np.asarray(a, dtype=float) for a in per_run]
    runs = arrays[0].shape[0]
    totals = [a.sum(axis=0) for a in arrays]
    full = np.asarray(statistic(*totals), dtype=float)
    if runs < 2:
        return full, np.full(full.shape, np.nan)
    loo = np.array([statistic(*[tot - a[i] for tot, a in zip(totals, arrays)]) for i in range(runs)], dtype=float)
    err = np.sqrt((runs - 1) / runs * np.sum((loo - loo.mean(axis=0)) ** 2, axis=0))
    return full, err


def _common_horizon(ensemble: Sequence[EventSeries]) -> float:
    if not ensemble:
        raise ValueError("empty ensemble")
    horizon = ensemble[0].horizon
    if any(s.horizon != horizon for s in ensemble):
        raise ValueError("all runs must share one horizon")
    return horizon


def estimate_rate(ensemble: Sequence[EventSeries]) -> tuple[float, float]:
    counts = np.array([len(s) for s in ensemble], dtype=float)
    horizons = np.array([s.horizon for s in ensemble], dtype=float)
    value, err = jackknife(lambda n, t: n / t, counts, horizons)
    return float(value), float(err)


def periodogram(series: EventSeries, n_values: Sequence[int], weights: np.ndarray | None = None) -> np.ndarray:
    """|sum_k w_k exp(i W_n t_k)|^2 at W_n = 2 pi n / T (not divided by T).

    Contiguous runs of n are evaluated by repeated multiplication with
    exp(i W_1 t_k), re-anchored with an exact exponential every 128 steps,
    so the cost is one complex product per event and frequency.
    """
    n_values = np.asarray(n_values, dtype=np.int64)
    if np.any(n_values < 1):
        raise ValueError("frequency indices must be >= 1")
    out = np.empty(n_values.size)
    if len(series) == 0:
        out[:] = 0.0
        return out
    w = np.ones(len(series)) if weights is None else np.asarray(weights, dtype=float)
    base = 2.0 * math.pi / series.horizon
    phase = base * series.times
    step = np.exp(1j * phase)
    i = 0
    while i < n_values.size:
        j = i
        while j + 1 < n_values.size and n_values[j + 1] == n_values[j] + 1 and j - i < 127:
            j += 1
        z = np.exp(1j * (n_values[i] * phase))
        for k in range(i, j + 1):
            if k > i:
                z *= step
            acc = w @ z
            out[k] = acc.real * acc.real + acc.imag * acc.imag
        i = j + 1
    return out


def _band_matrix(omega: np.ndarray, band_edges: Sequence[float] | None) -> tuple[np.ndarray, np.ndarray]:
    """Averaging matrix mapping frequencies to bands, and band centres."""
    if band_edges is None:
        return np.eye(omega.size), omega
    edges = np.asarray(band_edges, dtype=float)
    rows, centres = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (omega >= lo) & (omega < hi)
        if not sel.any():
            raise ValueError(f"band [{lo}, {hi}) contains no frequency")
        row = sel / sel.sum()
        rows.append(row)
        centres.append(float(omega[sel].mean()))
    return np.array(rows), np.array(centres)


def estimate_spectrum(
    ensemble: Sequence[EventSeries],
    n_values: Sequence[int],
    marked: bool = False,
    band_edges: Sequence[float] | None = None,
) -> CurveEstimate:
    """Ensemble spectrum S(W_n), optionally averaged over frequency bands.

    With ``marked`` the sum is weighted by each event's mark.
    """
    horizon = _common_horizon(ensemble)
    n_values = np.asarray(n_values, dtype=np.int64)
    omega = 2.0 * math.pi * n_values / horizon
    per_run = np.array([periodogram(s, n_values, s.marks if marked else None) for s in ensemble])
    avg, centres = _band_matrix(omega, band_edges)
    banded = per_run @ avg.T
    horizons = np.full(len(ensemble), horizon)
    value, err = jackknife(lambda i, t: i / t, banded, horizons)
    return CurveEstimate(centres, value, err)


def band_reference(
    model: Callable[[np.ndarray], np.ndarray],
    n_values: Sequence[int],
    horizon: float,
    band_edges: Sequence[float] | None = None,
) -> np.ndarray:
    """Average a model curve over the same frequencies and bands as the estimators."""
    omega = 2.0 * math.pi * np.asarray(n_values, dtype=float) / horizon
    avg, _ = _band_matrix(omega, band_edges)
    return avg @ np.asarray(model(omega), dtype=float)


def bin_reference(model: Callable[[np.ndarray], np.ndarray], tau_max: float, bin_width: float, points: int = 64) -> np.ndarray:
    """Average a correlation model over each lag bin of :func:`estimate_g`."""
    nbins = int(round(tau_max / bin_width))
    u = (np.arange(points) + 0.5) / points
    lags = (np.arange(nbins)[:, None] + u[None, :]) * bin_width
    return np.asarray(model(lags), dtype=float).mean(axis=1)


def estimate_relative_noise(
    ensemble: Sequence[EventSeries],
    n_values: Sequence[int],
    band_edges: Sequence[float] | None = None,
) -> CurveEstimate:
    """N(W) = S/D^2 - 1/D with the rate estimated from the same runs."""
    horizon = _common_horizon(ensemble)
    n_values = np.asarray(n_values, dtype=np.int64)
    omega = 2.0 * math.pi * n_values / horizon
    per_run = np.array([periodogram(s, n_values) for s in ensemble])
    avg, centres = _band_matrix(omega, band_edges)
    banded = per_run @ avg.T
    counts = np.array([len(s) for s in ensemble], dtype=float)
    if counts.sum() == 0:
        raise ValueError("relative noise needs a non-zero event rate")
    horizons = np.full(len(ensemble), horizon)

    def stat(i, n, t):
        d = n / t
        return (i / t) / d**2 - 1.0 / d

    value, err = jackknife(stat, banded, counts, horizons)
    return CurveEstimate(centres, value, err)


def _pair_counts(times: np.ndarray, tau_max: float, bin_width: float) -> np.ndarray:
    nbins = int(round(tau_max / bin_width))
    counts = np.zeros(nbins)
    lag = 1
    while lag < times.size:
        d = times[lag:] - times[:-lag]
        if d.size == 0 or d.min() >= tau_max:
            break
        d = d[d < tau_max]
        idx = np.minimum((d / bin_width).astype(np.int64), nbins - 1)
        counts += np.bincount(idx, minlength=nbins)
        lag += 1
    return counts


def estimate_g(ensemble: Sequence[EventSeries], tau_max: float, bin_width: float) -> CurveEstimate:
    """Pair correlation from the histogram of forward separations.

    Bin b collects ordered pairs with separation in [b w, (b+1) w). The
    expected count is D^2 g w (T - tau_b) summed over runs, where the
    factor T - tau_b is the exposure of pairs fully inside the record.
    """
    horizon = _common_horizon(ensemble)
    nbins = int(round(tau_max / bin_width))
    if nbins < 1:
        raise ValueError("tau_max must exceed bin_width")
    centres = (np.arange(nbins) + 0.5) * bin_width
    exposure = bin_width * (horizon - centres)
    if np.any(exposure <= 0):
        raise ValueError("tau_max must be below the horizon")
    pairs = np.array([_pair_counts(s.times, nbins * bin_width, bin_width) for s in ensemble])
    counts = np.array([len(s) for s in ensemble], dtype=float)
    runs = len(ensemble)
    expo = np.tile(exposure, (runs, 1))
    horizons = np.full(runs, horizon)

    def stat(c, n, e, t):
        d = n / t
        return c / (d * d * e)

    value, err = jackknife(stat, pairs, counts, expo, horizons)
    return CurveEstimate(centres, value, err)


def estimate_variance_curve(ensemble: Sequence[EventSeries], windows: Sequence[float]) -> CurveEstimate:
    """V(T') = var / mean - 1 of counts in disjoint windows tiling each run."""
    horizon = _common_horizon(ensemble)
    windows = np.asarray(windows, dtype=float)
    s1 = np.zeros((len(ensemble), windows.size))
    s2 = np.zeros_like(s1)
    m = np.zeros_like(s1)
    for r, s in enumerate(ensemble):
        for k, width in enumerate(windows):
            nwin = int(math.floor(horizon / width + 1e-9))
            if nwin < 2:
                raise ValueError("each window must fit at least twice in the horizon")
            idx = (s.times / width).astype(np.int64)
            idx = idx[idx < nwin]
            c = np.bincount(idx, minlength=nwin).astype(float)
            s1[r, k] = c.sum()
            s2[r, k] = (c * c).sum()
            m[r, k] = nwin

    def stat(a, b, n):
        mean = a / n
        var = (b - a * a / n) / (n - 1)
        return var / mean - 1.0

    value, err = jackknife(stat, s1, s2, m)
    return CurveEstimate(windows, value, err)


# ------------------------------------------------------- correlation/spectrum


def noise_from_correlation(tau: np.ndarray, g_minus_one: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """N(W) = 2 int_0^inf (g - 1) cos(W tau) dtau on a tabulated lag grid."""
    tau = np.asarray(tau, dtype=float)
    h = np.asarray(g_minus_one, dtype=float)
    peak = np.max(np.abs(h))
    if peak > 0 and abs(h[-1]) > 1e-3 * peak:
        warnings.warn("g - 1 has not decayed at the end of the lag grid", RuntimeWarning, stacklevel=2)
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    return np.array([2.0 * integrate.simpson(h * np.cos(w * tau), x=tau) for w in omega])


def correlation_from_noise(omega: np.ndarray, noise: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """g(tau) - 1 = (1/pi) int_0^inf N(W) cos(W tau) dW on a tabulated grid."""
    omega = np.asarray(omega, dtype=float)
    n = np.asarray(noise, dtype=float)
    peak = np.max(np.abs(n))
    if peak > 0 and abs(n[-1]) > 1e-3 * peak:
        warnings.warn("N has not decayed at the end of the frequency grid", RuntimeWarning, stacklevel=2)
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    return np.array([integrate.simpson(n * np.cos(omega * t), x=omega) / math.pi for t in tau])


def triangle_cosine_sum(window: int, n: int) -> float:
    """2 sum_{i=1}^{T} (1 - i/T) cos(2 pi i n / T) + 1 for integer T = window.

    Vanishes for n not a multiple of T; this is why a regular comb has zero
    spectrum at the record's Fourier frequencies.
    """
    i = np.arange(1, window + 1)
    return float(2.0 * np.sum((1 - i / window) * np.cos(2 * math.pi * i * n / window)) + 1.0)


# ------------------------------------------------------- jittered comb forms


def darkroom_g(tau, tau_r: float):
    tau = np.abs(np.asarray(tau, dtype=float))
    return np.where(tau < tau_r, 1.0 - (tau_r - tau) / tau_r**2, 1.0)


def darkroom_spectrum(omega, tau_r: float):
    """S(W) for unit rate: 1 + (cos(W tau_r) - 1) / ((W tau_r)^2 / 2)."""
    x = np.asarray(omega, dtype=float) * tau_r
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    full = 1.0 + (np.cos(xs) - 1.0) / (xs * xs / 2.0)
    return np.where(small, x * x / 12.0, full)


def darkroom_variance(window, tau_r: float):
    w = np.asarray(window, dtype=float)
    return np.where(w < tau_r, -w / tau_r + w * w / (3 * tau_r**2), -1.0 + tau_r / (3 * w))
