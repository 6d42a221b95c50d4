import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qnl import pendulum as pd
from qnl.point_process import jackknife

CLOCK = pd.PendulumParams()


def test_clock_figures():
    d = pd.derived_quantities(CLOCK)
    assert d.mean_height == pytest.approx(0.1)
    assert d.lifetime == pytest.approx(1e5)
    assert d.mark == pytest.approx(0.981e-3)
    assert d.power == pytest.approx(9.81e-6)
    assert d.energy == pytest.approx(0.981)


def test_unit_lifetime_scale():
    assert pd.derived_quantities(pd.PendulumParams(M=1.0, m=1.0, pr=1.0)).lifetime == pytest.approx(1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 10), st.floats(1e-4, 0.1), st.floats(1e-4, 1.0), st.floats(1e-7, 1e-3), st.floats(0.5, 2))
def test_power_is_mark_rate(M, m, pr, dz, period):
    p = pd.PendulumParams(M=M, m=m, pr=pr, dz=dz, period=period)
    d = pd.derived_quantities(p)
    assert d.power == pytest.approx(d.mark * pr / period, rel=1e-12)
    assert d.energy == pytest.approx(d.power * d.lifetime, rel=1e-12)


def test_exact_stationary_values():
    p = pd.PendulumParams(M=1.0, m=0.01)
    d = pd.derived_quantities(p)
    assert pd.stationary_mean_height(p) == pytest.approx(d.mean_height * (1 + p.m / p.M))
    assert pd.stationary_mean_mark(p) == pytest.approx(d.mark)


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        pd.PendulumParams(m=0.0)
    with pytest.raises(ValueError):
        pd.PendulumParams(pr=1.5)


def test_analytic_spectrum_limits():
    d = pd.derived_quantities(CLOCK)
    plateau = d.mark * d.power
    assert plateau == pytest.approx(9.62e-9, rel=1e-3)
    assert pd.analytic_spectrum(0.0, d.lifetime, d.mark, d.power) == 0.0
    assert pd.analytic_spectrum(1 / d.lifetime, d.lifetime, d.mark, d.power) == pytest.approx(plateau / 2)
    assert pd.analytic_spectrum(1e6 / d.lifetime, d.lifetime, d.mark, d.power) == pytest.approx(plateau, rel=1e-11)


def test_band_edges_cover_indices():
    n = pd.frequency_indices(10**7, 1e5)
    edges = pd.band_edges_for(n)
    assert edges[0] == n[0] and edges[-1] == n[-1] + 1
    assert all(b - a >= 16 for a, b in zip(edges[:-1], edges[1:]))
    w_tau = 2 * math.pi * n * 1e5 / 1e7
    assert w_tau[0] >= 0.2 and w_tau[-1] <= 20


# ---------------------------------------------------------------- simulation

FAST = pd.PendulumParams(M=1.0, m=0.005, pr=0.01, dz=1e-5)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_recursion_is_exact(seed):
    rec = pd.simulate(FAST, 200_000, seed)
    assert rec.marks.size > 1000
    assert pd.check_recursion(rec, FAST)
    assert np.all(np.diff(rec.periods) >= 1)
    assert rec.periods[0] >= 1 and rec.periods[-1] <= 200_000


def test_recursion_check_detects_tampering():
    rec = pd.simulate(FAST, 50_000, 4)
    marks = rec.marks.copy()
    marks[5] = np.nextafter(marks[5], np.inf)
    assert not pd.check_recursion(pd.DissipationRecord(rec.periods, marks, rec.horizon, rec.first_mark), FAST)


def _records(runs, periods, p=FAST, seed=11):
    return [pd.simulate(p, periods, np.random.default_rng([seed, i])) for i in range(runs)]


def test_event_spacing_and_marks():
    recs = _records(30, 200_000)
    counts = np.array([r.marks.size for r in recs], dtype=float)
    spans = np.array([r.periods[-1] - r.periods[0] for r in recs], dtype=float)
    sums = np.array([r.marks.sum() for r in recs])
    spacing, se = jackknife(lambda s, c: s / (c - len(recs)), spans, counts)
    assert abs(spacing - 1 / FAST.pr) < 3 * se
    mark, se = jackknife(lambda s, c: s / c, sums, counts)
    assert abs(mark - pd.stationary_mean_mark(FAST)) < 3 * se


def test_mean_height_matches_exact_stationary_value():
    # events fall on periods independently of the height, so marks sample it without bias
    recs = _records(30, 200_000, seed=12)
    scale = FAST.m * FAST.g * FAST.shrink
    heights = np.array([(r.marks / scale).sum() for r in recs])
    counts = np.array([r.marks.size for r in recs], dtype=float)
    est, se = jackknife(lambda h, c: h / c, heights, counts)
    exact = pd.stationary_mean_height(FAST)
    assert abs(est - exact) < 3 * se
    energy = FAST.M * FAST.g * est
    assert energy == pytest.approx(pd.derived_quantities(FAST).energy, rel=0.02)


def test_spectrum_matches_lorentzian_shape():
    # one event per period at most: the plateau carries the lattice factor 1 - pr
    r = pd.spectrum_experiment(FAST, 2_000_000, 40, seed=0)
    target = (1 - FAST.pr) * r.analytic
    assert np.all(np.abs(r.sim - target) < 3 * r.stderr)
    assert np.all(np.abs(r.sim / r.analytic - 1) < 0.1)
    assert r.recursion_ok
    assert abs(r.power - pd.derived_quantities(FAST).power) < 3 * r.power_err


def test_spectrum_is_worker_independent():
    a = pd.spectrum_experiment(FAST, 100_000, 4, seed=5, workers=1)
    b = pd.spectrum_experiment(FAST, 100_000, 4, seed=5, workers=2)
    np.testing.assert_array_equal(a.sim, b.sim)
    assert a.mean_mark == b.mean_mark
