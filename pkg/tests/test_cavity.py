import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from qnl import cavity as cv


def test_weights_two_atoms():
    assert [cv.statistical_weight(2, n) for n in range(3)] == [1, 2, 1]
    with pytest.raises(ValueError):
        cv.statistical_weight(2, 3)


@pytest.mark.parametrize("N", range(1, 61))
def test_partition_is_power_of_two(N):
    assert cv.partition(N) == 2**N


def test_central_weight_gaussian_estimate():
    assert cv.central_weight_ratio(100) == pytest.approx(1.0, abs=0.02)


def test_stationary_examples():
    assert cv.stationary_distribution(2)[0] == pytest.approx(0.25)
    assert cv.stationary_exact(2) == [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]
    mean, _ = cv.moments(40)
    assert mean == pytest.approx(20.0)
    assert cv.stationary_distribution(40)[0] == pytest.approx(4.0**-20, rel=1e-12)
    with pytest.raises(ValueError):
        cv.stationary_distribution(0)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 200))
def test_variance_is_half_the_mean(N):
    mean, var = cv.moments(N)
    assert mean == pytest.approx(N / 2)
    assert var / mean == pytest.approx(0.5)
    assert cv.stationary_distribution(N).sum() == pytest.approx(1.0)


def test_jump_rate_edges():
    assert cv.jump_rates(cv.CavityState(0, 5), 5)[1] == 0
    assert cv.jump_rates(cv.CavityState(5, 0), 5)[0] == 0
    assert cv.jump_rates(cv.CavityState(2, 3), 5) == (9, 4)
    with pytest.raises(ValueError):
        cv.jump_rates(cv.CavityState(2, 2), 5)


@pytest.mark.parametrize("N", range(1, 31))
def test_detailed_balance_exact(N):
    assert cv.detailed_balance_exact(N)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 300), st.data())
def test_drift_is_rate_difference(N, data):
    m = data.draw(st.integers(0, N))
    r_e, r_a = cv.jump_rates(cv.CavityState(m, N - m), N)
    assert cv.drift(m, N) == r_e - r_a
    assert cv.drift(m, N) == N * m - 2 * m * m + N - m


def test_drift_large_m_limit():
    N = 10**6
    m = np.array([1e4, 1e5, 4e5])
    assert np.allclose(cv.drift(m, N), cv.drift_large_m(m, N), rtol=2e-4)


def test_conservation_along_trajectory():
    traj = cv.simulate(7, 10_000, seed=1)
    assert np.all((traj.states >= 0) & (traj.states <= 7))
    assert np.all(traj.states + traj.excited == 7)
    assert np.all(np.abs(np.diff(traj.states)) == 1)
    assert np.all(traj.holds > 0)


def test_simulate_rejects_bad_input():
    with pytest.raises(ValueError):
        cv.simulate(0, 10)
    with pytest.raises(ValueError):
        cv.simulate(3, 10, start=4)


def test_one_atom_is_a_fair_flip():
    traj = cv.simulate(1, 200_000, seed=2)
    occ = traj.occupancy()
    # holding time at m = 0 or 1 is exponential with rate 1, each state visited alternately
    se = math.sqrt(2 / traj.holds.size) / 2
    assert abs(occ[0] - 0.5) < 3 * se


def test_stationary_law_and_moments():
    N = 20
    occ = cv.simulate(N, 1_000_000, seed=3).occupancy()
    assert cv.total_variation(occ, cv.stationary_distribution(N)) < 0.02
    m = np.arange(N + 1)
    mean = occ @ m
    assert mean == pytest.approx(N / 2, rel=0.02)
    assert occ @ (m - mean) ** 2 == pytest.approx(N / 4, rel=0.05)


def test_two_atom_empty_probability():
    occ = cv.simulate(2, 1_000_000, seed=4).occupancy()
    assert occ[0] == pytest.approx(0.25, abs=0.01)


def test_start_state_does_not_matter():
    a = cv.simulate(10, 500_000, seed=5, start=0).occupancy()
    b = cv.simulate(10, 500_000, seed=6, start=10).occupancy()
    assert cv.total_variation(a, b) < 0.01


def test_langevin_spectrum_values():
    assert cv.langevin_spectrum(50, 0.0) == pytest.approx(0.5)
    assert cv.langevin_spectrum(50, 50.0) == pytest.approx(0.25)
    assert cv.langevin_variance(20) == 5.0


@pytest.mark.parametrize("N", [2, 20, 100])
def test_langevin_integral_is_quarter_n(N):
    val = integrate.quad(lambda w: cv.langevin_spectrum(N, w), -np.inf, np.inf)[0] / (2 * math.pi)
    assert val == pytest.approx(N / 4, rel=1e-9)
    assert cv.langevin_variance(N) == pytest.approx(N / 4)


def test_binned_series_preserves_time_average():
    traj = cv.simulate(5, 20_000, seed=7)
    dt = 0.01
    x = cv.binned_series(traj, dt)
    t = x.size * dt
    cum = np.concatenate(([0.0], np.cumsum(traj.states * traj.holds)))
    exact = np.interp(t, traj.jump_times(), cum) / t
    assert x.mean() == pytest.approx(exact, rel=1e-10)


def test_simulated_spectrum_matches_langevin():
    N = 100
    traj = cv.simulate(N, 2_000_000, seed=8)
    edges = np.geomspace(0.1 * N, 10.0 * N, 7)
    bands = cv.estimate_spectrum(traj, 1e-4, edges, lambda w: cv.langevin_spectrum(N, w))
    ratio = bands.value / bands.reference
    assert np.all(np.abs(ratio - 1) < 0.1), ratio
