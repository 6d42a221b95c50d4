import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qnl import circuits as cc
from qnl import point_process as pp
from qnl.constants import HBAR, K_B

TANK = cc.TunedCircuit(L=1e-6, C=1e-9, G=1e-5)


def test_resonant_admittance_is_conductance():
    assert cc.admittance(TANK, TANK.omega0) == pytest.approx(TANK.G, abs=1e-15)
    with pytest.raises(ZeroDivisionError):
        cc.admittance(TANK, 0.0)
    with pytest.raises(ValueError):
        cc.TunedCircuit(0.0, 1.0, 1.0)


def test_susceptance_nearly_odd_about_resonance():
    w0 = TANK.omega0
    for d in (1e-4, 1e-3, 1e-2):
        up = cc.admittance(TANK, w0 * (1 + d)).imag
        down = cc.admittance(TANK, w0 * (1 - d)).imag
        # even part is -2 C w0 d^2 to leading order
        assert abs(up + down) <= 3 * TANK.C * w0 * d * d


def test_half_power_points():
    lo, hi = cc.half_power_points(TANK)
    peak = cc.dissipated_power(TANK, 1.0, TANK.omega0)
    assert peak == pytest.approx(1 / TANK.G)
    assert cc.dissipated_power(TANK, 1.0, lo) == pytest.approx(peak / 2, rel=1e-9)
    assert cc.dissipated_power(TANK, 1.0, hi) == pytest.approx(peak / 2, rel=1e-9)
    assert hi - lo == pytest.approx(TANK.G / TANK.C, rel=1e-12)


@pytest.mark.parametrize("G", [1e-6, 1e-5, 1e-3])
def test_full_width_half_power_by_bisection(G):
    c = cc.TunedCircuit(1e-6, 1e-9, G)
    assert cc.full_width_half_power(c) == pytest.approx(G / c.C, rel=1e-9)


@pytest.mark.parametrize("exact", [True, False])
def test_energy_integral(exact):
    source = 2e-3 + 1e-3j
    assert cc.integrated_energy(TANK, source, exact) == pytest.approx(abs(source) ** 2 / (4 * TANK.G), rel=1e-6)


def test_exact_and_small_loss_forms_agree():
    c = cc.TunedCircuit(1.0, 1.0, 1e-3)
    w = c.omega0 + np.linspace(-3, 3, 61) * c.G / c.C
    for key in ("P", "E"):
        exact = cc.dissipated_spectrum_and_energy(c, 1.0, w, exact=True)[key]
        approx = cc.dissipated_spectrum_and_energy(c, 1.0, w, exact=False)[key]
        np.testing.assert_allclose(approx, exact, rtol=0.01)


def test_fabry_perot_lifetime():
    assert cc.fabry_perot_lifetime(0.01, 0.01, 1e-9) == pytest.approx(50e-9)
    assert cc.fabry_perot_lifetime(0.01, 0.0, 1e-9) == pytest.approx(2 * cc.fabry_perot_lifetime(0.01, 0.01, 1e-9))
    assert cc.fabry_perot_lifetime(0.02, 0.0, 3e-9) == pytest.approx(3 * cc.fabry_perot_lifetime(0.02, 0.0, 1e-9))
    with pytest.raises(ValueError):
        cc.fabry_perot_lifetime(0.0, 0.0, 1e-9)


def test_noise_source_density():
    assert cc.NoiseSource(-2e-3, 1e15).density == pytest.approx(HBAR * 1e15 * 2e-3)


# ---------------------------------------------------------------- dispersion identity


def test_identity_single_capacitor():
    el = cc.Element("C", 2.0)
    assert cc.network_admittance_slope(el, 3.0) == -2j
    left, right = cc.admittance_derivative_identity(el, 3.0, 0.7 + 0.2j, analytic=True)
    assert left == right


@pytest.mark.parametrize(
    "net",
    [
        cc.Series((cc.Element("L", 1.3), cc.Element("G", 0.4))),
        cc.Parallel((cc.Element("C", 0.8), cc.Element("G", 2.0))),
    ],
)
def test_identity_simple_pairs(net):
    left, right = cc.admittance_derivative_identity(net, 1.7, 1.2 - 0.5j, analytic=True)
    assert abs(left - right) <= 1e-10 * abs(right)


@pytest.mark.parametrize("seed", range(10))
def test_identity_random_ladders(seed):
    net = cc.random_ladder(5, seed)
    left, right = cc.admittance_derivative_identity(net, 1.1, 0.9 + 0.3j)
    assert abs(left - right) <= 1e-8 * max(abs(right), 1e-300)
    slope_fd = cc.admittance_derivative_identity(net, 1.1, 1.0)[0] / 1j
    assert cc.network_admittance_slope(net, 1.1) == pytest.approx(slope_fd, rel=1e-8)


def test_element_rejects_unknown_kind():
    with pytest.raises(ValueError):
        cc.Element("R", 1.0)


# ---------------------------------------------------------------- thermal


def test_oscillator_energy_limits():
    w = 1e13
    hot = 100 * HBAR * w / K_B
    assert cc.average_oscillator_energy(w, hot) == pytest.approx(K_B * hot, rel=1e-3)
    cold = 0.01 * HBAR * w / K_B
    assert cc.average_oscillator_energy(w, cold) == pytest.approx(HBAR * w / 2, rel=1e-12)
    with pytest.raises(ValueError):
        cc.average_oscillator_energy(w, 0.0)


@pytest.mark.parametrize("ratio", [0.3, 1.0, 5.0, 30.0])
def test_boltzmann_sum_matches_closed_form(ratio):
    w = 1e13
    T = ratio * HBAR * w / K_B
    assert cc.boltzmann_energy(w, T) == pytest.approx(float(cc.average_oscillator_energy(w, T)), rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 100))
def test_riccati_residual(reduced):
    # x = w / kT over hbar w / kT in [0.01, 100]
    assert abs(cc.riccati_residual(reduced / HBAR)) < 1e-10


def test_riccati_residual_numeric_derivative():
    x = np.logspace(0, 2, 7) / HBAR
    assert np.all(np.abs(cc.riccati_residual(x, numeric=True)) < 1e-8)


def test_thermal_balance_zero_temperature_limit():
    assert cc.thermal_balance(1e300, 1.0, 1e13, 2.0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        cc.thermal_balance(1.0, 1.0, 1e13, 1.0)


@pytest.mark.parametrize("reduced", np.logspace(-2, 2, 9))
def test_balance_reproduces_planck_curve(reduced):
    w = 1e14
    T = reduced * HBAR * w / K_B
    ratio = math.exp(HBAR * w / (K_B * T))
    got = cc.thermal_balance(ratio, 1.0, w, HBAR * w)
    assert got == pytest.approx(float(cc.average_oscillator_energy(w, T)), rel=1e-9)


@pytest.mark.parametrize("omega", [1e11, 1e13, 1e14])
@pytest.mark.parametrize("T", [3.0, 300.0, 3000.0])
def test_infer_alpha_grid(omega, T):
    assert cc.infer_alpha(omega, T) == pytest.approx(HBAR * omega, rel=1e-9)


def test_infer_alpha_rejects_overflow():
    with pytest.raises(ValueError):
        cc.infer_alpha(1e16, 1.0)


@pytest.mark.parametrize("G,C", [(1e-5, 1e-9), (1.0, 1.0), (3e-2, 7e-12)])
def test_nyquist_integral(G, C):
    T = 290.0
    assert cc.nyquist_classical_check(G, C, T) == pytest.approx(K_B * T / 2, rel=1e-6)
    assert cc.nyquist_classical_check(G, C, T) == pytest.approx(cc.nyquist_closed(G, C, T), rel=1e-9)


# ---------------------------------------------------------------- C-state


def test_shot_power_density():
    assert cc.shot_power_density(2e-3, 1e15) == pytest.approx(HBAR * 1e15 * 2e-3)


def test_cstate_zero_potential_gives_no_events():
    run = cc.cstate_montecarlo(0.0, 1e-3, 1e15, 1e-9, seed=1)
    assert run.series.times.size == 0


def test_cstate_rate_and_dispersion():
    G, w0, V = 1e-3, 1e15, 1.0
    rate = G * V**2 / (HBAR * w0)
    run = cc.cstate_montecarlo(V, G, w0, 5e4 / rate, seed=3)
    n = run.series.times.size
    assert abs(n - 5e4) < 3 * math.sqrt(5e4)
    assert run.negative_fraction < 1e-3
    assert np.all(np.diff(run.series.times) >= 0)
    counts = np.histogram(run.series.times, bins=500, range=(0, run.series.horizon))[0]
    fano = counts.var(ddof=1) / counts.mean()
    assert abs(fano - 1) < 3 * math.sqrt(2 / (counts.size - 1))


def test_cstate_noise_flat_and_phase_invariant():
    G, w0 = 1e-3, 1e15
    rate = G / (HBAR * w0)
    n = np.arange(1, 161)
    out = {}
    for phase in (0.0, 1.0):
        V = complex(math.cos(phase), math.sin(phase))
        ests = [cc.cstate_montecarlo(V, G, w0, 2e4 / rate, seed=[7, phase > 0, k]).series
                for k in range(10)]
        est = pp.estimate_relative_noise(ests, n)
        out[phase] = est
        z = est.value.mean() / (np.sqrt(np.sum(est.stderr**2)) / n.size)
        assert abs(z) < 3
    diff = out[0.0].value - out[1.0].value
    se = np.sqrt(out[0.0].stderr ** 2 + out[1.0].stderr ** 2)
    assert abs(diff.mean()) < 3 * np.sqrt(np.sum(se**2)) / n.size


def test_cstate_warns_on_coarse_grid():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        with pytest.raises(RuntimeWarning):
            cc.cstate_montecarlo(1.0, 1e-3, 1e15, 1e-13, seed=0, events_per_step=0.05)
