"""Experiment drivers shared by the command line and the acceptance suite.

Each driver returns an :class:`ExperimentResult`: a table for plotting and
a list of metric rows comparing estimates with their targets.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Sequence

import numpy as np

from . import cavity, circuits, core_math, pendulum, point_process as pp, two_level
from .ensemble import map_runs


@dataclass
class Metric:
    name: str
    estimate: float
    target: float
    tolerance: float
    stderr: float | None = None
    passed: bool | None = None

    def __post_init__(self):
        if self.passed is None:
            self.passed = bool(abs(self.estimate - self.target) <= self.tolerance)

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "target": self.target,
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
        }


def sigma_metric(name: str, estimate: float, stderr: float, target: float, sigmas: float = 3.0) -> Metric:
    return Metric(name, float(estimate), float(target), float(sigmas * stderr), float(stderr))


@dataclass
class ExperimentResult:
    experiment: str
    params: dict[str, Any]
    columns: list[str]
    rows: list[list[Any]]
    metrics: list[Metric] = field(default_factory=list)
    events: list[pp.EventSeries] | None = None

    @property
    def passed(self) -> bool:
        return all(m.passed for m in self.metrics)


# ---------------------------------------------------------------- pendulum


def run_pendulum(runs: int = 100, periods: int = 10**7, seed: int = 0, workers: int | None = None,
                 M: float = 1.0, m: float = 1e-3, pr: float = 0.01, dz: float = 1e-6) -> ExperimentResult:
    p = pendulum.PendulumParams(M=M, m=m, pr=pr, dz=dz)
    d = pendulum.derived_quantities(p)
    res = pendulum.spectrum_experiment(p, periods, runs, seed, workers)
    omega = res.omega_tau / d.lifetime
    rows = [[w, s, a, e] for w, s, a, e in zip(omega, res.sim, res.analytic, res.stderr)]
    metrics = [
        Metric(f"spectrum_ratio[omega_tau={x:.3g}]", float(s / a), 1.0, 0.1, float(e / a))
        for x, s, a, e in zip(res.omega_tau, res.sim, res.analytic, res.stderr)
    ]
    metrics.append(sigma_metric("mean_power", res.power, res.power_err, d.power))
    metrics.append(sigma_metric("mean_mark", res.mean_mark, res.mean_mark_err, pendulum.stationary_mean_mark(p)))
    metrics.append(Metric("mark_recursion_exact", float(res.recursion_ok), 1.0, 0.0))
    params = {"runs": runs, "periods": periods, "seed": seed, "M": M, "m": m, "pr": pr, "dz": dz}
    return ExperimentResult("pendulum", params, ["omega", "sim", "analytic", "stderr"], rows, metrics)


# ---------------------------------------------------------------- point processes


def _renewal_run(index, rng, gamma, horizon):
    law = two_level.waiting_time_exact(gamma)
    return pp.gen_renewal(law, horizon, rng, burn_in=20.0 * law.mean())


def _poisson_run(index, rng, rate, horizon):
    return pp.gen_poisson(rate, horizon, rng)


def _darkroom_run(index, rng, tau_r, horizon):
    return pp.gen_darkroom(tau_r, horizon, rng)


def _thinned_run(index, rng, maker, pr):
    return pp.thin(maker(index, rng), pr, rng)


def _merged_run(index, rng, gamma, horizon, copies):
    law = two_level.waiting_time_exact(gamma)
    parts = [pp.gen_renewal(law, horizon, rng, burn_in=20.0 * law.mean()) for _ in range(copies)]
    return pp.superpose(parts)


def _g_metrics(label: str, est: pp.CurveEstimate, target: np.ndarray) -> list[Metric]:
    return [
        sigma_metric(f"{label}_g[tau={x:.3g}]", v, e, t)
        for x, v, e, t in zip(est.x, est.value, est.stderr, target)
    ]


def run_points(runs: int = 20, seed: int = 0, workers: int | None = None, gamma: float = 2.0,
               horizon: float = 2.5e5, keep: float = 0.5, copies: int = 50,
               checks: Sequence[str] = ("bridge", "thinning", "superposition")) -> ExperimentResult:
    """Renewal bridge, thinning invariance and superposition checks."""
    rows: list[list[Any]] = []
    metrics: list[Metric] = []
    g_model = lambda tau: two_level.normalized_correlation(tau, gamma)  # noqa: E731

    if "bridge" in checks:
        ens = map_runs(partial(_renewal_run, gamma=gamma, horizon=horizon), runs, seed, workers)
        rate, rate_err = pp.estimate_rate(ens)
        metrics.append(sigma_metric("bridge_rate", rate, rate_err, two_level.stationary_rate(gamma)))
        total = float(sum(len(s) for s in ens))
        metrics.append(Metric("bridge_events_at_least", total, 1e6, math.inf, passed=total >= 1e6))
        est = pp.estimate_g(ens, 4.0, 0.25)
        target = pp.bin_reference(g_model, 4.0, 0.25)
        metrics += _g_metrics("bridge", est, target)
        rows += [["bridge", x, v, e, t] for x, v, e, t in zip(est.x, est.value, est.stderr, target)]
        n_values = np.arange(1, 257)
        noise = pp.estimate_relative_noise(ens, n_values, band_edges=[0.0, 1.0])
        ref = pp.band_reference(lambda w: two_level.relative_noise(w, gamma), n_values, horizon, [0.0, 1.0])
        metrics.append(sigma_metric("bridge_noise_low_frequency", noise.value[0], noise.stderr[0], ref[0]))
        metrics.append(Metric("bridge_noise_zero_closed", float(ref[0]), two_level.relative_noise_zero(gamma),
                              0.01 * abs(two_level.relative_noise_zero(gamma))))

    if "thinning" in checks:
        th_horizon = horizon / 2.5
        makers = {
            "poisson": (partial(_poisson_run, rate=1.0, horizon=th_horizon), lambda t: np.ones_like(t), 3.0, 1.0),
            "darkroom": (partial(_darkroom_run, tau_r=5.0, horizon=th_horizon),
                         lambda t: pp.darkroom_g(t, 5.0), 10.0, 2.0),
            "rabi": (partial(_renewal_run, gamma=gamma, horizon=th_horizon * 4.5), g_model, 4.0, 0.5),
        }
        for k, (name, (maker, model, tau_max, width)) in enumerate(makers.items()):
            target = pp.bin_reference(model, tau_max, width)
            base = map_runs(maker, 2 * runs, seed + 1000 + k, workers)
            thinned = map_runs(partial(_thinned_run, maker=maker, pr=keep), 2 * runs, seed + 1000 + k, workers)
            for tag, ens in (("original", base), ("thinned", thinned)):
                est = pp.estimate_g(ens, tau_max, width)
                metrics += _g_metrics(f"thinning_{name}_{tag}", est, target)
                rows += [[f"thinning_{name}_{tag}", x, v, e, t] for x, v, e, t in zip(est.x, est.value, est.stderr, target)]

    if "superposition" in checks:
        sp_horizon = 2000.0
        ens = map_runs(partial(_merged_run, gamma=gamma, horizon=sp_horizon, copies=copies), runs, seed + 2000, workers)
        est = pp.estimate_g(ens, 0.05, 0.05)
        merged_g0 = 1.0 - 1.0 / copies
        target = 1.0 + (pp.bin_reference(g_model, 0.05, 0.05) - 1.0) / copies
        metrics.append(sigma_metric("superposition_g0", est.value[0], est.stderr[0], merged_g0))
        metrics.append(sigma_metric("superposition_g0_binned", est.value[0], est.stderr[0], target[0]))
        rows.append(["superposition", est.x[0], est.value[0], est.stderr[0], merged_g0])

    params = {"runs": runs, "seed": seed, "gamma": gamma, "horizon": horizon, "keep": keep, "copies": copies,
              "checks": list(checks)}
    return ExperimentResult("points", params, ["check", "tau", "g", "stderr", "target"], rows, metrics)


# ---------------------------------------------------------------- dark room


def darkroom_band_indices(horizon: float, tau_r: float, lo: float = 0.05, hi: float = 20.0,
                          bands: int = 8, width: int = 32) -> tuple[np.ndarray, list[float]]:
    """Blocks of ``width`` consecutive Fourier indices at log-spaced W tau_r."""
    starts = np.geomspace(lo, hi, bands) * horizon / (2.0 * math.pi * tau_r)
    n_values: list[int] = []
    edges: list[float] = []
    for s in starts:
        first = max(int(round(s)) - width // 2, 1)
        if n_values and first <= n_values[-1]:
            first = n_values[-1] + 1
        block = list(range(first, first + width))
        n_values += block
    n_arr = np.array(n_values)
    omega = 2.0 * math.pi * n_arr / horizon
    for b in range(bands):
        edges.append(float(omega[b * width]))
    edges.append(float(omega[-1]) * (1 + 1e-12) + 1e-300)
    return n_arr, edges


def run_darkroom(runs: int = 20, seed: int = 0, workers: int | None = None, tau_r: float = 5.0,
                 horizon: float = 2e5) -> ExperimentResult:
    ens = map_runs(partial(_darkroom_run, tau_r=tau_r, horizon=horizon), runs, seed, workers)
    metrics: list[Metric] = []
    rows: list[list[Any]] = []
    width = tau_r / 5.0
    g = pp.estimate_g(ens, 2.0 * tau_r, width)
    g_t = pp.bin_reference(lambda t: pp.darkroom_g(t, tau_r), 2.0 * tau_r, width)
    metrics += _g_metrics("darkroom", g, g_t)
    rows += [["g", x, v, e, t] for x, v, e, t in zip(g.x, g.value, g.stderr, g_t)]

    n_values, edges = darkroom_band_indices(horizon, tau_r)
    s = pp.estimate_spectrum(ens, n_values, band_edges=edges)
    s_t = pp.band_reference(lambda w: pp.darkroom_spectrum(w, tau_r), n_values, horizon, edges)
    metrics += [sigma_metric(f"darkroom_S[omega={x:.3g}]", v, e, t) for x, v, e, t in zip(s.x, s.value, s.stderr, s_t)]
    metrics.append(Metric("darkroom_S_lowest_band_small", float(s.value[0]), 0.0, 0.01))
    rows += [["S", x, v, e, t] for x, v, e, t in zip(s.x, s.value, s.stderr, s_t)]

    windows = np.array([0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0]) * tau_r / 5.0
    v = pp.estimate_variance_curve(ens, windows)
    v_t = pp.darkroom_variance(windows, tau_r)
    metrics += [sigma_metric(f"darkroom_V[T={x:.3g}]", a, e, t) for x, a, e, t in zip(v.x, v.value, v.stderr, v_t)]
    rows += [["V", x, a, e, t] for x, a, e, t in zip(v.x, v.value, v.stderr, v_t)]
    params = {"runs": runs, "seed": seed, "tau_r": tau_r, "horizon": horizon}
    return ExperimentResult("darkroom", params, ["quantity", "x", "estimate", "stderr", "target"], rows, metrics, ens)


# ---------------------------------------------------------------- Rabi


def run_rabi(gammas: Sequence[float] = (0.1, 1.0, 2.0, 10.0), t_max: float = 50.0, points: int = 501,
             a: float = 0.5) -> ExperimentResult:
    t = np.linspace(0.0, t_max, points)
    rows: list[list[Any]] = []
    metrics: list[Metric] = []
    for gamma in gammas:
        p = two_level.RabiParams(0.0, gamma, a)
        traj = two_level.integrate_generalized_rabi(p, t)
        closed = two_level.rho22_closed(t, gamma, a)
        err = float(np.max(np.abs(traj["rho22"] - closed)))
        metrics.append(Metric(f"rabi_max_error[gamma={gamma:g}]", err, 0.0, 1e-8))
        ss = two_level.steady_state(p)
        rho22_inf, rho12_inf = two_level.steady_state_closed(gamma, a)
        metrics.append(Metric(f"steady_rho22[gamma={gamma:g}]", ss.rho22, rho22_inf, 1e-10))
        metrics.append(Metric(f"steady_rho12_imag[gamma={gamma:g}]", ss.rho12_imag, rho12_inf, 1e-10))
        rows += [[gamma, ti, r, 2.0 * gamma * r] for ti, r in zip(t, traj["rho22"])]
    params = {"gammas": list(gammas), "t_max": t_max, "points": points, "a": a}
    return ExperimentResult("rabi", params, ["gamma", "t", "rho22", "G"], rows, metrics)


# ---------------------------------------------------------------- waiting times

DISTANCE_TABLE = {0.996: 1.6, 0.998: 0.066, 1.0: 0.1, 1.04: 3.2}


def run_waiting(gamma: float = 2.0, t_max: float = 20.0, points: int = 401,
                rate_gammas: Sequence[float] = (0.01, 0.5, 2.0, 50.0), distance_gamma: float = 0.001) -> ExperimentResult:
    metrics: list[Metric] = []
    law = two_level.waiting_time_exact(gamma)
    t = np.linspace(0.0, t_max, points)
    rows = [[ti, w, we] for ti, w, we in zip(t, two_level.waiting_time_approx(t, gamma), law(t))]

    if gamma == 2.0:
        r3 = math.sqrt(3.0)
        expected = {-(2 - r3): 1 / 3, -(2 + r3): 1 / 3, -2.0: -2 / 3}
        for pole, weight in expected.items():
            k = int(np.argmin([abs(p - pole) for p in law.poles]))
            metrics.append(Metric(f"pole[{pole:.6f}]", law.poles[k].real, pole, 1e-9))
            metrics.append(Metric(f"weight[{pole:.6f}]", law.weights[k].real, weight, 1e-9))

    for g in rate_gammas:
        lg = two_level.waiting_time_exact(g)
        metrics.append(Metric(f"integral_w[gamma={g:g}]", lg.total(), 1.0, 1e-9))
        metrics.append(Metric(f"rate[gamma={g:g}]", 1.0 / lg.mean(), two_level.stationary_rate(g),
                              1e-9 * two_level.stationary_rate(g)))

    distances = {k: two_level.waiting_distance(k / 2.0, distance_gamma) for k in DISTANCE_TABLE}
    for k, ref in DISTANCE_TABLE.items():
        ratio = distances[k] / ref
        metrics.append(Metric(f"distance_factor[2a={k:g}]", math.log2(ratio), 0.0, 1.0))
    order_ok = sorted(distances, key=distances.get) == sorted(DISTANCE_TABLE, key=DISTANCE_TABLE.get)
    metrics.append(Metric("distance_ordering", float(order_ok), 1.0, 0.0))
    params = {"gamma": gamma, "t_max": t_max, "points": points, "distance_gamma": distance_gamma}
    return ExperimentResult("waiting", params, ["t", "W", "w_exact"], rows, metrics)


# ---------------------------------------------------------------- circuits


def run_circuit(L: float = 1e-6, C: float = 1e-9, G: float = 1e-5, omega_range: tuple[float, float, int] | None = None,
                source: float = 1.0, seed: int = 0) -> ExperimentResult:
    c = circuits.TunedCircuit(L, C, G)
    if omega_range is None:
        w0, width = c.omega0, G / C
        omega_range = (w0 - 10 * width, w0 + 10 * width, 201)
    lo, hi, n = omega_range
    omega = np.linspace(lo, hi, int(n))
    P = circuits.dissipated_power(c, source, omega)
    E = circuits.stored_energy(c, source, omega)
    Y = circuits.admittance(c, omega)
    rows = [[w, p, e, y.real, y.imag] for w, p, e, y in zip(omega, P, E, Y)]
    metrics = [
        Metric("fwhp_over_G_by_C", circuits.full_width_half_power(c) * C / G, 1.0, 1e-9),
        Metric("energy_integral_ratio", circuits.integrated_energy(c, source) * 4 * G / abs(source) ** 2, 1.0, 1e-6),
    ]
    worst = 0.0
    for k in range(10):
        net = circuits.random_ladder(5, seed + k)
        left, right = circuits.admittance_derivative_identity(net, 1.0 + 0.37 * k)
        worst = max(worst, abs(left - right) / max(abs(right), 1e-300))
    metrics.append(Metric("dispersion_identity_worst", worst, 0.0, 1e-8))
    for temp in (3.0, 300.0):
        val = circuits.nyquist_classical_check(G, C, temp)
        metrics.append(Metric(f"nyquist_ratio[T={temp:g}]", val / (circuits.K_B * temp / 2.0), 1.0, 1e-6))
    worst = 0.0
    for w in (1e11, 1e13, 1e14):
        for temp in (3.0, 300.0, 3000.0):
            worst = max(worst, abs(circuits.infer_alpha(w, temp) / (circuits.HBAR * w) - 1.0))
    metrics.append(Metric("infer_alpha_worst_relative", worst, 0.0, 1e-9))
    params = {"L": L, "C": C, "G": G, "omega_range": list(omega_range), "source": source}
    return ExperimentResult("circuit", params, ["omega", "P", "E", "Y_re", "Y_im"], rows, metrics)


# ---------------------------------------------------------------- C-state


def _cstate_run(index, rng, potential, G, omega0, duration):
    return circuits.cstate_montecarlo(potential, G, omega0, duration, rng).series


def run_cstate(runs: int = 20, seed: int = 0, workers: int | None = None, voltage: float = 1.0, G: float = 1e-3,
               omega0: float = 1e15, events: float = 2e5, phase: float = 1.0) -> ExperimentResult:
    quantum = circuits.HBAR * omega0
    rate = G * voltage**2 / quantum
    duration = events / rate
    n_values = np.arange(1, 161)
    edges = list(2.0 * math.pi * np.array([1, 41, 81, 121, 161]) / duration)
    metrics: list[Metric] = []
    rows: list[list[Any]] = []
    estimates = {}
    for k, ph in enumerate((0.0, phase)):
        v = voltage * cmath.exp(1j * ph)
        ens = map_runs(partial(_cstate_run, potential=v, G=G, omega0=omega0, duration=duration), runs, seed + k, workers)
        noise = pp.estimate_relative_noise(ens, n_values, band_edges=edges)
        scaled, err = noise.value * rate, noise.stderr * rate
        estimates[ph] = (scaled, err)
        metrics += [sigma_metric(f"noise[phase={ph:g},omega/D={x / rate:.3g}]", s, e, 0.0)
                    for x, s, e in zip(noise.x, scaled, err)]
        rows += [[ph, x / rate, s, e] for x, s, e in zip(noise.x, scaled, err)]
        var = pp.estimate_variance_curve(ens, np.array([100.0, 300.0, 1000.0]) / rate)
        metrics += [sigma_metric(f"dispersion[phase={ph:g},T*D={x * rate:.3g}]", a, e, 0.0)
                    for x, a, e in zip(var.x, var.value, var.stderr)]
    (a0, e0), (a1, e1) = estimates[0.0], estimates[phase]
    metrics += [sigma_metric(f"phase_invariance[band={b}]", d, math.hypot(x, y), 0.0)
                for b, (d, x, y) in enumerate(zip(a1 - a0, e0, e1))]
    params = {"runs": runs, "seed": seed, "voltage": voltage, "G": G, "omega0": omega0, "events": events, "phase": phase}
    return ExperimentResult("cstate", params, ["phase", "omega_over_rate", "noise_times_rate", "stderr"], rows, metrics)


# ---------------------------------------------------------------- cavity


def run_cavity(atoms: int = 20, jumps: int = 10**7, seed: int = 0, small_atoms: int = 2, small_jumps: int = 10**6,
               spectrum_atoms: int = 100, spectrum_jumps: int = 4 * 10**6, spectrum_bin: float = 1e-4) -> ExperimentResult:
    rng_seeds = np.random.SeedSequence(seed).spawn(3)
    traj = cavity.simulate(atoms, jumps, np.random.default_rng(rng_seeds[0]))
    occ = traj.occupancy()
    exact = cavity.stationary_distribution(atoms)
    m = np.arange(atoms + 1)
    mean = float(occ @ m)
    var = float(occ @ (m - mean) ** 2)
    metrics = [
        Metric("total_variation", cavity.total_variation(occ, exact), 0.0, 0.01),
        Metric("mean_relative", mean / (atoms / 2.0), 1.0, 0.02),
        Metric("variance_relative", var / (atoms / 4.0), 1.0, 0.02),
        Metric(f"pr0[N={atoms}]", float(occ[0]), float(exact[0]), 0.01),
        Metric("detailed_balance_exact_N_le_30", float(all(cavity.detailed_balance_exact(n) for n in range(1, 31))), 1.0, 0.0),
        Metric("langevin_variance_integral", cavity.langevin_variance(atoms), atoms / 4.0, 0.0),
    ]
    rows = [[k, o, e] for k, o, e in zip(m, occ, exact)]
    if small_atoms:
        small = cavity.simulate(small_atoms, small_jumps, np.random.default_rng(rng_seeds[1])).occupancy()
        metrics.append(Metric(f"pr0[N={small_atoms}]", float(small[0]), float(cavity.stationary_distribution(small_atoms)[0]), 0.01))
    if spectrum_atoms:
        n = spectrum_atoms
        st = cavity.simulate(n, spectrum_jumps, np.random.default_rng(rng_seeds[2]))
        edges = np.geomspace(0.1 * n, 10.0 * n, 9)
        bands = cavity.estimate_spectrum(st, spectrum_bin, edges, lambda w: cavity.langevin_spectrum(n, w))
        metrics += [Metric(f"langevin_ratio[N={n},omega={c:.3g}]", v / r, 1.0, 0.1, e / r)
                    for c, v, r, e in zip(bands.centre, bands.value, bands.reference, bands.stderr)]
    params = {"atoms": atoms, "jumps": jumps, "seed": seed, "small_atoms": small_atoms,
              "spectrum_atoms": spectrum_atoms, "spectrum_jumps": spectrum_jumps}
    return ExperimentResult("cavity", params, ["m", "pr_empirical", "pr_exact"], rows, metrics)


# ---------------------------------------------------------------- reference math


def run_integrals(seed: int = 0, cubics: int = 200, bicomplex: int = 200) -> ExperimentResult:
    rows: list[list[Any]] = []
    worst = 0.0
    for (mm, nn) in core_math.REFERENCE_INDICES:
        for g in (1.5, 2.0, 4.0):
            for y in (-1.0, 0.0, 0.5, 2.0):
                closed = core_math.reference_integral_closed(mm, nn, g, y)
                quad = core_math.reference_integral(mm, nn, g, y)
                worst = max(worst, abs(quad - closed) / max(1.0, abs(closed)))
                rows.append([mm, nn, g, y, closed, quad])
    metrics = [Metric("reference_integrals_worst", worst, 0.0, 1e-6)]
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cubics):
        a2, a1, a0 = rng.uniform(-10, 10, 3)
        scale = max(1.0, abs(a2), abs(a1), abs(a0))
        for p in core_math.solve_cubic(a2, a1, a0):
            worst = max(worst, abs(((p + a2) * p + a1) * p + a0) / scale)
    metrics.append(Metric("cubic_residual_worst", worst, 0.0, 1e-10))
    worst = 0.0
    for _ in range(bicomplex):
        u = core_math.BiComplex(*rng.normal(size=4))
        if not u.is_invertible(1e-6):
            continue
        one = u * u.inverse()
        worst = max(worst, max(abs(x - y) for x, y in zip(one.components(), (1.0, 0.0, 0.0, 0.0))))
    metrics.append(Metric("bicomplex_roundtrip_worst", worst, 0.0, 1e-12))
    params = {"seed": seed, "cubics": cubics, "bicomplex": bicomplex}
    return ExperimentResult("integrals", params, ["m", "n", "g", "y", "closed", "quadrature"], rows, metrics)
