"""Resonantly driven two-level electron and its photo-event statistics.

Conventions. Unless stated otherwise, times are in units of 1/Omega_R
(so the Rabi frequency is 1) and gamma is the downward rate, with the
upward rate set to zero. The Bloch variables are x = 2 Re rho12,
y = 2 Im rho12, z = rho22 - rho11, and the damped equations read

    dx/dt = -2 a Gam x
    dy/dt = -Om z - 2 a Gam y
    dz/dt =  Om y - 2 Gam z + 2 (g_up - g_down),      Gam = g_up + g_down.

With these equations Im rho12 is positive while the electron absorbs. The
undamped amplitude solution starting in the lower state carries the opposite
sign (Im rho12 = -sin(Om t)/2), which :func:`pure_rabi` keeps; power helpers
take an explicit sign instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from .constants import E_CHARGE, HBAR, M_ELECTRON
from .core_math import (
    ExponentialSum,
    RenewalLaw,
    _partial_fractions,
    heaviside_invert,
    renewal_correlation,
    solve_quadratic,
)

DEFAULT_A = 0.5
CONFLUENT_WINDOW = 1e-4


# ---------------------------------------------------------------- square well


@dataclass(frozen=True)
class SquareWell:
    """Infinite well of width ``d`` centred on the origin."""

    d: float
    mass: float = M_ELECTRON

    def __post_init__(self):
        if self.d <= 0 or self.mass <= 0:
            raise ValueError("width and mass must be positive")


def well_levels(w: SquareWell, n: int) -> float:
    if n not in (1, 2):
        raise ValueError("only levels n = 1 and n = 2 are modelled")
    return math.pi**2 * HBAR**2 * n**2 / (2.0 * w.mass * w.d**2)


def transition_frequency(w: SquareWell) -> float:
    return 3.0 * math.pi**2 * HBAR / (2.0 * w.mass * w.d**2)


def wavefunction(w: SquareWell, n: int, x):
    """Even ground state and odd first excited state, zero outside the well."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) <= w.d / 2
    norm = math.sqrt(2.0 / w.d)
    if n == 1:
        psi = norm * np.cos(math.pi * x / w.d)
    elif n == 2:
        psi = norm * np.sin(2.0 * math.pi * x / w.d)
    else:
        raise ValueError("only levels n = 1 and n = 2 are modelled")
    return np.where(inside, psi, 0.0)


def transition_element(w: SquareWell) -> float:
    return 16.0 * w.d / (9.0 * math.pi**2)


def transition_element_numeric(w: SquareWell) -> float:
    """Position matrix element by quadrature over the well."""
    half = w.d / 2
    val, _ = integrate.quad(
        lambda x: x * wavefunction(w, 1, x) * wavefunction(w, 2, x), -half, half, epsabs=0.0, epsrel=1e-13
    )
    return val


def momentum_element_numeric(w: SquareWell) -> complex:
    """-i hbar times the integral of psi1 d(psi2)/dx over the well."""
    half = w.d / 2
    k = 2.0 * math.pi / w.d
    dpsi2 = lambda x: math.sqrt(2.0 / w.d) * k * math.cos(k * x)  # noqa: E731
    val, _ = integrate.quad(lambda x: wavefunction(w, 1, x) * dpsi2(x), -half, half, epsabs=0.0, epsrel=1e-13)
    return -1j * HBAR * val


def oscillator_strength(w: SquareWell) -> float:
    return 2.0 * w.mass * transition_frequency(w) * transition_element(w) ** 2 / HBAR


def rabi_frequency(w: SquareWell, voltage: float) -> float:
    """Rabi frequency for an rms optical potential ``voltage`` across the well."""
    if voltage < 0:
        raise ValueError("voltage must be non-negative")
    return E_CHARGE * math.sqrt(2.0) * voltage * transition_element(w) / (w.d * HBAR)


# ---------------------------------------------------------------- pure Rabi


@dataclass(frozen=True)
class BlochState:
    x: float
    y: float
    z: float

    @property
    def rho22(self) -> float:
        return 0.5 * (1.0 + self.z)

    @property
    def rho12_imag(self) -> float:
        return 0.5 * self.y

    def purity_radius(self) -> float:
        return self.x**2 + self.y**2 + self.z**2

    def is_physical(self, tol: float = 1e-9) -> bool:
        return self.purity_radius() <= 1.0 + tol

    @classmethod
    def lower(cls) -> "BlochState":
        return cls(0.0, 0.0, -1.0)

    @classmethod
    def upper(cls) -> "BlochState":
        return cls(0.0, 0.0, 1.0)


def pure_rabi(t, rabi: float = 1.0, excited: bool = False) -> dict[str, np.ndarray]:
    """Undamped amplitude solution in the amplitude sign convention."""
    t = np.asarray(t, dtype=float)
    phase = rabi * t
    s = np.sin(phase)
    if excited:
        rho22 = np.cos(phase / 2) ** 2
        rho12_imag = s / 2
    else:
        rho22 = np.sin(phase / 2) ** 2
        rho12_imag = -s / 2
    return {"rho22": rho22, "rho12_imag": rho12_imag, "y": 2 * rho12_imag, "z": 2 * rho22 - 1}


def integrate_amplitudes(t, rabi: float = 1.0, c1: complex = 1.0, c2: complex = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Integrate dC1/dt = i(Om/2)C2, dC2/dt = i(Om/2)C1 and return rho22, Im(C1 C2*)."""
    t = np.asarray(t, dtype=float)

    def rhs(_, u):
        a = u[0] + 1j * u[1]
        b = u[2] + 1j * u[3]
        da = 0.5j * rabi * b
        db = 0.5j * rabi * a
        return [da.real, da.imag, db.real, db.imag]

    c1, c2 = complex(c1), complex(c2)
    sol = integrate.solve_ivp(
        rhs, (0.0, float(t[-1])), [c1.real, c1.imag, c2.real, c2.imag], t_eval=t,
        method="DOP853", rtol=1e-12, atol=1e-13,
    )
    a = sol.y[0] + 1j * sol.y[1]
    b = sol.y[2] + 1j * sol.y[3]
    return np.abs(b) ** 2, (a * np.conj(b)).imag


def interaction_power(t, w: SquareWell, voltage: float, emitting: bool = False):
    """Cycle-averaged power from the optical source, positive while absorbing."""
    rabi = rabi_frequency(w, voltage)
    sign = -1.0 if emitting else 1.0
    return sign * HBAR * transition_frequency(w) * rabi * np.sin(rabi * np.asarray(t, dtype=float)) / 2


def interaction_energy(tau, w: SquareWell, voltage: float, emitting: bool = False):
    rabi = rabi_frequency(w, voltage)
    sign = -1.0 if emitting else 1.0
    return sign * HBAR * transition_frequency(w) * np.sin(rabi * np.asarray(tau, dtype=float) / 2) ** 2


def induced_conductance(t, w: SquareWell, voltage: float, emitting: bool = False):
    """Conductance seen by the source, G(t) proportional to sin(Om t)/Om."""
    rabi = rabi_frequency(w, voltage)
    t = np.asarray(t, dtype=float)
    shape = np.sin(rabi * t) / rabi if rabi > 0 else t
    sign = -1.0 if emitting else 1.0
    return sign * transition_frequency(w) * E_CHARGE**2 / HBAR * (transition_element(w) / w.d) ** 2 * shape


def small_time_conductance(t, w: SquareWell):
    """Short-time conductance for unit oscillator strength, free of hbar."""
    return E_CHARGE**2 * np.asarray(t, dtype=float) / (2.0 * w.mass * w.d**2)


# ---------------------------------------------------------------- generalized Rabi


@dataclass(frozen=True)
class RabiParams:
    gamma_up: float = 0.0
    gamma_down: float = 1.0
    a: float = DEFAULT_A
    rabi: float = 1.0

    def __post_init__(self):
        if self.gamma_up < 0 or self.gamma_down < 0:
            raise ValueError("rates must be non-negative")

    @property
    def total(self) -> float:
        return self.gamma_up + self.gamma_down


def minimal_decoherence(gamma_up: float, gamma_down: float) -> float:
    """Smallest admissible 2a, namely (sqrt(g_up) - sqrt(g_down))^2 / (g_up + g_down)."""
    s = gamma_up + gamma_down
    if s <= 0:
        raise ValueError("at least one rate must be positive")
    return (math.sqrt(gamma_up) - math.sqrt(gamma_down)) ** 2 / s


def admissibility(gamma_up: float, gamma_down: float, a: float, tol: float = 1e-12) -> tuple[bool, float]:
    """Whether 2a >= 1 - sqrt(1 - b^2), and the minimal value of 2a."""
    s = gamma_up + gamma_down
    if s <= 0:
        raise ValueError("at least one rate must be positive")
    b = (gamma_up - gamma_down) / s
    bound = 1.0 - math.sqrt(max(0.0, 1.0 - b * b))
    return 2.0 * a >= bound - tol, minimal_decoherence(gamma_up, gamma_down)


def bloch_rhs(p: RabiParams):
    gam = p.total
    drive = 2.0 * (p.gamma_up - p.gamma_down)
    damp = 2.0 * p.a * gam

    def rhs(_, u):
        x, y, z = u
        return [-damp * x, -p.rabi * z - damp * y, p.rabi * y - 2.0 * gam * z + drive]

    return rhs


def integrate_generalized_rabi(
    p: RabiParams,
    t,
    initial: BlochState = BlochState.lower(),
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> dict[str, np.ndarray]:
    """Integrate the damped Bloch equations on the grid ``t`` (t[0] is the start)."""
    ok, _ = admissibility(p.gamma_up, p.gamma_down, p.a) if p.total > 0 else (True, 0.0)
    if not ok:
        raise ValueError("decoherence parameter is below the admissible bound")
    t = np.asarray(t, dtype=float)
    sol = integrate.solve_ivp(
        bloch_rhs(p), (float(t[0]), float(t[-1])), [initial.x, initial.y, initial.z],
        t_eval=t, method="DOP853", rtol=rtol, atol=atol,
    )
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    x, y, z = sol.y
    return {"t": t, "x": x, "y": y, "z": z, "rho22": 0.5 * (1 + z), "rho11": 0.5 * (1 - z), "rho12_imag": 0.5 * y}


def purity_rate_at_start(p: RabiParams, state: BlochState) -> float:
    """d(x^2 + y^2 + z^2)/dt at the given state."""
    dx, dy, dz = bloch_rhs(p)(0.0, [state.x, state.y, state.z])
    return 2.0 * (state.x * dx + state.y * dy + state.z * dz)


def steady_state(p: RabiParams) -> BlochState:
    """Stationary Bloch vector by a direct linear solve."""
    gam = p.total
    damp = 2.0 * p.a * gam
    m = np.array([[-damp, 0.0, 0.0], [0.0, -damp, -p.rabi], [0.0, p.rabi, -2.0 * gam]])
    rhs = np.array([0.0, 0.0, -2.0 * (p.gamma_up - p.gamma_down)])
    x, y, z = np.linalg.solve(m, rhs)
    return BlochState(float(x), float(y), float(z))


def steady_state_closed(gamma: float, a: float = DEFAULT_A) -> tuple[float, float]:
    """(rho22, Im rho12) at long times for downward rate gamma and unit Rabi frequency."""
    den = 1.0 + 4.0 * a * gamma**2
    return 1.0 / (2.0 * den), gamma / den


def _exponents(gamma: float, a: float) -> tuple[float, float]:
    """Damping mu and squared beat rate kappa^2 of the (y, z) system."""
    mu = -(1.0 + a) * gamma
    kappa2 = (1.0 - a) ** 2 * gamma**2 - 1.0
    return mu, kappa2


def _cosh_and_sinhc(kappa2: float, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """cosh(kappa t) and sinh(kappa t)/kappa, real for either sign of kappa^2."""
    if kappa2 > 0:
        k = math.sqrt(kappa2)
        return np.cosh(k * t), np.sinh(k * t) / k
    if kappa2 < 0:
        k = math.sqrt(-kappa2)
        return np.cos(k * t), np.sin(k * t) / k
    return np.ones_like(t), t.copy()


def rho22_closed(t, gamma: float, a: float = DEFAULT_A):
    """Upper-state population after starting in the lower state (unit Rabi frequency)."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    t = np.asarray(t, dtype=float)
    mu, kappa2 = _exponents(gamma, a)
    if kappa2 > 0:
        # split cosh and sinh so that exp(mu t) never multiplies an overflowing factor
        k = math.sqrt(kappa2)
        up, down = np.exp((mu + k) * t), np.exp((mu - k) * t)
        decay = 0.5 * (mu / k - 1.0) * up - 0.5 * (mu / k + 1.0) * down
    else:
        ch, shc = _cosh_and_sinhc(kappa2, t)
        decay = np.exp(mu * t) * (mu * shc - ch)
    return (1.0 + decay) / (2.0 + 8.0 * a * gamma**2)


def event_density(t, gamma: float, a: float = DEFAULT_A):
    """Probability density of a photo-event at t after one at 0, G(t) = 2 gamma rho22."""
    return 2.0 * gamma * rho22_closed(t, gamma, a)


def stationary_rate(gamma: float, a: float = DEFAULT_A) -> float:
    return gamma / (1.0 + 4.0 * a * gamma**2)


def normalized_correlation(tau, gamma: float, a: float = DEFAULT_A):
    return rho22_closed(tau, gamma, a) / steady_state_closed(gamma, a)[0]


def relative_noise(omega, gamma: float, a: float = DEFAULT_A):
    """Relative noise 2 Re of the Laplace transform of g - 1 at i*omega."""
    mu, kappa2 = _exponents(gamma, a)
    s = mu - 1j * np.asarray(omega, dtype=float)
    return 2.0 * ((mu + s) / (s * s - kappa2)).real


def relative_noise_zero(gamma: float, a: float = DEFAULT_A) -> float:
    return -4.0 * (1.0 + a) * gamma / (1.0 + 4.0 * a * gamma**2)


def correlation_and_noise(gamma_o: float, rabi: float = 1.0, a: float = DEFAULT_A) -> dict:
    """g(tau) as a callable of physical time and N(0) in physical units."""
    if gamma_o <= 0:
        raise ValueError("gamma_o must be positive")
    return {
        "g": lambda tau: normalized_correlation(rabi * np.asarray(tau, dtype=float), gamma_o, a),
        "N0": relative_noise_zero(gamma_o, a) / rabi,
    }


def saturated_conductance(gamma_o: float, rabi: float = 1.0, hbar_omega: float = 1.0) -> dict[str, float]:
    """Stationary event rate, its weak-field limit, and the saturation factor."""
    if gamma_o <= 0:
        raise ValueError("gamma_o must be positive")
    rate = gamma_o * rabi / (1.0 + 2.0 * gamma_o**2)
    weak = rabi / (2.0 * gamma_o)
    return {
        "rate": rate,
        "weak_field_rate": weak,
        "weak_field_power": weak * hbar_omega,
        "saturation": 2.0 * gamma_o**2 / (1.0 + 2.0 * gamma_o**2),
    }


def bias_rates(bias_energy: float, hbar_omega: float, width: float) -> tuple[float, float]:
    """Upward and downward rates width * exp(+-(eU - hbar w)/(hbar width)); energies in joules, width in 1/s."""
    x = (bias_energy - hbar_omega) / (HBAR * width)
    return width * math.exp(x), width * math.exp(-x)


def energy_bookkeeping_residual(tau: float, p: RabiParams, points: int = 4001) -> float:
    """Supplied energy minus (stored plus dissipated), in units of hbar*omega_o."""
    t = np.linspace(0.0, tau, points)
    traj = integrate_generalized_rabi(p, t)
    supplied = p.rabi * integrate.simpson(traj["rho12_imag"], x=t)
    flow = 2.0 * p.gamma_down * traj["rho22"] - 2.0 * p.gamma_up * traj["rho11"]
    dissipated = integrate.simpson(flow, x=t)
    return float(supplied - traj["rho22"][-1] - dissipated)


# ---------------------------------------------------------------- waiting times


def waiting_time_approx(t, gamma: float, rabi: float = 1.0):
    """Waiting-time density from the undamped event density G = gamma (1 - cos Om t)."""
    t = np.asarray(t, dtype=float)
    return gamma * (1.0 - np.cos(rabi * t)) * np.exp(-gamma * (t - np.sin(rabi * t) / rabi))


def sample_waiting_approx(rng: np.random.Generator, size: int, gamma: float) -> np.ndarray:
    """Invert the cumulative hazard gamma (t - sin t) for unit Rabi frequency."""
    target = -np.log(rng.random(size)) / gamma
    # t - sin t is increasing; bracket with t - 1 <= H <= t + 1
    lo = np.maximum(target - 1.0, 0.0)
    hi = target + 1.0 + math.pi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        below = mid - np.sin(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def waiting_denominator(gamma: float, a: float = DEFAULT_A) -> list[float]:
    """Cubic p^3 + 2(1+a)g p^2 + (1+4a g^2) p + g, highest power first."""
    return [1.0, 2.0 * (1.0 + a) * gamma, 1.0 + 4.0 * a * gamma**2, gamma]


def _confluent_law(gamma: float) -> RenewalLaw:
    # at 2a = 1 the cubic factors as (p+g)((p+g)^2 - alpha^2); expand (cosh(alpha t) - 1)/alpha^2
    alpha2 = gamma**2 - 1.0
    weights = (gamma / 2.0, gamma * alpha2 / 24.0, gamma * alpha2**2 / 720.0)
    return RenewalLaw(weights, (-gamma,) * 3, (2, 4, 6))


def waiting_time_exact(gamma: float, a: float = DEFAULT_A) -> RenewalLaw:
    """Exact waiting-time density as a sum of exponentials (unit Rabi frequency)."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if a == DEFAULT_A and abs(gamma - 1.0) < CONFLUENT_WINDOW:
        return _confluent_law(gamma)
    law = heaviside_invert([gamma], waiting_denominator(gamma, a))
    return RenewalLaw(law.weights, law.poles, law.orders)


def waiting_law_factors(gamma: float) -> tuple[float, complex]:
    """For 2a = 1 the poles are -gamma and -gamma +- alpha with alpha^2 = gamma^2 - 1."""
    alpha = complex(gamma**2 - 1.0) ** 0.5
    return -gamma, alpha


def renewal_event_density(gamma: float, a: float = DEFAULT_A) -> ExponentialSum:
    """G(t) rebuilt from the waiting-time law through G = w / (1 - w).

    Works on the exact rational form g / (den(p) - g), so it also covers the
    confluent point where :func:`waiting_time_exact` switches to a series.
    """
    if a == DEFAULT_A and abs(gamma - 1.0) < CONFLUENT_WINDOW:
        den = np.array(waiting_denominator(gamma, a)[::-1])
        den[0] = 0.0  # the constant term gamma cancels in den - gamma
        return _partial_fractions(np.array([gamma]), den)
    return renewal_correlation(waiting_time_exact(gamma, a))


def _gauss_legendre_integral(f, t_max: float, panel: float, nodes: int = 48) -> float:
    x, wts = np.polynomial.legendre.leggauss(nodes)
    n_panels = int(math.ceil(t_max / panel))
    edges = np.arange(n_panels + 1) * panel
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * panel
    total = 0.0
    for chunk in range(0, n_panels, 4096):
        m = mid[chunk : chunk + 4096]
        pts = (m[:, None] + half * x[None, :]).ravel()
        vals = f(pts).reshape(m.size, nodes)
        total += half * float((vals @ wts).sum())
    return total


def waiting_distance(a: float, gamma: float, decay_lengths: float = 40.0) -> float:
    """10^6 <tau> times the squared L2 distance between exact and approximate laws.

    Integration runs to ``decay_lengths / gamma`` using Gauss-Legendre panels
    one Rabi period long.
    """
    law = waiting_time_exact(gamma, a)
    mean = law.mean()
    f = lambda t: (law(t) - waiting_time_approx(t, gamma)) ** 2  # noqa: E731
    total = _gauss_legendre_integral(f, decay_lengths / gamma, 2.0 * math.pi)
    return 1e6 * mean * total


# ---------------------------------------------------------------- equal rates


def equal_gamma_dynamics(width: float, t) -> dict[str, np.ndarray]:
    """Solve dy/dt = -z, dz/dt = y - 2 w z from y = 0, z = -1; G = w z."""
    if width <= 0:
        raise ValueError("width must be positive")
    t = np.asarray(t, dtype=float)
    l1, l2 = solve_quadratic(1.0, 2.0 * width, 1.0)
    # z'' + 2w z' + z = 0 with z(0) = -1, z'(0) = y(0) - 2w z(0) = 2w
    z0, dz0 = -1.0, 2.0 * width
    if abs(l1 - l2) > 1e-9:
        c1 = (dz0 - l2 * z0) / (l1 - l2)
        c2 = z0 - c1
        z = (c1 * np.exp(l1 * t) + c2 * np.exp(l2 * t)).real
        dz = (c1 * l1 * np.exp(l1 * t) + c2 * l2 * np.exp(l2 * t)).real
    else:
        lam = l1.real
        c2 = dz0 - lam * z0
        z = (z0 + c2 * t) * np.exp(lam * t)
        dz = (c2 + lam * (z0 + c2 * t)) * np.exp(lam * t)
    y = dz + 2.0 * width * z
    return {"t": t, "y": y, "z": z, "G": width * z, "eigenvalues": np.array([l1, l2])}


def equal_gamma_numeric(width: float, t) -> dict[str, np.ndarray]:
    t = np.asarray(t, dtype=float)
    sol = integrate.solve_ivp(
        lambda _, u: [-u[1], u[0] - 2.0 * width * u[1]], (0.0, float(t[-1])), [0.0, -1.0],
        t_eval=t, method="DOP853", rtol=1e-13, atol=1e-15,
    )
    return {"t": t, "y": sol.y[0], "z": sol.y[1]}


__all__: Sequence[str] = [
    "SquareWell", "well_levels", "transition_frequency", "transition_element", "oscillator_strength",
    "rabi_frequency", "pure_rabi", "BlochState", "RabiParams", "admissibility", "integrate_generalized_rabi",
    "rho22_closed", "event_density", "correlation_and_noise", "saturated_conductance", "waiting_time_approx",
    "waiting_time_exact", "waiting_distance", "equal_gamma_dynamics",
]
