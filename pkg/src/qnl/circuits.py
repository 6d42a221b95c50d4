"""Tuned circuits, their noise sources and thermal energy balance.

Admittances use the convention Y = G - i(C w - 1/(L w)), so a capacitor
contributes -i w C and an inductor +i/(L w). Potentials and currents are
rms complex amplitudes: a voltage V across G dissipates G |V|^2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy import integrate, optimize

from .constants import HBAR, K_B
from .ensemble import as_generator
from .point_process import EventSeries


# ---------------------------------------------------------------- tuned circuit


@dataclass(frozen=True)
class TunedCircuit:
    L: float
    C: float
    G: float

    def __post_init__(self):
        if self.L <= 0 or self.C <= 0:
            raise ValueError("L and C must be positive")

    @property
    def omega0(self) -> float:
        return 1.0 / math.sqrt(self.L * self.C)

    @property
    def lifetime(self) -> float:
        if self.G <= 0:
            raise ValueError("the photon lifetime needs a positive conductance")
        return self.C / self.G


def admittance(c: TunedCircuit, omega):
    omega = np.asarray(omega, dtype=float)
    if np.any(omega == 0):
        raise ZeroDivisionError("admittance is singular at zero frequency")
    return c.G - 1j * (c.C * omega - 1.0 / (c.L * omega))


def dissipated_power(c: TunedCircuit, source: complex, omega, exact: bool = True):
    """Power in G when a current source of amplitude ``source`` drives the circuit."""
    omega = np.asarray(omega, dtype=float)
    s2 = abs(source) ** 2
    if exact:
        return c.G * s2 / np.abs(admittance(c, omega)) ** 2
    return c.G * s2 / (c.G**2 + 4.0 * c.C**2 * (omega - c.omega0) ** 2)


def stored_energy(c: TunedCircuit, source: complex, omega, exact: bool = True):
    """Energy in L and C; the small-loss form is tau_p |source|^2 / G / (1 + x^2)."""
    omega = np.asarray(omega, dtype=float)
    s2 = abs(source) ** 2
    if exact:
        v2 = s2 / np.abs(admittance(c, omega)) ** 2
        return 0.5 * (c.C + 1.0 / (c.L * omega**2)) * v2
    x = 2.0 * c.lifetime * (omega - c.omega0)
    return c.lifetime * s2 / c.G / (1.0 + x * x)


def dissipated_spectrum_and_energy(c: TunedCircuit, source: complex, omega, exact: bool = False) -> dict:
    return {"P": dissipated_power(c, source, omega, exact), "E": stored_energy(c, source, omega, exact)}


def full_width_half_power(c: TunedCircuit, exact: bool = True, xtol: float = 1e-15) -> float:
    """Distance between the two half-power points, found by bisection."""
    w0 = c.omega0
    peak = float(dissipated_power(c, 1.0, w0, exact))
    f = lambda w: float(dissipated_power(c, 1.0, w, exact)) - 0.5 * peak  # noqa: E731
    span = c.G / c.C
    hi = w0 + span
    while f(hi) > 0:
        hi += span
    lo = max(w0 - span, w0 * 1e-6)
    while f(lo) > 0:
        lo = 0.5 * lo
    upper = optimize.bisect(f, w0, hi, xtol=xtol * w0, rtol=4 * np.finfo(float).eps, maxiter=400)
    lower = optimize.bisect(f, lo, w0, xtol=xtol * w0, rtol=4 * np.finfo(float).eps, maxiter=400)
    return upper - lower


def half_power_points(c: TunedCircuit) -> tuple[float, float]:
    """Exact half-power frequencies (+-G + sqrt(G^2 + 4C/L)) / 2C."""
    root = math.sqrt(c.G**2 + 4.0 * c.C / c.L)
    return (-c.G + root) / (2.0 * c.C), (c.G + root) / (2.0 * c.C)


def integrated_energy(c: TunedCircuit, source: complex, exact: bool = True) -> float:
    """Integral of the stored energy d omega / 2 pi.

    The exact form is integrated over positive frequencies, the small-loss
    Lorentzian over the whole line.
    """
    w0 = c.omega0
    width = c.G / c.C
    f = lambda w: float(stored_energy(c, source, w, exact))  # noqa: E731
    lo, hi = max(w0 - 50 * width, 0.5 * w0), w0 + 50 * width
    opts = dict(epsabs=0.0, epsrel=1e-12, limit=500)
    mid, _ = integrate.quad(f, lo, hi, points=[w0 - width, w0, w0 + width], **opts)
    # map [hi, inf) onto (0, 1] through w = hi / s
    top, _ = integrate.quad(lambda s: f(hi / s) * hi / (s * s) if s > 0 else 0.0, 0.0, 1.0, **opts)
    if exact:
        bottom, _ = integrate.quad(f, 0.0, lo, **opts)
    else:
        bottom, _ = integrate.quad(f, -np.inf, lo, **opts)
    return (bottom + mid + top) / (2.0 * math.pi)


def fabry_perot_lifetime(t1: float, t2: float, round_trip: float) -> float:
    """Photon lifetime of a cavity with small mirror transmissions t1, t2."""
    if t1 < 0 or t2 < 0 or t1 + t2 <= 0:
        raise ValueError("transmissions must be non-negative with a positive sum")
    return round_trip / (t1 + t2)


@dataclass(frozen=True)
class NoiseSource:
    """Current source of spectral density hbar w0 |G| in each quadrature."""

    G: float
    omega0: float

    @property
    def density(self) -> float:
        return HBAR * self.omega0 * abs(self.G)


# ---------------------------------------------------------------- networks


@dataclass(frozen=True)
class Element:
    kind: str  # "L", "C" or "G"
    value: float

    def __post_init__(self):
        if self.kind not in ("L", "C", "G"):
            raise ValueError(f"unknown element kind {self.kind!r}")
        if self.value <= 0:
            raise ValueError("element values must be positive")

    def admittance(self, omega: float) -> complex:
        if self.kind == "G":
            return complex(self.value)
        if self.kind == "C":
            return -1j * omega * self.value
        return 1j / (self.value * omega)

    def admittance_slope(self, omega: float) -> complex:
        if self.kind == "G":
            return 0j
        if self.kind == "C":
            return -1j * self.value
        return -1j / (self.value * omega**2)


@dataclass(frozen=True)
class Series:
    parts: tuple


@dataclass(frozen=True)
class Parallel:
    parts: tuple


Network = Union[Element, Series, Parallel]


def network_admittance(net: Network, omega: float) -> complex:
    if isinstance(net, Element):
        return net.admittance(omega)
    ys = [network_admittance(p, omega) for p in net.parts]
    if isinstance(net, Parallel):
        return complex(sum(ys))
    return 1.0 / sum(1.0 / y for y in ys)


def network_admittance_slope(net: Network, omega: float) -> complex:
    """Analytic dY/d omega through the tree."""
    if isinstance(net, Element):
        return net.admittance_slope(omega)
    if isinstance(net, Parallel):
        return complex(sum(network_admittance_slope(p, omega) for p in net.parts))
    ys = [network_admittance(p, omega) for p in net.parts]
    dys = [network_admittance_slope(p, omega) for p in net.parts]
    z = sum(1.0 / y for y in ys)
    dz = sum(-dy / y**2 for y, dy in zip(ys, dys))
    return -dz / z**2


def element_states(net: Network, omega: float, voltage: complex) -> list[tuple[Element, complex, complex]]:
    """(element, voltage across it, current through it) for a terminal voltage."""
    if isinstance(net, Element):
        return [(net, voltage, net.admittance(omega) * voltage)]
    out: list[tuple[Element, complex, complex]] = []
    if isinstance(net, Parallel):
        for p in net.parts:
            out.extend(element_states(p, omega, voltage))
        return out
    current = network_admittance(net, omega) * voltage
    for p in net.parts:
        out.extend(element_states(p, omega, current / network_admittance(p, omega)))
    return out


def admittance_derivative_identity(
    net: Network, omega: float, voltage: complex = 1.0, analytic: bool = False
) -> tuple[complex, complex]:
    """Both sides of i V^2 dY/dw = sum(C_k V_k^2 - L_k I_k^2), with complex squares.

    The left side uses a central difference with step omega * 1e-6 unless
    ``analytic`` is set.
    """
    if analytic:
        slope = network_admittance_slope(net, omega)
    else:
        h = omega * 1e-6
        slope = (network_admittance(net, omega + h) - network_admittance(net, omega - h)) / (2.0 * h)
    left = 1j * voltage**2 * slope
    right = 0j
    for el, v, i in element_states(net, omega, voltage):
        if el.kind == "C":
            right += el.value * v**2
        elif el.kind == "L":
            right -= el.value * i**2
    return complex(left), complex(right)


def random_ladder(elements: int = 5, seed=None) -> Network:
    """Alternating series/parallel nesting of random L, C and G elements."""
    rng = as_generator(seed)
    kinds = rng.choice(["L", "C", "G"], size=elements)
    values = np.exp(rng.uniform(-1.0, 1.0, size=elements))
    net: Network = Element(str(kinds[0]), float(values[0]))
    for k in range(1, elements):
        el = Element(str(kinds[k]), float(values[k]))
        net = Series((net, el)) if k % 2 else Parallel((net, el))
    return net


# ---------------------------------------------------------------- thermal balance


def average_oscillator_energy(omega0: float, temperature: float):
    """(hbar w / 2) coth(hbar w / 2 k T): Planck energy plus the half quantum."""
    if np.any(np.asarray(temperature) <= 0):
        raise ValueError("temperature must be positive")
    half = HBAR * np.asarray(omega0, dtype=float) / 2.0
    return half / np.tanh(half / (K_B * np.asarray(temperature, dtype=float)))


def boltzmann_energy(omega0: float, temperature: float, levels: int = 10_000) -> float:
    """Mean of (m + 1/2) hbar w under Boltzmann weights, summed directly."""
    q = HBAR * omega0
    m = np.arange(levels + 1, dtype=float)
    w = np.exp(-m * q / (K_B * temperature))
    return float(np.sum((m + 0.5) * q * w) / np.sum(w))


def riccati_residual(x, numeric: bool = False):
    """df/dx + f^2 - (hbar/2)^2 for f(x) = (hbar/2) coth(hbar x / 2), relative to (hbar/2)^2.

    With x = w / (k T) the function f equals <E> / w. ``numeric`` uses a
    five-point stencil for the derivative.
    """
    x = np.asarray(x, dtype=float)
    c = HBAR / 2.0
    f = lambda u: c / np.tanh(c * u)  # noqa: E731
    if numeric:
        h = 1e-3 * x
        df = (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)
    else:
        df = -(c * c) / np.sinh(c * x) ** 2
    return (df + f(x) ** 2 - c * c) / (c * c)


def thermal_balance(g_absorb: float, g_emit: float, omega0: float, alpha: float) -> float:
    """Energy (alpha/2)(r + 1)/(r - 1) with r = g_absorb / g_emit."""
    if g_emit <= 0 or g_absorb <= g_emit:
        raise ValueError("need g_absorb > g_emit > 0 for a dissipative balance")
    r = g_absorb / g_emit
    return 0.5 * alpha * (r + 1.0) / (r - 1.0)


def infer_alpha(omega0: float, temperature: float) -> float:
    """Quantum of action times w0 making the balance reproduce the oscillator energy.

    The conductance ratio is taken as exp(hbar w0 / k T); alpha is found by
    root bracketing rather than by inverting the linear relation.
    """
    x = HBAR * omega0 / (K_B * temperature)
    if x > 700.0:
        raise ValueError("hbar w0 / k T too large for a finite conductance ratio")
    ratio = math.exp(x)
    target = float(average_oscillator_energy(omega0, temperature))
    scale = HBAR * omega0
    f = lambda a: thermal_balance(ratio, 1.0, omega0, a * scale) - target  # noqa: E731
    a = optimize.brentq(f, 0.0, 2.0 + 4.0 / x, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return a * scale


def nyquist_classical_check(G: float, C: float, temperature: float) -> float:
    """Integral of C S_j / 2(G^2 + C^2 w^2) over all w, d omega / 2 pi, with S_j = 2 k T G."""
    if G <= 0 or C <= 0 or temperature <= 0:
        raise ValueError("parameters must be positive")
    s_j = 2.0 * K_B * temperature * G
    scale = G / C
    # integrate in the reduced variable u = w C / G to keep quad well scaled
    f = lambda u: 1.0 / (1.0 + u * u)  # noqa: E731
    val, _ = integrate.quad(f, -np.inf, np.inf, epsabs=0.0, epsrel=1e-13)
    return C * s_j / (2.0 * G**2) * scale * val / (2.0 * math.pi)


def nyquist_closed(G: float, C: float, temperature: float) -> float:
    """Same integral from the residue value pi / (G C)."""
    s_j = 2.0 * K_B * temperature * G
    return C * s_j / 2.0 * (math.pi / (G * C)) / (2.0 * math.pi)


# ---------------------------------------------------------------- C-state light


@dataclass(frozen=True)
class CStateRun:
    series: EventSeries
    step: float
    rate: float
    negative_fraction: float


def cstate_montecarlo(
    potential: complex,
    G: float,
    omega0: float,
    duration: float,
    seed=None,
    events_per_step: float = 16.0,
    warn_fraction: float = 1e-3,
) -> CStateRun:
    """Photo-events from a fluctuating power P = G|V|^2 + V'C' + V''C''.

    The quadratures C', C'' are independent white Gaussian sequences of
    density hbar w0 G, sampled with step dt = events_per_step / D where
    D = G|V|^2 / hbar w0. An event is emitted each time the running maximum
    of the delivered energy, in units of hbar w0, passes an integer; the
    events of a step are placed uniformly at random inside it.
    """
    if G <= 0 or omega0 <= 0 or duration <= 0:
        raise ValueError("G, omega0 and duration must be positive")
    rng = as_generator(seed)
    quantum = HBAR * omega0
    v = complex(potential)
    mean_power = G * abs(v) ** 2
    rate = mean_power / quantum
    if rate == 0:
        return CStateRun(EventSeries(np.empty(0), duration), duration, 0.0, 0.0)
    dt = events_per_step / rate
    steps = int(math.ceil(duration / dt))
    dt = duration / steps
    sd = math.sqrt(quantum * G / dt)
    c1 = rng.normal(0.0, sd, steps)
    c2 = rng.normal(0.0, sd, steps)
    power = mean_power + v.real * c1 + v.imag * c2
    negative = float(np.mean(power < 0))
    if negative > warn_fraction:
        warnings.warn(f"power negative on {negative:.2%} of steps; refine the grid", RuntimeWarning, stacklevel=2)
    level = np.concatenate(([0.0], np.cumsum(power * dt / quantum)))
    top = np.maximum.accumulate(level)
    passed = np.floor(top).astype(np.int64)
    new = np.diff(passed)
    step_idx = np.repeat(np.arange(steps), new)
    # uniform positions inside each step; even spacing would make short windows sub-Poissonian
    times = np.sort(step_idx + rng.random(step_idx.size)) * dt
    return CStateRun(EventSeries(np.clip(times, 0.0, duration), duration), dt, rate, negative)


def shot_power_density(power: float, omega0: float) -> float:
    """Spectral density hbar w0 P of the power fluctuations."""
    return HBAR * omega0 * power


__all__: Sequence[str] = [
    "TunedCircuit", "admittance", "dissipated_spectrum_and_energy", "full_width_half_power",
    "integrated_energy", "fabry_perot_lifetime", "admittance_derivative_identity", "random_ladder",
    "average_oscillator_energy", "riccati_residual", "thermal_balance", "infer_alpha",
    "nyquist_classical_check", "cstate_montecarlo",
]
