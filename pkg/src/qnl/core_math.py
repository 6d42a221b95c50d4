"""Algebraic and analytic building blocks.

Root finding for low-degree polynomials, sums of exponential terms and
their Laplace algebra (used for renewal processes), bi-complex numbers
for two-frequency signals, and a small family of Lorentzian reference
integrals with closed forms.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

__all__ = [
    "solve_quadratic",
    "solve_cubic",
    "polynomial_roots",
    "ExponentialSum",
    "RenewalLaw",
    "heaviside_invert",
    "renewal_correlation",
    "BiComplex",
    "I1",
    "I2",
    "J",
    "modulated_response",
    "reference_integral",
    "reference_integral_closed",
    "REFERENCE_INDICES",
    "lorentz_quartic_integral",
    "sqrt_pole_integral",
    "sqrt_pole_integral_closed",
]

_OMEGA3 = cmath.exp(2j * math.pi / 3)


def _sort_roots(roots: Sequence[complex]) -> list[complex]:
    return sorted(roots, key=lambda z: (-z.real, -z.imag))


def solve_quadratic(a: complex, b: complex, c: complex) -> list[complex]:
    """Roots of a p^2 + b p + c, sorted by descending real then imaginary part.

    Uses the cancellation-free form: the larger-magnitude root comes from
    ``-(b + sign(b) sqrt(disc)) / 2`` and the other from the product of roots.
    """
    if a == 0:
        raise ValueError("leading coefficient must be non-zero")
    bc = complex(b)
    disc = cmath.sqrt(bc * bc - 4 * a * c)
    # choose the sign that avoids subtracting nearly equal numbers
    if (bc.conjugate() * disc).real >= 0:
        q = -(b + disc) / 2
    else:
        q = -(b - disc) / 2
    if q == 0:
        roots = [0j, 0j]
    else:
        roots = [complex(q / a), complex(c / q)]
    if all(isinstance(x, (int, float)) for x in (a, b, c)):
        roots = [complex(z.real, 0.0) if abs(z.imag) <= 1e-15 * max(1.0, abs(z)) else z for z in roots]
    return _sort_roots(roots)


def _cubic_value(coeffs: tuple[complex, complex, complex], p: complex) -> complex:
    a2, a1, a0 = coeffs
    return ((p + a2) * p + a1) * p + a0


def _cubic_slope(coeffs: tuple[complex, complex, complex], p: complex) -> complex:
    a2, a1, _ = coeffs
    return (3 * p + 2 * a2) * p + a1


def solve_cubic(a2: complex, a1: complex, a0: complex, polish: bool = True) -> list[complex]:
    """Roots of p^3 + a2 p^2 + a1 p + a0.

    Cardano's construction on the depressed cubic y^3 + 3 q y - 2 r = 0 with
    ``q = a1/3 - a2^2/9`` and ``r = a1 a2/6 - a0/2 - a2^3/27``. The two cube
    roots u, v are tied together by ``u v = -q`` so that every branch choice
    yields the same set ``{u w^k + v w^-k}``; for real coefficients with a
    single real root the real cube roots are used. Each root then gets up
    to two Newton steps, kept only if they shrink the residual.
    """
    coeffs = (a2, a1, a0)
    real_input = all(isinstance(x, (int, float, np.floating, np.integer)) for x in coeffs)
    q = a1 / 3 - a2 * a2 / 9
    r = a1 * a2 / 6 - a0 / 2 - a2**3 / 27
    disc = q**3 + r * r
    shift = a2 / 3

    if real_input and disc >= 0:
        s = math.sqrt(disc)
        # larger-magnitude cube root first, the other from u v = -q
        big = r + s if r >= 0 else r - s
        u = float(np.cbrt(big))
        v = -q / u if u != 0 else 0.0
        ys = [u + v, u * _OMEGA3 + v * _OMEGA3.conjugate(), u * _OMEGA3.conjugate() + v * _OMEGA3]
    else:
        s = cmath.sqrt(disc)
        big = r + s if abs(r + s) >= abs(r - s) else r - s
        u = big ** (1 / 3) if big != 0 else 0j
        v = -q / u if u != 0 else 0j
        ys = [u + v, u * _OMEGA3 + v * _OMEGA3.conjugate(), u * _OMEGA3.conjugate() + v * _OMEGA3]

    roots = [complex(y) - shift for y in ys]

    if polish:
        polished = []
        for p in roots:
            best, best_res = p, abs(_cubic_value(coeffs, p))
            for _ in range(2):
                slope = _cubic_slope(coeffs, best)
                if slope == 0:
                    break
                cand = best - _cubic_value(coeffs, best) / slope
                res = abs(_cubic_value(coeffs, cand))
                if res < best_res:
                    best, best_res = cand, res
                else:
                    break
            polished.append(best)
        roots = polished

    if real_input:
        scale = max(1.0, abs(a2), abs(a1) ** 0.5, abs(a0) ** (1 / 3))
        if disc >= 0:
            # exactly one real root (or repeated real roots); snap it
            roots[0] = complex(roots[0].real, 0.0)
            if disc == 0:
                roots = [complex(z.real, 0.0) for z in roots]
        else:
            roots = [complex(z.real, 0.0) if abs(z.imag) <= 1e-12 * scale else z for z in roots]
    return _sort_roots(roots)


def polynomial_roots(coeffs: Sequence[complex]) -> list[complex]:
    """Roots of a polynomial of degree 1 to 3 given highest power first."""
    c = list(coeffs)
    while c and c[0] == 0:
        c.pop(0)
    deg = len(c) - 1
    if deg < 1:
        raise ValueError("polynomial must have degree at least 1")
    if deg == 1:
        return [complex(-c[1] / c[0])]
    if deg == 2:
        return solve_quadratic(c[0], c[1], c[2])
    if deg == 3:
        lead = c[0]
        return solve_cubic(c[1] / lead, c[2] / lead, c[3] / lead)
    raise NotImplementedError("only degrees up to 3 are supported")


@dataclass(frozen=True)
class ExponentialSum:
    """f(t) = sum_k weight_k t^order_k exp(pole_k t) for t >= 0.

    Poles and weights may be complex; for real-valued functions they come in
    conjugate pairs and :meth:`__call__` returns the real part.
    """

    weights: tuple[complex, ...]
    poles: tuple[complex, ...]
    orders: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(complex(w) for w in self.weights))
        object.__setattr__(self, "poles", tuple(complex(p) for p in self.poles))
        object.__setattr__(self, "orders", tuple(int(k) for k in self.orders))
        if len(self.weights) != len(self.poles):
            raise ValueError("weights and poles must have equal length")
        if not self.orders:
            object.__setattr__(self, "orders", (0,) * len(self.poles))
        if len(self.orders) != len(self.poles):
            raise ValueError("orders must match poles")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for c, lam, k in zip(self.weights, self.poles, self.orders):
            term = c * np.exp(lam * t)
            if k:
                term = term * t**k
            out += term
        return out.real

    def laplace(self, p):
        """Laplace transform sum_k weight_k k! / (p - pole_k)^(k+1)."""
        p = np.asarray(p, dtype=complex)
        out = np.zeros(p.shape, dtype=complex)
        for c, lam, k in zip(self.weights, self.poles, self.orders):
            out += c * math.factorial(k) / (p - lam) ** (k + 1)
        return out

    def moment(self, n: int) -> float:
        """integral of t^n f(t) over [0, inf); requires Re(pole) < 0."""
        total = 0j
        for c, lam, k in zip(self.weights, self.poles, self.orders):
            if lam.real >= 0:
                raise ValueError("moment diverges for a pole with non-negative real part")
            total += c * math.factorial(k + n) / (-lam) ** (k + n + 1)
        return total.real

    def constant_term(self) -> float:
        """Weight of the pole at the origin (the long-time limit)."""
        total = 0j
        for c, lam, k in zip(self.weights, self.poles, self.orders):
            if lam == 0 and k == 0:
                total += c
        return total.real

    def decaying_part(self) -> "ExponentialSum":
        keep = [(c, lam, k) for c, lam, k in zip(self.weights, self.poles, self.orders) if not (lam == 0 and k == 0)]
        if not keep:
            return ExponentialSum((), (), ())
        c, lam, k = zip(*keep)
        return ExponentialSum(tuple(c), tuple(lam), tuple(k))

    def tail(self, t):
        """integral of f from t to infinity (all poles must decay)."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for c, lam, k in zip(self.weights, self.poles, self.orders):
            if lam.real >= 0:
                raise ValueError("tail diverges for a pole with non-negative real part")
            acc = np.zeros(t.shape, dtype=complex)
            for j in range(k + 1):
                acc += math.factorial(k) / math.factorial(j) * t**j / (-lam) ** (k - j + 1)
            out += c * np.exp(lam * t) * acc
        return out.real

    def rational(self) -> tuple[np.ndarray, np.ndarray]:
        """Laplace transform as numerator, denominator (ascending powers)."""
        groups: dict[complex, int] = {}
        for lam, k in zip(self.poles, self.orders):
            groups[lam] = max(groups.get(lam, -1), k)
        den = np.array([1.0 + 0j])
        for lam, kmax in groups.items():
            for _ in range(kmax + 1):
                den = P.polymul(den, [-lam, 1.0])
        num = np.zeros(len(den) - 1, dtype=complex)
        for c, lam, k in zip(self.weights, self.poles, self.orders):
            part = np.array([c * math.factorial(k)], dtype=complex)
            for other, kmax in groups.items():
                power = kmax + 1 if other != lam else kmax - k
                for _ in range(power):
                    part = P.polymul(part, [-other, 1.0])
            num[: len(part)] += part
        return num, den


class RenewalLaw(ExponentialSum):
    """Waiting-time density of a renewal process written as an exponential sum."""

    def total(self) -> float:
        return self.moment(0)

    def mean(self) -> float:
        return self.moment(1)

    def cdf(self, t):
        return 1.0 - self.tail(t)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw intervals by inverting the distribution function.

        Safeguarded Newton iteration on a bracket, vectorised over draws.
        """
        u = rng.random(size)
        # survival target: tail(t) = 1 - u, use 1 - u in (0, 1]
        target = 1.0 - u
        slow = min(-lam.real for lam in self.poles)
        if slow <= 0:
            raise ValueError("law must decay")
        lo = np.zeros(size)
        hi = np.full(size, 1.0 / slow)
        # grow the upper bracket until the tail drops below the target
        for _ in range(200):
            bad = self.tail(hi) > target
            if not bad.any():
                break
            hi[bad] *= 2.0
        t = 0.5 * (lo + hi)
        for _ in range(100):
            f = self.tail(t) - target
            lo = np.where(f > 0, t, lo)
            hi = np.where(f > 0, hi, t)
            dens = self(t)
            with np.errstate(divide="ignore", invalid="ignore"):
                newton = t + f / dens
            inside = (newton > lo) & (newton < hi) & np.isfinite(newton)
            t_new = np.where(inside, newton, 0.5 * (lo + hi))
            if np.all(np.abs(t_new - t) <= 1e-13 * np.maximum(t_new, 1e-300)):
                t = t_new
                break
            t = t_new
        return t


def _check_distinct(roots: Sequence[complex], tol: float = 1e-8) -> None:
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            scale = max(1.0, abs(roots[i]), abs(roots[j]))
            if abs(roots[i] - roots[j]) <= tol * scale:
                raise ValueError("repeated roots are not supported by the residue formula")


def heaviside_invert(numerator: Sequence[complex], denominator: Sequence[complex]) -> ExponentialSum:
    """Inverse Laplace transform of num(p)/den(p) with simple poles.

    Coefficients are given highest power first. The result is
    sum_k num(p_k)/den'(p_k) exp(p_k t). Requires deg num < deg den <= 3 and
    distinct roots.
    """
    num = np.trim_zeros(np.asarray(numerator, dtype=complex), "f")
    den = np.trim_zeros(np.asarray(denominator, dtype=complex), "f")
    if len(num) >= len(den):
        raise ValueError("numerator degree must be below denominator degree")
    roots = polynomial_roots(list(den))
    _check_distinct(roots)
    dprime = np.polyder(den)
    weights = tuple(complex(np.polyval(num, r) / np.polyval(dprime, r)) for r in roots)
    return ExponentialSum(weights, tuple(roots), (0,) * len(roots))


def _cluster_roots(roots: Sequence[complex], tol: float) -> list[tuple[complex, int]]:
    clusters: list[list[complex]] = []
    for r in roots:
        for cl in clusters:
            if abs(r - cl[0]) <= tol * max(1.0, abs(r)):
                cl.append(r)
                break
        else:
            clusters.append([r])
    return [(complex(np.mean(cl)), len(cl)) for cl in clusters]


def _taylor(coeffs_asc: np.ndarray, at: complex, order: int) -> np.ndarray:
    """First ``order`` Taylor coefficients of a polynomial about ``at``."""
    out = np.zeros(order, dtype=complex)
    c = np.asarray(coeffs_asc, dtype=complex)
    fact = 1.0
    for k in range(order):
        out[k] = P.polyval(at, c) / fact if c.size else 0.0
        c = P.polyder(c) if c.size > 1 else np.zeros(0, dtype=complex)
        fact *= k + 1
    return out


def _partial_fractions(num_asc: np.ndarray, den_asc: np.ndarray, cluster_tol: float = 1e-6) -> ExponentialSum:
    """Inverse Laplace transform of num/den allowing repeated roots.

    Roots closer than ``cluster_tol`` (relative) are merged and treated as one
    root of the combined multiplicity.
    """
    desc = list(den_asc[::-1] / den_asc[-1])
    if all(abs(complex(c).imag) == 0 for c in desc):
        desc = [complex(c).real for c in desc]
    if abs(den_asc[0]) == 0:
        reduced = desc[:-1]
        roots = [0j] + (polynomial_roots(reduced) if len(reduced) > 1 else [])
    else:
        roots = polynomial_roots(desc)
    clusters = _cluster_roots(roots, cluster_tol)
    # refine merged roots on the derivative that still vanishes there
    refined = []
    for r, mult in clusters:
        if mult > 1:
            d = den_asc
            for _ in range(mult - 1):
                d = P.polyder(d)
            dd = P.polyder(d)
            for _ in range(3):
                slope = P.polyval(r, dd)
                if slope == 0:
                    break
                r = r - P.polyval(r, d) / slope
        refined.append((complex(r), mult))

    weights: list[complex] = []
    poles: list[complex] = []
    orders: list[int] = []
    lead = den_asc[-1]
    for r, mult in refined:
        # den = lead * (p - r)^mult * rest(p)
        rest = np.array([lead], dtype=complex)
        for other, m2 in refined:
            if other == r:
                continue
            for _ in range(m2):
                rest = P.polymul(rest, [-other, 1.0])
        a = _taylor(num_asc, r, mult)
        b = _taylor(rest, r, mult)
        # power-series quotient h = a / b about r
        h = np.zeros(mult, dtype=complex)
        for k in range(mult):
            h[k] = (a[k] - sum(h[i] * b[k - i] for i in range(k))) / b[0]
        # h_k multiplies 1/(p - r)^(mult - k)
        for k in range(mult):
            power = mult - k
            weights.append(complex(h[k] / math.factorial(power - 1)))
            poles.append(r)
            orders.append(power - 1)
    return ExponentialSum(tuple(weights), tuple(poles), tuple(orders))


def renewal_correlation(law: ExponentialSum) -> ExponentialSum:
    """Event density G(t) after an event at t = 0, from G(p) = w/(1 - w).

    The returned sum contains a pole at the origin whose weight is the
    stationary rate, equal to one over the mean waiting time. Repeated poles
    (which occur at critical damping) produce polynomial-times-exponential
    terms.
    """
    num, den = law.rational()
    if abs(den[0]) == 0 or abs(num[0] / den[0] - 1.0) > 1e-6:
        raise ValueError("waiting-time law must integrate to one")
    q = P.polysub(den, num)
    scale = np.max(np.abs(q))
    if np.all(np.abs(np.imag(q)) <= 1e-14 * scale) and np.all(
        np.abs(np.imag(num)) <= 1e-14 * max(np.max(np.abs(num)), 1e-300)
    ):
        q = q.real.astype(complex)
        num = num.real.astype(complex)
    q = np.trim_zeros(q, "b")
    # q(0) vanishes for a normalised law; force it to exact zero
    if abs(q[0]) <= 1e-12 * scale:
        q[0] = 0.0
    if len(q) - 1 > 3:
        raise NotImplementedError("only denominators up to degree 3 are supported")
    return _partial_fractions(num, q)


class BiComplex:
    """a + b i1 + c i2 + d j with i1^2 = i2^2 = -1, j = i1 i2, j^2 = 1.

    Commutative and associative, but with zero divisors: u is invertible
    exactly when a^2 + b^2 + c^2 + d^2 != +-2 (a d - b c).
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: float = 0.0, b: float = 0.0, c: float = 0.0, d: float = 0.0):
        self.a = float(a)
        self.b = float(b)
        self.c = float(c)
        self.d = float(d)

    @staticmethod
    def _coerce(other) -> "BiComplex":
        if isinstance(other, BiComplex):
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return BiComplex(float(other))
        return NotImplemented

    def components(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def __repr__(self) -> str:
        return f"BiComplex({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.components() == other.components()

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return BiComplex(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __neg__(self):
        return BiComplex(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b, c, d = self.components()
        e, f, g, h = o.components()
        return BiComplex(
            a * e - b * f - c * g + d * h,
            a * f + b * e - c * h - d * g,
            a * g + c * e - b * h - d * f,
            a * h + d * e + b * g + c * f,
        )

    __rmul__ = __mul__

    def conj(self) -> "BiComplex":
        """Flip both imaginary units; u * u.conj() has only 1 and j parts."""
        return BiComplex(self.a, -self.b, -self.c, self.d)

    def norm_parts(self) -> tuple[float, float]:
        """(A, B) with u * conj(u) = A + B j."""
        a, b, c, d = self.components()
        return a * a + b * b + c * c + d * d, 2.0 * (a * d - b * c)

    def is_invertible(self, tol: float = 0.0) -> bool:
        # A >= |B| always; equality marks a zero divisor
        A, B = self.norm_parts()
        return A - abs(B) > tol * A

    def inverse(self) -> "BiComplex":
        A, B = self.norm_parts()
        det = A * A - B * B
        if A == 0 or A - abs(B) <= 1e-15 * A:
            raise ZeroDivisionError("bi-complex number is a zero divisor")
        return self.conj() * BiComplex(A / det, 0.0, 0.0, -B / det)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0:
            return self.inverse() ** (-n)
        out = BiComplex(1.0)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def idempotent_pair(self) -> tuple[complex, complex]:
        """Coordinates on the idempotents (1 +- j)/2, as ordinary complex numbers.

        Products and sums act componentwise on this pair, which gives an
        independent way to evaluate bi-complex expressions.
        """
        return complex(self.a + self.d, self.b - self.c), complex(self.a - self.d, self.b + self.c)

    @classmethod
    def from_idempotent_pair(cls, plus: complex, minus: complex) -> "BiComplex":
        return cls(
            (plus.real + minus.real) / 2,
            (plus.imag + minus.imag) / 2,
            (minus.imag - plus.imag) / 2,
            (plus.real - minus.real) / 2,
        )

    @classmethod
    def exp_units(cls, x: float, y: float) -> "BiComplex":
        """exp(i1 x + i2 y) = (cos x + i1 sin x)(cos y + i2 sin y)."""
        return cls(math.cos(x), math.sin(x), 0.0, 0.0) * cls(math.cos(y), 0.0, math.sin(y), 0.0)


I1 = BiComplex(0.0, 1.0, 0.0, 0.0)
I2 = BiComplex(0.0, 0.0, 1.0, 0.0)
J = BiComplex(0.0, 0.0, 0.0, 1.0)


def _horner(coeffs: Sequence[float], x: BiComplex) -> BiComplex:
    out = BiComplex(0.0)
    for c in coeffs:
        out = out * x + c
    return out


def modulated_response(
    admittance: Callable[[BiComplex], BiComplex] | tuple[Sequence[float], Sequence[float]],
    omega: float,
    modulation: float,
    amplitude: BiComplex,
) -> BiComplex:
    """Current amplitude Y(i1 omega + i2 modulation) * amplitude.

    ``admittance`` is either a callable on bi-complex arguments or a pair
    (numerator, denominator) of real polynomial coefficients, highest power
    first, describing a rational Y(p).
    """
    p = I1 * omega + I2 * modulation
    if callable(admittance):
        y = admittance(p)
    else:
        num, den = admittance
        y = _horner(num, p) / _horner(den, p)
    return y * amplitude


# closed forms of I_mn = 8 (g^2 + y^2)^m * int lor(x - y) x^n / (1 + x^2)^m dx
_REFERENCE_FORMS: dict[tuple[int, int], Callable[[float, float], float]] = {
    (1, 0): lambda g, y: 8 * g,
    (1, 2): lambda g, y: 8 * y * y + 8 * g * (g - 1),
    (2, 0): lambda g, y: 4 * y * y * (g - 1) + 4 * g * g * (g + 1),
    (2, 1): lambda g, y: 8 * g * y,
    (3, 0): lambda g, y: 3 * (g - 1) * y**4 + 6 * g * (g * g - 1) * y * y + g**3 * (3 * g * g + 3 * g + 2),
    (3, 1): lambda g, y: 2 * y * (y * y * (g - 1) + g * g * (g + 3)),
    (3, 2): lambda g, y: (g - 1) * y**4 + 2 * g * (g * g + 3) * y * y + g**3 * (g - 1) * (g + 2),
    (3, 3): lambda g, y: 2 * y * ((3 * g + 1) * y * y + 3 * g * g * (g - 1)),
    (3, 4): lambda g, y: (3 * g + 5) * y**4 + 6 * g * (g * g - 1) * y * y + g**3 * (3 * g - 2) * (g - 1),
}

REFERENCE_INDICES = tuple(sorted(_REFERENCE_FORMS))


def reference_integral_closed(m: int, n: int, g: float, y: float) -> float:
    try:
        form = _REFERENCE_FORMS[(m, n)]
    except KeyError:
        raise ValueError(f"no closed form for (m, n) = ({m}, {n})") from None
    return form(g, y)


def reference_integral(m: int, n: int, g: float, y: float) -> float:
    """Quadrature value of 8 (g^2+y^2)^m int lor(x-y) x^n/(1+x^2)^m dx.

    ``lor`` is the normalised Lorentzian of half-width g - 1 (g > 1).
    """
    if g <= 1:
        raise ValueError("g must exceed 1")
    width = g - 1.0

    def f(x):
        return (width / math.pi) / (width * width + (x - y) ** 2) * x**n / (1 + x * x) ** m

    span = 50.0 * max(1.0, width) + abs(y)
    pieces = [(-math.inf, -span), (-span, span), (span, math.inf)]
    total = 0.0
    for lo, hi in pieces:
        if math.isinf(lo) or math.isinf(hi):
            val, _ = integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=400)
        else:
            val, _ = integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=400, points=sorted({y, 0.0}))
        total += val
    return 8.0 * (g * g + y * y) ** m * total


def lorentz_quartic_integral(a: float) -> float:
    """(1/pi) int dx / ((1 - a x^2)^2 + x^2) over the real line.

    Equals 1 for a >= 0 and 1/sqrt(1 - 4a) for a < 0.
    """

    def f(x):
        return 1.0 / ((1 - a * x * x) ** 2 + x * x)

    total = sum(
        integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
        for lo, hi in [(-math.inf, -20.0), (-20.0, 20.0), (20.0, math.inf)]
    )
    return total / math.pi


def sqrt_pole_integral(a: float) -> float:
    """(1/pi) int_0^inf sqrt(x) / ((x + 1)(x - a)) dx, principal value for a > 0."""
    if a == 0:
        raise ValueError("a must be non-zero")

    def g(x):
        return math.sqrt(x) / (x + 1)

    if a < 0:
        val = integrate.quad(lambda x: g(x) / (x - a), 0, math.inf, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
    else:
        near = integrate.quad(g, 0, 2 * a, weight="cauchy", wvar=a, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
        far = integrate.quad(lambda x: g(x) / (x - a), 2 * a, math.inf, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
        val = near + far
    return val / math.pi


def sqrt_pole_integral_closed(a: float) -> float:
    if a < 0:
        return 1.0 / (1.0 + math.sqrt(-a))
    if a > 0:
        return 1.0 / (1.0 + a)
    raise ValueError("a must be non-zero")
