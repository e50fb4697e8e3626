"""Archimedean evaluations: L-series, theta series, K_0 and Maass-like sums.

Everything here works at Re(s) > 1 or on truncated Dirichlet polynomials;
analytic continuation is not attempted.  K_0 comes from its own integral
representation int_0^inf dy/y exp(-a y - b/y) = 2 K_0(2 sqrt(ab)),
evaluated by the trapezoid rule in ln y, which converges geometrically for
this analytic, doubly-exponentially decaying integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate, special

from ._arith import primes_array
from .coeffs import chebyshev_u, convolution_coeffs
from .dirichlet import (
    DirichletCharacter,
    gauss_sum,
    is_primitive,
    parity_epsilon,
)
from .wavelets import SchwartzFunction, integrate as padic_integrate
from .padic import Ball

EULER_GAMMA = 0.57721566490153286061


class AbscissaError(ValueError):
    """Re(s) is outside the half-plane of absolute convergence."""


def _require_abscissa(s: complex) -> complex:
    s = complex(s)
    if s.real <= 1:
        raise AbscissaError(f"Re(s) = {s.real} <= 1: series and Euler product diverge")
    return s


def _powers(n: np.ndarray, s: complex) -> np.ndarray:
    return np.exp(-complex(s) * np.log(n.astype(float)))


# --------------------------------------------------------------------------
# Dirichlet L-functions


def _zeta_tail(X: int, s: complex) -> complex:
    """Euler-Maclaurin estimate of sum_{n > X} n^-s."""
    return (X ** (1 - s) / (s - 1) - X ** (-s) / 2 + s * X ** (-s - 1) / 12
            - s * (s + 1) * (s + 2) * X ** (-s - 3) / 720)


def dirichlet_l(
    s: complex, nu: DirichletCharacter, method: str = "series",
    n_terms: int = 1_000_000, prime_limit: int = 10_000_000,
) -> complex:
    """L(s, nu) by truncated series (with mean tail correction) or Euler product.

    The series is cut at a multiple X of the modulus.  A character with
    nonzero mean mu over a period (only the principal one) leaves a tail
    mu sum_{n>X} n^-s, which is added by Euler-Maclaurin; the mean-free part
    leaves O(N X^-s).
    """
    s = _require_abscissa(s)
    N = nu.modulus
    if method == "series":
        X = max(N, n_terms - n_terms % N)
        n = np.arange(1, X + 1)
        vals = nu.values(X + 1)[1:]
        total = complex(np.sum(vals * _powers(n, s)))
        mean = complex(np.mean(nu.values(N)))
        if abs(mean) > 1e-15:
            total += mean * _zeta_tail(X, s)
        return total
    if method == "euler":
        primes = primes_array(prime_limit)
        pv = nu.values(N)[primes % N]
        return complex(np.exp(-np.sum(np.log(1 - pv * _powers(primes, s)))))
    raise ValueError(f"unknown method {method!r}")


def euler_tail_bound(s: complex, prime_limit: int) -> float:
    """Crude bound on log of the omitted Euler factors (no cancellation)."""
    sigma = complex(s).real
    P = float(prime_limit)
    return 1.1 * P ** (1 - sigma) / ((sigma - 1) * math.log(P))


def local_factor(s: complex, nu: DirichletCharacter, p: int) -> complex:
    return 1 / (1 - nu(p) * complex(p) ** (-complex(s)))


# --------------------------------------------------------------------------
# local zeta integrals on Q_p


def zeta_p_integral_check(p: int, s: complex) -> dict:
    """(p/(p-1)) int_{Z_p} |x|^(s-1) dx and its d^x x form against 1/(1-p^-s)."""
    s = complex(s)
    unit_ball = SchwartzFunction.indicator(Ball.make(p, 0, 0))
    pref = p / (p - 1)
    additive = pref * padic_integrate(unit_ball, "additive", s - 1)
    multiplicative = pref * padic_integrate(unit_ball, "multiplicative", s)
    exact = 1 / (1 - complex(p) ** (-s))
    return {
        "additive": additive,
        "multiplicative": multiplicative,
        "exact": exact,
        "residual": max(abs(additive - exact), abs(multiplicative - exact)),
    }


# --------------------------------------------------------------------------
# product L-functions


def product_l(
    s: complex, nu: DirichletCharacter, method: str = "direct",
    n_terms: int = 1_000_000, prime_limit: int = 10_000_000,
    nu2: DirichletCharacter | None = None,
) -> complex:
    """L(s, nu) L(s, conj nu) by one of four routes.

    direct:  product of the two Dirichlet series.
    series:  the single Dirichlet series of the divisor-sum coefficients,
             summed as sum_{d e <= X} nu(d) conj(nu)(e) (d e)^-s.
    euler:   product of 1/(1 - 2 cos(arg nu(p)) p^-s + p^-2s) over primes.
    general: L(s, nu) L(s, conj nu2) from the Euler factors
             1 - exp(i(a1-a2)/2) 2 cos((a1+a2)/2) p^-s + nu(p) conj(nu2)(p) p^-2s.
    """
    s = _require_abscissa(s)
    if nu.is_principal:
        raise ValueError("product L-function needs a nonprincipal character")
    N = nu.modulus
    if method == "direct":
        return dirichlet_l(s, nu, "series", n_terms) * dirichlet_l(s, nu.conjugate(), "series", n_terms)
    if method == "series":
        X = n_terms
        n = np.arange(1, X + 1)
        w = _powers(n, s)
        f = nu.values(X + 1)[1:] * w
        g_prefix = np.concatenate(([0], np.cumsum(np.conj(nu.values(X + 1)[1:]) * w)))
        return complex(np.sum(f * g_prefix[X // n]))
    if method == "euler":
        primes = primes_array(prime_limit)
        table = nu.values(N)
        v = table[primes % N]
        x = _powers(primes, s)
        chi = (primes % N != 0).astype(float)
        return complex(np.exp(-np.sum(np.log(1 - (v + np.conj(v)) * x + chi * x * x))))
    if method == "general":
        other = nu2 if nu2 is not None else nu
        if other.modulus != N:
            raise ValueError("general mode needs characters of the same modulus")
        primes = primes_array(prime_limit)
        v1, v2 = nu.values(N)[primes % N], other.values(N)[primes % N]
        a1, a2 = np.angle(v1), np.angle(v2)
        coprime = np.abs(v1) > 0.5
        lin = np.where(coprime, np.exp(0.5j * (a1 - a2)) * 2 * np.cos((a1 + a2) / 2), 0)
        x = _powers(primes, s)
        quad = v1 * np.conj(v2)
        return complex(np.exp(-np.sum(np.log(1 - lin * x + quad * x * x))))
    raise ValueError(f"unknown method {method!r}")


def local_chebyshev_factor_series(theta: float, p: int, s: complex, terms: int = 50) -> complex:
    """sum_m U_m(cos theta) p^(-s m), the generating-function side of the local factor."""
    x = complex(p) ** (-complex(s))
    xi = math.cos(theta)
    return sum(chebyshev_u(m, xi) * x**m for m in range(terms))


# --------------------------------------------------------------------------
# theta series


def _theta_terms(y: float, N: int, eps: int, tol: float = 1e-17) -> int:
    """Smallest n_max with sum_{n > n_max} n^eps exp(-pi n^2 y/N) below tol."""
    n = 1
    while True:
        lead = (n + 1) ** eps * math.exp(-math.pi * (n + 1) ** 2 * y / N)
        ratio = math.exp(-math.pi * (2 * n + 3) * y / N) * ((n + 2) / (n + 1)) ** eps
        if ratio < 1 and lead / (1 - ratio) < tol:
            return n
        n += 1


def theta_series(y: float, nu: DirichletCharacter, require_primitive: bool = True) -> complex:
    """theta(iy, nu) = 2 sum_{n>=1} nu(n) n^eps exp(-pi n^2 y / N)."""
    if y <= 0:
        raise ValueError("theta needs y > 0")
    if require_primitive and not is_primitive(nu):
        raise ValueError("theta series needs a primitive character")
    N, eps = nu.modulus, parity_epsilon(nu)
    n_max = _theta_terms(y, N, eps)
    n = np.arange(1, n_max + 1)
    vals = nu.values(n_max + 1)[1:]
    return complex(2 * np.sum(vals * n.astype(float) ** eps * np.exp(-math.pi * n * n * y / N)))


def theta_s_factor(nu: DirichletCharacter, y: float) -> complex:
    """y^(1/2+eps) tau(nu) / (i^eps sqrt(N))."""
    eps = parity_epsilon(nu)
    return y ** (0.5 + eps) * gauss_sum(nu) / (1j**eps * math.sqrt(nu.modulus))


def theta_s_transform_residual(y: float, nu: DirichletCharacter) -> float:
    """|theta(i/y, nu) - y^(1/2+eps) tau(nu)/(i^eps sqrt N) theta(iy, conj nu)|."""
    lhs = theta_series(1 / y, nu)
    rhs = theta_s_factor(nu, y) * theta_series(y, nu.conjugate())
    return abs(lhs - rhs)


def _quad_complex(fn, a: float, b: float, **kw) -> complex:
    re = integrate.quad(lambda u: fn(u).real, a, b, **kw)[0]
    im = integrate.quad(lambda u: fn(u).imag, a, b, **kw)[0]
    return complex(re, im)


def l_from_theta_mellin(s: complex, nu: DirichletCharacter) -> complex:
    """L(s, nu) as the Mellin transform of theta, split at y = 1.

    On (0, 1) the substitution y -> 1/y and the S-transformation turn the
    integrand into theta(iu, conj nu) times a power of u, so both halves
    decay like exp(-pi u / N).
    """
    s = _require_abscissa(s)
    N, eps = nu.modulus, parity_epsilon(nu)
    w = (s + eps) / 2
    conj = nu.conjugate()
    const = gauss_sum(nu) / (1j**eps * math.sqrt(N))

    def upper(u):
        return u ** (w - 1) * theta_series(u, nu)

    def lower(u):
        return const * u ** (-w + eps - 0.5) * theta_series(u, conj)

    opts = dict(limit=200, epsabs=1e-15, epsrel=1e-13)
    body = _quad_complex(upper, 1, np.inf, **opts) + _quad_complex(lower, 1, np.inf, **opts)
    return complex((math.pi / N) ** w / (2 * special.gamma(w)) * body)


# --------------------------------------------------------------------------
# K_0


def _trapezoid_doubling(fn, a: float, b: float, tol: float = 1e-15, start: int = 16,
                        max_points: int = 1 << 16) -> complex:
    n = start
    xs = np.linspace(a, b, n + 1)
    ys = fn(xs)
    h = (b - a) / n
    prev = h * (ys.sum() - 0.5 * (ys[0] + ys[-1]))
    while n < max_points:
        mids = a + h * (np.arange(n) + 0.5)
        ys_new = fn(mids)
        cur = 0.5 * prev + 0.5 * h * ys_new.sum()
        n, h = 2 * n, h / 2
        if abs(cur - prev) <= tol * abs(cur):
            return cur
        prev = cur
    return prev


def bessel_k0(x):
    """K_0(x) for x > 0 (scalar or array) from 2 K_0(2 sqrt(ab)) = int dy/y exp(-a y - b/y).

    With a = b = x/2 the substitution y = e^u gives int exp(-x cosh u) du,
    summed by the trapezoid rule in u.
    """
    if np.ndim(x):
        return np.array([bessel_k0(float(v)) for v in np.ravel(x)]).reshape(np.shape(x))
    x = float(x)
    if x <= 0:
        raise ValueError("K_0 needs x > 0")
    return float(0.5 * two_sided_exponential_integral(x / 2, x / 2))


def bessel_k0_series(x: float, terms: int = 60) -> float:
    """Small-x series: -(ln(x/2) + gamma) I_0(x) + sum (x^2/4)^k / (k!)^2 H_k."""
    q = x * x / 4
    term, i0, acc, harmonic = 1.0, 1.0, 0.0, 0.0
    for k in range(1, terms):
        term *= q / (k * k)
        harmonic += 1 / k
        i0 += term
        acc += term * harmonic
    return -(math.log(x / 2) + EULER_GAMMA) * i0 + acc


def bessel_k0_asymptotic(x: float, terms: int = 8) -> float:
    """sqrt(pi/2x) e^-x sum_k ((2k-1)!!)^2 / (k! (8x)^k) (-1)^k, truncated."""
    total, term = 1.0, 1.0
    for k in range(1, terms):
        term *= -((2 * k - 1) ** 2) / (k * 8 * x)
        total += term
    return math.sqrt(math.pi / (2 * x)) * math.exp(-x) * total


def two_sided_exponential_integral(a: float, b: float) -> float:
    """int_0^inf dy/y exp(-a y - b/y), by the trapezoid rule in u = ln y."""
    centre = 0.5 * math.log(b / a)
    scale = 2 * math.sqrt(a * b)
    half = math.acosh(1 + 745 / scale)

    def fn(u):
        y = np.exp(u)
        return np.exp(-a * y - b / y)

    return float(_trapezoid_doubling(fn, centre - half, centre + half))


def k0_mellin_closed_form(c: float, mu: complex) -> complex:
    """int_0^inf y^(mu-1) K_0(c y) dy = 2^(mu-2) c^-mu Gamma(mu/2)^2."""
    mu = complex(mu)
    return 2 ** (mu - 2) * c ** (-mu) * special.gamma(mu / 2) ** 2


def k0_mellin_quadrature(c: float, mu: float) -> float:
    """The same Mellin integral by direct quadrature of bessel_k0."""
    fn = lambda y: y ** (mu - 1) * bessel_k0(c * y)
    opts = dict(limit=200, epsabs=1e-14, epsrel=1e-12)
    return integrate.quad(fn, 0, 1, **opts)[0] + integrate.quad(fn, 1, np.inf, **opts)[0]


def product_l_bessel(s: complex, nu: DirichletCharacter, n_terms: int = 100_000) -> complex:
    """4 (pi/N)^(s+eps) / Gamma((s+eps)/2)^2 sum a(n) n^eps int dy/y y^(s+eps) K_0(2 pi n y / N)."""
    s = _require_abscissa(s)
    N, eps = nu.modulus, parity_epsilon(nu)
    mu = s + eps
    a = convolution_coeffs(nu, n_terms)[1:]
    n = np.arange(1, n_terms + 1, dtype=float)
    mellin = 2 ** (mu - 2) * (2 * math.pi * n / N) ** (-mu) * special.gamma(mu / 2) ** 2
    pref = 4 * (math.pi / N) ** mu / special.gamma(mu / 2) ** 2
    return complex(pref * np.sum(a * n**eps * mellin))


def product_l_bessel_check(s: complex, nu: DirichletCharacter, n_terms: int = 100_000) -> float:
    return abs(product_l_bessel(s, nu, n_terms) - product_l(s, nu, "direct"))


# --------------------------------------------------------------------------
# theta convolution


def theta_convolution(y: float, nu: DirichletCharacter, tol: float = 1e-13) -> complex:
    """C(y) = int_0^inf dy'/y' theta(i y y', nu) theta(i y / y', conj nu)."""
    conj = nu.conjugate()

    def integrand(us):
        return np.array([theta_series(y * math.exp(u), nu) * theta_series(y / math.exp(u), conj)
                         for u in us])

    # both factors decay like exp(-pi t / N) for large arguments t, and
    # the integrand is doubly-exponentially small at the ends
    span = math.log(60 * nu.modulus / (math.pi * min(y, 1 / y)))
    return complex(_trapezoid_doubling(integrand, -span, span, tol=tol))


def theta_convolution_weight_residual(y: float, nu: DirichletCharacter) -> dict:
    """C(1/y) against y^(1+2 eps) C(y), plus the pointwise integrand identity.

    The pointwise check applies the S-transformation to both theta factors
    of the C(1/y) integrand at several nodes y'.
    """
    eps = parity_epsilon(nu)
    conj = nu.conjugate()
    lhs, base = theta_convolution(1 / y, nu), theta_convolution(y, nu)
    rhs = y ** (1 + 2 * eps) * base
    nodes = np.exp(np.linspace(-2, 2, 9))
    point = 0.0
    for yp in nodes:
        direct = theta_series(yp / y, nu) * theta_series(1 / (y * yp), conj)
        transformed = (y ** (1 + 2 * eps) * theta_series(y / yp, conj) * theta_series(y * yp, nu))
        point = max(point, abs(direct - transformed) / max(1e-300, abs(transformed)))
    return {"lhs": lhs, "rhs": rhs, "residual": abs(lhs - rhs) / abs(rhs), "pointwise": point}


# --------------------------------------------------------------------------
# Maass-like waveforms


def _require_even(nu: DirichletCharacter, allow_odd: bool) -> int:
    eps = parity_epsilon(nu)
    if eps and not allow_odd:
        raise ValueError("the Maass identification uses even characters; pass allow_odd=True")
    return eps


def maass_terms(y: float, nu: DirichletCharacter, n_terms: int, allow_odd: bool = False):
    """Per-mode amplitudes a(n) (n y)^eps sqrt(y) K_0(2 pi n y / N), n = 1..n_terms."""
    eps = _require_even(nu, allow_odd)
    N = nu.modulus
    a = convolution_coeffs(nu, n_terms)[1:]
    n = np.arange(1, n_terms + 1, dtype=float)
    return a * (n * y) ** eps * math.sqrt(y) * bessel_k0(2 * math.pi * n * y / N)


def maass_tail_bound(y: float, N: int, n_terms: int, eps: int) -> float:
    """Bound on the omitted modes using |a(n)| <= d(n) <= 2 sqrt(n) and
    K_0(z) <= sqrt(pi/2z) e^-z."""
    total, n = 0.0, n_terms + 1
    while True:
        z = 2 * math.pi * n * y / N
        term = 2 * math.sqrt(n) * (n * y) ** eps * math.sqrt(y) * math.sqrt(math.pi / (2 * z)) * math.exp(-z)
        total += term
        if term < 1e-18 * max(total, 1e-300) or term < 1e-300:
            return total
        n += 1


def maass_waveform(x: float, y: float, nu: DirichletCharacter, n_terms: int = 50,
                   allow_odd: bool = False, with_tail: bool = False):
    """sum_n a(n) (n y)^eps sqrt(y) K_0(2 pi n y / N) exp(2 pi i n x / N)."""
    if y <= 0:
        raise ValueError("y must be positive")
    N = nu.modulus
    amps = maass_terms(y, nu, n_terms, allow_odd)
    n = np.arange(1, n_terms + 1)
    value = complex(np.sum(amps * np.exp(2j * math.pi * n * x / N)))
    if with_tail:
        return value, maass_tail_bound(y, N, n_terms, parity_epsilon(nu))
    return value


def maass_fourier_mode(n: int, y: float, nu: DirichletCharacter, n_terms: int = 50,
                       points: int | None = None, allow_odd: bool = False) -> complex:
    """(1/N) int_0^N M(x + iy) exp(-2 pi i n x / N) dx by the periodic trapezoid rule."""
    N = nu.modulus
    points = points or 4 * n_terms
    xs = N * np.arange(points) / points
    amps = maass_terms(y, nu, n_terms, allow_odd)
    modes = np.arange(1, n_terms + 1)
    vals = np.exp(2j * math.pi * np.outer(xs, modes) / N) @ amps
    return complex(np.mean(vals * np.exp(-2j * math.pi * n * xs / N)))


@dataclass(frozen=True)
class DivergenceProbe:
    m: int
    n: int
    modulus: int
    epsilons: tuple
    integrals: tuple
    increments: tuple
    model: tuple
    remainder: tuple  # integral minus model: settles to a constant

    @property
    def remainder_drift(self) -> tuple:
        return tuple(abs(b - a) for a, b in zip(self.remainder, self.remainder[1:]))


def _k0_product_integral(c1: float, c2: float, eps: float) -> float:
    def fn(u):
        y = math.exp(u)
        return bessel_k0(c1 * y) * bessel_k0(c2 * y)

    top = min(-math.log(eps), math.log(800 / (c1 + c2)))
    opts = dict(limit=400, epsabs=1e-13, epsrel=1e-12)
    pieces = [math.log(eps), min(0.0, top), top]
    return sum(integrate.quad(fn, a, b, **opts)[0] for a, b in zip(pieces, pieces[1:]) if b > a)


def maass_norm_divergence_probe(m: int, n: int, epsilons: Sequence[float], modulus: int = 5) -> DivergenceProbe:
    """int_eps^(1/eps) dy/y K_0(2 pi m y/N) K_0(2 pi n y/N) along decreasing eps.

    Near y = 0, K_0(c y) ~ -(ln y + ln(c/2) + gamma), so with L = ln(1/eps)
    the integral grows like L^3/3 - (A+B) L^2/2 + A B L; the model column
    carries that polynomial and the remainder should settle.
    """
    a = 2 * math.pi / modulus
    A = math.log(a * m / 2) + EULER_GAMMA
    B = math.log(a * n / 2) + EULER_GAMMA
    vals, model = [], []
    for eps in epsilons:
        vals.append(_k0_product_integral(a * m, a * n, eps))
        L = math.log(1 / eps)
        model.append(L**3 / 3 - (A + B) * L**2 / 2 + A * B * L)
    increments = tuple(b - a for a, b in zip(vals, vals[1:]))
    remainder = tuple(v - mo for v, mo in zip(vals, model))
    return DivergenceProbe(m, n, modulus, tuple(epsilons), tuple(vals), increments, tuple(model), remainder)


# --------------------------------------------------------------------------
# time average of product L-functions on the critical line


def _dirichlet_polynomial(coeffs: np.ndarray, t: np.ndarray) -> np.ndarray:
    """sum_n a(n) n^-(1/2 + i t) for each t."""
    n = np.arange(1, len(coeffs) + 1, dtype=float)
    phase = np.exp(-1j * np.outer(t, np.log(n)))
    return phase @ (coeffs / np.sqrt(n))


@dataclass(frozen=True)
class TimeAverage:
    value: complex
    odd_part_residual: float
    T: float
    n_terms: int
    status: str = "exploratory"


def time_average_inner_product(
    nu_f: DirichletCharacter, nu_g: DirichletCharacter, T: float,
    grid_points: int = 4001, n_terms: int = 200,
) -> TimeAverage:
    """(1/2T) int_{-T}^{T} conj(L_f(1/2+it)) L_g(1/2+it) dt for truncated series.

    The odd-part residual is max |Im I(t) + Im I(-t)| on the symmetric grid;
    it vanishes because the convolution coefficients are real.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if grid_points % 2 == 0:
        grid_points += 1
    t = np.linspace(-T, T, grid_points)
    af = convolution_coeffs(nu_f, n_terms)[1:]
    ag = convolution_coeffs(nu_g, n_terms)[1:]
    integrand = np.conj(_dirichlet_polynomial(af, t)) * _dirichlet_polynomial(ag, t)
    odd = float(np.max(np.abs(integrand.imag + integrand.imag[::-1])))
    value = integrate.simpson(integrand, x=t) / (2 * T)
    return TimeAverage(complex(value), odd, T, n_terms)


def time_average_trend(nu_f, nu_g, T_values: Sequence[float], n_terms: int = 200,
                       grid_density: float = 40.0) -> list[TimeAverage]:
    """Time averages over increasing T at fixed grid density (trend data only)."""
    return [
        time_average_inner_product(nu_f, nu_g, T, int(2 * T * grid_density) + 1, n_terms)
        for T in T_values
    ]
