"""The p-adic Mellin transform with a unitary leading-digit character.

For a locally constant ``g`` and ``ell`` in ``0..p-1``::

    M_ell[g](s) = integral over Q_p^x of omega_ell(x) |x|^s g(x) dx/|x|

where ``omega_ell(x) = exp(2 pi i ell d / p)`` and ``d`` is the leading
p-adic digit of ``x``.  The forward transform is an exact ball sum; the
inverse is a trapezoid rule over one period ``2 pi / ln p`` of the contour
``Re s = sigma``, which converges geometrically for these integrands.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from ._arith import require_prime
from .padic import as_fraction, norm, unit_circle_phase
from .wavelets import (
    DivergenceError,
    SchwartzFunction,
    WaveletIndex,
    ball_integral,
    kozyrev_wavelet,
    modified_wavelet,
    omega_phase,
)

VARIANTS = ("kozyrev", "modified")
POLE_RADIUS = 1e-8


class QuadratureError(ArithmeticError):
    """Trapezoid doubling did not reach the requested tolerance."""


def _check_ell(p: int, ell: int) -> int:
    if not 0 <= ell <= p - 1:
        raise ValueError(f"ell={ell} outside 0..{p - 1}")
    return ell


def mellin_transform(f: SchwartzFunction, s: complex, ell: int = 0) -> complex:
    """Exact ball sum of omega_ell(x) |x|^s f(x) d^x x."""
    p = f.prime
    _check_ell(p, ell)
    a = complex(s) + f.weight - 1
    total = 0j
    for b, v in f.pieces:
        if v != 0:
            total += v * ball_integral(b, a, ell)
    return total


def _near_pole(p: int, s: complex) -> bool:
    """True when p**s is within the exclusion zone around 1."""
    period = 2 * math.pi / math.log(p)
    k = round(s.imag / period)
    return abs(s - 1j * k * period) < POLE_RADIUS


def cp(p: int, ell: int, s: complex, variant: str = "kozyrev") -> complex:
    """The n-independent Mellin factor of the wavelet psi_{n,0,1}.

    kozyrev:  -1/(p(1 - p^-s)) + delta_{ell,0}/(p^s - 1) + delta_{ell,p-1}
    modified: the same expression at s + 1/2.
    """
    p = require_prime(p)
    _check_ell(p, ell)
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    s = complex(s) + (0.5 if variant == "modified" else 0.0)
    if _near_pole(p, s):
        raise DivergenceError(f"c_p has a pole at p^s = 1 (s={s})")
    ps = complex(p) ** s
    value = -1 / (p * (1 - 1 / ps))
    if ell == 0:
        value += 1 / (ps - 1)
    if ell == p - 1:
        value += 1
    return value


@dataclass(frozen=True)
class MellinCoefficient:
    prime: int
    ell: int
    s: complex
    value: complex
    variant: str = "kozyrev"

    @classmethod
    def compute(cls, p: int, ell: int, s: complex, variant: str = "kozyrev"):
        return cls(p, ell, complex(s), cp(p, ell, s, variant), variant)


def wavelet_mellin_closed_form(
    p: int, n: int, s: complex, ell: int, variant: str = "kozyrev"
) -> complex:
    """Mellin transform of psi_{n,0,1} (or its |x|^(1/2) modification)."""
    s = complex(s)
    shift = s - 0.5 if variant == "kozyrev" else s
    return cp(p, ell, s, variant) * complex(p) ** (n * shift)


def wavelet_for_variant(p: int, n: int, variant: str = "kozyrev") -> SchwartzFunction:
    make = kozyrev_wavelet if variant == "kozyrev" else modified_wavelet
    return make(p, WaveletIndex(n))


def cp_unitarity_sum(p: int, t: float, sigma: float = 0.0) -> float:
    """Sum over ell of |c_p(ell, sigma + i t)|^2 for the modified factor."""
    s = complex(sigma, t)
    return sum(abs(cp(p, ell, s, "modified")) ** 2 for ell in range(p))


def cp_unitarity_closed_form(p: int, s: complex) -> float:
    """1 + (1 - |p^s|^2) / |p^(s+1/2) - 1|^2."""
    ps = complex(p) ** complex(s)
    return 1 + (1 - abs(ps) ** 2) / abs(complex(p) ** (complex(s) + 0.5) - 1) ** 2


def inverse_mellin(
    transform: Callable[[int, complex], complex],
    x,
    p: int,
    quadrature_points: int = 256,
    sigma: float = 0.0,
    tol: float = 1e-10,
    max_points: int = 1 << 16,
) -> complex:
    """Recover g(x) from its transforms along Re s = sigma.

    g(x) = sum_ell conj(omega_ell(x)) (ln p / 2 pi) integral over one period
    of |x|^-(sigma+it) M_ell[g](sigma+it) dt.  ``transform(ell, s)`` supplies
    the transform values.  Kozyrev wavelets have a pole at s = 0, so their
    round trip needs a contour with sigma > 0.  The point count doubles
    until successive estimates agree to ``tol``.
    """
    p = require_prime(p)
    x = as_fraction(x)
    if x == 0:
        raise ValueError("the inverse transform is defined on Q_p^x")
    log_abs = math.log(float(norm(x, p)))
    phases = [omega_phase(p, ell, x).conjugate() for ell in range(p)]
    period = 2 * math.pi / math.log(p)

    def estimate(n_pts: int) -> complex:
        total = 0j
        for j in range(n_pts):
            s = complex(sigma, period * j / n_pts)
            kernel = cmath.exp(-s * log_abs)
            total += kernel * sum(ph * transform(ell, s) for ell, ph in enumerate(phases))
        return total / n_pts

    n_pts = max(int(quadrature_points), 4)
    prev = estimate(n_pts)
    while n_pts < max_points:
        n_pts *= 2
        cur = estimate(n_pts)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    raise QuadratureError(f"inverse Mellin quadrature unconverged at {n_pts} points")


def wavelet_round_trip_residual(
    p: int, n: int, points, variant: str = "kozyrev", sigma: float | None = None,
    quadrature_points: int = 256,
) -> float:
    """max |inverse(closed form)(x) - wavelet(x)| over the given points."""
    if sigma is None:
        sigma = 1.0 if variant == "kozyrev" else 0.0
    psi = wavelet_for_variant(p, n, variant)

    def tr(ell, s):
        return wavelet_mellin_closed_form(p, n, s, ell, variant)

    return max(
        abs(inverse_mellin(tr, x, p, quadrature_points, sigma) - psi(x)) for x in points
    )


def mellin_scan(p: int, n: int, t_values, variant: str = "kozyrev", sigma: float = 1.0):
    """Rows (ell, t, Re, Im) of the closed-form wavelet transform at sigma + i t."""
    rows = []
    for ell in range(p):
        for t in t_values:
            v = wavelet_mellin_closed_form(p, n, complex(sigma, t), ell, variant)
            rows.append((ell, float(t), v.real, v.imag))
    return rows


def leading_digit_phase(p: int, ell: int, x) -> complex:
    """omega_ell(x) read off from the unit x |x|_p, independently of omega_phase."""
    x = as_fraction(x)
    if x == 0:
        raise ValueError("omega is defined on Q_p^x")
    unit = x * norm(x, p)
    return unit_circle_phase(Fraction(ell * (unit.numerator * pow(unit.denominator, -1, p)), p))
