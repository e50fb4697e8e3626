"""Locally constant functions on Q_p, exact integration and wavelets.

A :class:`SchwartzFunction` is a finite list of disjoint balls with a complex
value on each, optionally multiplied by ``|x|_p**weight``.  Every integral
reduces to a finite sum over balls plus, for balls containing the origin,
a geometric series over the shells ``|x|_p = p**k`` summed in closed form.
Nothing is sampled or truncated.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from ._arith import require_prime
from .padic import (
    Ball,
    as_fraction,
    frac_part,
    leading_digit,
    norm,
    unit_circle_phase,
    valuation,
)


class DivergenceError(ArithmeticError):
    """A shell sum or geometric tail does not converge."""


@lru_cache(maxsize=None)
def _ancestor(ball: Ball, r: int) -> Ball:
    return ball.ancestor(r)


def _piece_norm(ball: Ball) -> Fraction:
    return norm(ball.center, ball.prime)


# --------------------------------------------------------------------------
# the function type


@dataclass(frozen=True)
class SchwartzFunction:
    prime: int
    pieces: tuple[tuple[Ball, complex], ...] = ()
    weight: float = 0.0
    _lookup: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple((b, complex(v)) for b, v in self.pieces))
        lookup: dict[int, dict[Ball, complex]] = {}
        for b, v in self.pieces:
            if b.prime != self.prime:
                raise ValueError("piece prime differs from function prime")
            level = lookup.setdefault(b.radius_exponent, {})
            if b in level:
                raise ValueError(f"duplicate ball {b}")
            level[b] = v
        object.__setattr__(self, "_lookup", lookup)

    @classmethod
    def zero(cls, p: int) -> "SchwartzFunction":
        return cls(require_prime(p))

    @classmethod
    def indicator(cls, ball: Ball, value: complex = 1.0, weight: float = 0.0):
        return cls(ball.prime, ((ball, value),), weight)

    @property
    def radii(self) -> list[int]:
        return sorted(self._lookup)

    @property
    def finest_radius(self) -> int:
        return min(self._lookup) if self._lookup else 0

    @property
    def support_exponent(self) -> int:
        """Smallest R with support inside {|x|_p <= p**R}."""
        out = -math.inf
        for b, _ in self.pieces:
            r = b.radius_exponent
            out = max(out, r if b.center == 0 else max(r, -valuation(b.center, self.prime)))
        return out

    def piece_at(self, ball: Ball) -> complex | None:
        """Value of the piece containing ``ball`` (None if outside the support)."""
        for r in self.radii:
            if r < ball.radius_exponent:
                continue
            v = self._lookup[r].get(_ancestor(ball, r))
            if v is not None:
                return v
        return None

    def __call__(self, x) -> complex:
        x = as_fraction(x)
        p = self.prime
        if self.weight and x == 0:
            return 0j
        for r in self.radii:
            v = self._lookup[r].get(Ball.make(p, x, r))
            if v is not None:
                if self.weight:
                    return v * float(norm(x, p)) ** self.weight
                return v
        return 0j

    # algebra ------------------------------------------------------------

    def scaled(self, c: complex) -> "SchwartzFunction":
        return SchwartzFunction(self.prime, tuple((b, c * v) for b, v in self.pieces), self.weight)

    def conj(self) -> "SchwartzFunction":
        return SchwartzFunction(
            self.prime, tuple((b, v.conjugate()) for b, v in self.pieces), self.weight
        )

    def refine(self, levels: int = 1) -> "SchwartzFunction":
        pieces = list(self.pieces)
        for _ in range(levels):
            pieces = [(c, v) for b, v in pieces for c in b.children()]
        return SchwartzFunction(self.prime, tuple(pieces), self.weight)

    def refine_to(self, r: int) -> "SchwartzFunction":
        """Split every piece down to radius ``p**r``."""
        out = []
        for b, v in self.pieces:
            stack = [b]
            while stack:
                c = stack.pop()
                if c.radius_exponent <= r:
                    out.append((c, v))
                else:
                    stack.extend(c.children())
        return SchwartzFunction(self.prime, tuple(out), self.weight)

    def dilate(self, n: int) -> "SchwartzFunction":
        """The function x -> f(p**n x)."""
        p = self.prime
        s = Fraction(p) ** (-n)
        factor = float(p) ** (-n * self.weight) if self.weight else 1.0
        pieces = tuple(
            (Ball.make(p, b.center * s, b.radius_exponent + n), factor * v) for b, v in self.pieces
        )
        return SchwartzFunction(p, pieces, self.weight)

    def __add__(self, other: "SchwartzFunction") -> "SchwartzFunction":
        _check_compatible(self, other)
        atoms = _common_atoms([b for b, _ in self.pieces] + [b for b, _ in other.pieces])
        pieces = []
        for a in atoms:
            v = (self.piece_at(a) or 0j) + (other.piece_at(a) or 0j)
            if v != 0:
                pieces.append((a, v))
        return SchwartzFunction(self.prime, tuple(pieces), self.weight)

    def __sub__(self, other: "SchwartzFunction") -> "SchwartzFunction":
        return self + other.scaled(-1)

    def __mul__(self, other: "SchwartzFunction") -> "SchwartzFunction":
        if other.prime != self.prime:
            raise ValueError("prime mismatch")
        pieces = _intersect_pieces(self, other)
        return SchwartzFunction(self.prime, tuple(pieces), self.weight + other.weight)

    # serialization --------------------------------------------------------

    def to_records(self) -> list[list]:
        return [
            [str(b.center), b.radius_exponent, v.real, v.imag] for b, v in self.pieces
        ]

    def to_json(self) -> str:
        return json.dumps(
            {"prime": self.prime, "weight": self.weight, "pieces": self.to_records()}
        )

    @classmethod
    def from_json(cls, text: str) -> "SchwartzFunction":
        data = json.loads(text)
        p = data["prime"]
        pieces = tuple(
            (Ball.make(p, Fraction(c), int(r)), complex(re, im)) for c, r, re, im in data["pieces"]
        )
        return cls(p, pieces, data.get("weight", 0.0))


def _check_compatible(f: SchwartzFunction, g: SchwartzFunction) -> None:
    if f.prime != g.prime:
        raise ValueError("prime mismatch")
    if f.weight != g.weight:
        raise ValueError("cannot add functions with different |x| weights")


def _common_atoms(balls: Sequence[Ball]) -> list[Ball]:
    """Disjoint balls refining every ball in ``balls`` (nested-or-disjoint)."""
    uniq = set(balls)
    maximal = [b for b in uniq if not any(o != b and o.contains_ball(b) for o in uniq)]
    atoms, stack = [], maximal
    while stack:
        b = stack.pop()
        if any(o != b and b.contains_ball(o) for o in uniq):
            stack.extend(b.children())
        else:
            atoms.append(b)
    return atoms


def _intersect_pieces(f: SchwartzFunction, g: SchwartzFunction) -> list[tuple[Ball, complex]]:
    """Pieces of the pointwise product f*g (nonempty intersections only)."""
    out = []
    f_levels, g_levels = f._lookup, g._lookup
    for b, v in g.pieces:
        for r, level in f_levels.items():
            if r < b.radius_exponent:
                continue
            u = level.get(_ancestor(b, r))
            if u is not None:
                out.append((b, u * v))
    for b, u in f.pieces:
        for r, level in g_levels.items():
            if r <= b.radius_exponent:
                continue
            v = level.get(_ancestor(b, r))
            if v is not None:
                out.append((b, u * v))
    return out


# --------------------------------------------------------------------------
# exact integration


def omega_phase(p: int, ell: int, x) -> complex:
    """The unitary character exp(2*pi*i*ell*d/p), d the leading digit of x."""
    if ell % p == 0:
        return 1 + 0j
    return unit_circle_phase(Fraction(ell * leading_digit(x, p), p))


def ball_integral(ball: Ball, exponent: complex = 0.0, ell: int | None = None) -> complex:
    """Exact value of the integral over ``ball`` of omega_ell(x) |x|^exponent dx.

    For a ball around 0 the shells |x| = p**k, k <= r, are summed as a
    geometric series; each shell splits into p-1 leading-digit cells of
    additive measure p**(k-1).
    """
    p, r = ball.prime, ball.radius_exponent
    if not ball.contains_zero:
        phase = omega_phase(p, ell, ball.center) if ell else 1.0
        size = float(_piece_norm(ball))
        return phase * size**exponent * float(p) ** r
    digit_sum = (p - 1) if not ell or ell % p == 0 else -1
    q = complex(p) ** (-(1 + exponent))
    if abs(q) >= 1:
        raise DivergenceError(
            f"shell sum around 0 diverges for |x|^{exponent} (need Re exponent > -1)"
        )
    return digit_sum / p * complex(p) ** (r * (1 + exponent)) / (1 - q)


def _exponent(f: SchwartzFunction, measure: str, weight_exponent) -> complex:
    if measure not in ("additive", "multiplicative"):
        raise ValueError(f"unknown measure {measure!r}")
    a = f.weight + weight_exponent
    return a - 1 if measure == "multiplicative" else a


def integrate(
    f: SchwartzFunction, measure: str = "additive", weight_exponent: complex = 0.0
) -> complex:
    """Exact integral of |x|^weight_exponent f(x) against dx or dx/|x|."""
    a = _exponent(f, measure, weight_exponent)
    total = 0j
    for b, v in f.pieces:
        if v != 0:
            total += v * ball_integral(b, a)
    return total


@lru_cache(maxsize=1 << 18)
def _cached_ball_integral(ball: Ball, exponent: complex) -> complex:
    return ball_integral(ball, exponent)


def inner_product_L2(
    f: SchwartzFunction, g: SchwartzFunction, measure: str = "additive", weight_exponent=0.0
) -> complex:
    """<f, g> = integral of conj(f) g, conjugate-linear in ``f``.

    Summed directly over the nonempty intersections of pieces, which for
    nested-or-disjoint balls is the smaller ball of each overlapping pair.
    """
    if f.prime != g.prime:
        raise ValueError("prime mismatch")
    a = complex(_exponent(f, measure, weight_exponent) + g.weight)
    total = 0j
    for b, v in _intersect_pieces(f.conj(), g):
        total += v * _cached_ball_integral(b, a)
    return total


def _support_ball(f: SchwartzFunction) -> Ball:
    b = f.pieces[0][0]
    top = max(bb.radius_exponent for bb, _ in f.pieces)
    b = _ancestor(b, top)
    while not all(b.contains_ball(c) for c, _ in f.pieces):
        b = _ancestor(b, b.radius_exponent + 1)
    return b


def gram_matrix(
    functions: Sequence[SchwartzFunction], measure: str = "additive", weight_exponent=0.0
) -> np.ndarray:
    """Matrix of pairwise inner products.

    Pairs whose supports are disjoint are exactly zero and skipped; balls
    are nested or disjoint, so the remaining pairs are found by walking
    support-ball ancestors.
    """
    n = len(functions)
    G = np.zeros((n, n), dtype=complex)
    supports = [_support_ball(f) if f.pieces else None for f in functions]
    index: dict[Ball, list[int]] = {}
    for i, s in enumerate(supports):
        if s is not None:
            index.setdefault(s, []).append(i)
    radii = sorted({s.radius_exponent for s in supports if s is not None})
    for i, s in enumerate(supports):
        if s is None:
            continue
        for r in radii:
            if r < s.radius_exponent:
                continue
            for j in index.get(_ancestor(s, r), ()):
                if r == s.radius_exponent and j < i:
                    continue
                val = inner_product_L2(functions[j], functions[i], measure, weight_exponent)
                G[j, i] = val
                G[i, j] = val.conjugate()
    return G


# --------------------------------------------------------------------------
# wavelets


@dataclass(frozen=True)
class WaveletIndex:
    n: int
    m: Fraction = Fraction(0)
    j: int = 1

    def __post_init__(self):
        object.__setattr__(self, "m", as_fraction(self.m))


def kozyrev_wavelet(p: int, index: WaveletIndex | int) -> SchwartzFunction:
    """p**(-n/2) chi(j p**(n-1) x) Omega(p**n x - m), exactly.

    Supported on the ball of radius p**n around p**(-n) m; the phase is
    constant on each of its p children.
    """
    p = require_prime(p)
    if isinstance(index, int):
        index = WaveletIndex(index)
    n, j = index.n, index.j
    if not 1 <= j <= p - 1:
        raise ValueError(f"phase index j={j} outside 1..{p - 1}")
    m = frac_part(index.m, p)
    support = Ball.make(p, m * Fraction(p) ** (-n), n)
    amp = float(p) ** (-n / 2)
    shift = j * Fraction(p) ** (n - 1)
    pieces = tuple(
        (c, amp * unit_circle_phase(frac_part(shift * c.center, p))) for c in support.children()
    )
    return SchwartzFunction(p, pieces)


def modified_wavelet(p: int, index: WaveletIndex | int) -> SchwartzFunction:
    """|x|_p**(1/2) times the Kozyrev wavelet (orthonormal for dx/|x|).

    Stored as the Kozyrev pieces with weight 1/2; the value at x = 0 is 0.
    """
    w = kozyrev_wavelet(p, index)
    return SchwartzFunction(w.prime, w.pieces, 0.5)


# --------------------------------------------------------------------------
# Gamma_p and the Vladimirov operator


def _one_minus_exp(z: complex) -> complex:
    """1 - exp(z) without cancellation for small |z|."""
    if abs(z) < 1e-3:
        return -z * (1 + z / 2 * (1 + z / 3 * (1 + z / 4 * (1 + z / 5))))
    return 1 - cmath.exp(z)


def gamma_p(alpha: complex, p: int, continuation: bool = False) -> complex:
    """Gamma_(p)(-alpha) = integral over Q_p^x of chi(x) |x|^(-alpha) dx/|x|.

    Shell decomposition: the shells inside Z_p contribute (1 - 1/p)
    p**(-alpha k) each, the shell |x| = p contributes -p**(-alpha-1), and
    larger shells vanish.  The inner tail converges for Re(alpha) < 0; with
    ``continuation=True`` the closed form is used as the analytic
    continuation elsewhere.
    """
    p = require_prime(p)
    alpha = complex(alpha)
    if alpha.real >= 0 and not continuation:
        raise DivergenceError("Gamma_p shell sum needs Re(alpha) < 0")
    one_minus_q = _one_minus_exp(alpha * math.log(p))
    if abs(one_minus_q) < 1e-14:
        raise DivergenceError(f"Gamma_p(-alpha) has a pole at alpha={alpha}")
    return (1 - 1 / p) / one_minus_q - complex(p) ** (-alpha - 1)


def _ball_mass(f: SchwartzFunction, ball: Ball) -> complex:
    """Integral of f over ``ball`` (f has weight 0)."""
    total = 0j
    for b, v in f.pieces:
        if ball.contains_ball(b):
            total += v * float(b.measure)
        elif b.contains_ball(ball):
            total += v * float(ball.measure)
    return total


def vladimirov_at(f: SchwartzFunction, alpha: complex, x, tail_policy="analytic") -> complex:
    """D^alpha f at the point x.

    The kernel integral is split into shells |x' - x| = p**k.  Shells below
    the finest piece radius contribute nothing (f is constant there), the
    shells up to the one enclosing the support are exact ball sums, and the
    exterior where f(x') = 0 is the geometric series
    -f(x) (1 - 1/p) sum_{k>K} p**(-k alpha).  An integer ``tail_policy``
    instead truncates that series after the given number of shells.
    """
    if f.weight:
        raise ValueError("Vladimirov operator implemented for weight-0 functions")
    p = f.prime
    alpha = complex(alpha)
    if not f.pieces:
        return 0j
    x = as_fraction(x)
    fx = f(x)
    r_min = f.finest_radius
    K = r_min
    for b, _ in f.pieces:
        d = valuation(b.center - x, p)
        K = max(K, b.radius_exponent, -d if d != math.inf else b.radius_exponent)
    total = 0j
    prev = _ball_mass(f, Ball.make(p, x, r_min))
    for k in range(r_min + 1, K + 1):
        cur = _ball_mass(f, Ball.make(p, x, k))
        shell = cur - prev - fx * (1 - 1 / p) * float(p) ** k
        total += shell * complex(p) ** (-k * (alpha + 1))
        prev = cur
    if fx != 0:
        if tail_policy == "analytic":
            q = complex(p) ** (-alpha)
            if abs(q) >= 1:
                raise DivergenceError("Vladimirov exterior tail diverges for Re(alpha) <= 0")
            total += -fx * (1 - 1 / p) * q ** (K + 1) / _one_minus_exp(-alpha * math.log(p))
        else:
            for k in range(K + 1, K + 1 + int(tail_policy)):
                total += -fx * (1 - 1 / p) * complex(p) ** (-k * alpha)
    return total / gamma_p(alpha, p, continuation=True)


def vladimirov_apply(
    f: SchwartzFunction, alpha: complex, tail_policy="analytic"
) -> SchwartzFunction:
    """D^alpha f on the support of f, one exact evaluation per finest ball."""
    if not f.pieces:
        return SchwartzFunction.zero(f.prime)
    fine = f.refine_to(f.finest_radius)
    pieces = tuple((b, vladimirov_at(f, alpha, b.center, tail_policy)) for b, _ in fine.pieces)
    return SchwartzFunction(f.prime, pieces)


def sample_points(f: SchwartzFunction, exterior: bool = True) -> list[Fraction]:
    """One representative per finest ball, plus a point just outside the support."""
    fine = f.refine_to(f.finest_radius)
    pts = [b.center for b, _ in fine.pieces]
    if exterior and f.pieces:
        s = _support_ball(f)
        parent = _ancestor(s, s.radius_exponent + 1)
        for c in parent.children():
            if c != s:
                pts.append(c.center)
                break
    return pts


def vladimirov_eigencheck(p: int, n: int, alpha: complex, m=0, j: int = 1) -> float:
    """max |D^alpha psi - p^(alpha(1-n)) psi| over the sample points."""
    psi = kozyrev_wavelet(p, WaveletIndex(n, m, j))
    lam = complex(p) ** (complex(alpha) * (1 - n))
    return max(abs(vladimirov_at(psi, alpha, x) - lam * psi(x)) for x in sample_points(psi))


def log_vladimirov_at(f: SchwartzFunction, x, alpha: float = 1e-6) -> complex:
    """(D^alpha - 1) f(x) / (alpha ln p) at small alpha."""
    return (vladimirov_at(f, alpha, x) - f(x)) / (alpha * math.log(f.prime))


def wavelet_window(p: int, n_range: Iterable[int], m_denominator_power: int = 2):
    """Kozyrev wavelets with n in ``n_range``, every m with |m|_p <= p**k, every j."""
    q = p**m_denominator_power
    out = []
    for n in n_range:
        for k in range(q):
            for j in range(1, p):
                out.append(WaveletIndex(n, Fraction(k, q), j))
    return out
