"""Exact arithmetic on p-adic numbers at finite precision.

Two representations live here:

* exact rationals (``fractions.Fraction``), used for ball centres and for all
  the exact integration in :mod:`partons.wavelets`; the p-adic valuation,
  norm and fractional part of a rational are computed without loss.
* :class:`PadicNumber`, a capped-relative-precision element of Q_p
  (``unit * p**valuation`` with ``unit`` known modulo ``p**precision``).
  Arithmetic tracks the precision lost to cancellation and raises
  :class:`PrecisionError` instead of truncating silently.

Text format of a :class:`PadicNumber` is the digit expansion written from the
highest stored power down, space separated, with a ``.`` token before the
``p**-1`` digit, followed by ``(base p)``::

    >>> qp_format(qp_parse("7/4", 2, precision=5))
    '0 0 1 . 1 1 (base 2)'
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

from ._arith import require_prime, valuation_int

DEFAULT_PRECISION = 32


class PrecisionError(ArithmeticError):
    """Raised when a result cannot be determined at the tracked precision."""


class PrimeMismatchError(ValueError):
    pass


RationalLike = Union[int, Fraction]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def valuation(x, p: int) -> float | int:
    """p-adic valuation of a rational; ``math.inf`` for zero."""
    x = as_fraction(x)
    if x == 0:
        return math.inf
    return valuation_int(x.numerator, p) - valuation_int(x.denominator, p)


def norm(x, p: int) -> Fraction:
    """|x|_p as an exact rational."""
    v = valuation(x, p)
    if v == math.inf:
        return Fraction(0)
    return Fraction(p) ** (-v)


def frac_part(x, p: int) -> Fraction:
    """p-adic fractional part of a rational, a rational in [0, 1).

    ``x - frac_part(x, p)`` lies in Z_p and the result has a pure power of
    ``p`` as denominator.
    """
    x = as_fraction(x)
    b = x.denominator
    k = valuation_int(b, p)
    if k == 0:
        return Fraction(0)
    pk = p**k
    b_unit = b // pk
    r = (x.numerator * pow(b_unit, -1, pk)) % pk
    return Fraction(r, pk)


def leading_digit(x, p: int) -> int:
    """Digit of ``x`` at position ``v_p(x)``, i.e. ``x|x|_p mod p``."""
    x = as_fraction(x)
    if x == 0:
        raise ValueError("zero has no leading digit")
    u = x * Fraction(p) ** (-valuation(x, p))
    return (u.numerator * pow(u.denominator, -1, p)) % p


def unit_circle_phase(t: Fraction) -> complex:
    """exp(2*pi*i*t) for an exact rational ``t``, snapped at quarter turns."""
    t = t - math.floor(t)
    if t == 0:
        return 1 + 0j
    if t == Fraction(1, 2):
        return -1 + 0j
    if t == Fraction(1, 4):
        return 1j
    if t == Fraction(3, 4):
        return -1j
    return cmath.exp(2j * math.pi * float(t))


# --------------------------------------------------------------------------
# PadicNumber


@dataclass(frozen=True)
class PadicNumber:
    prime: int
    valuation: float | int  # math.inf flags the zero element
    unit: int  # in [0, p**precision), coprime to p unless zero
    precision: int

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be positive")
        if self.is_zero:
            if self.unit != 0:
                raise ValueError("zero element must carry unit 0")
        elif self.unit % self.prime == 0:
            raise ValueError("leading digit must be nonzero")

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls, p: int, precision: int = DEFAULT_PRECISION) -> "PadicNumber":
        return cls(require_prime(p), math.inf, 0, precision)

    @classmethod
    def from_rational(cls, x, p: int, precision: int = DEFAULT_PRECISION) -> "PadicNumber":
        p = require_prime(p)
        x = as_fraction(x)
        if x == 0:
            return cls.zero(p, precision)
        v = valuation(x, p)
        u = x * Fraction(p) ** (-v)
        mod = p**precision
        unit = (u.numerator * pow(u.denominator, -1, mod)) % mod
        return cls(p, int(v), unit, precision)

    @classmethod
    def coerce(cls, x, p: int, precision: int = DEFAULT_PRECISION) -> "PadicNumber":
        if isinstance(x, PadicNumber):
            if x.prime != p:
                raise PrimeMismatchError(f"expected prime {p}, got {x.prime}")
            return x
        return cls.from_rational(x, p, precision)

    # inspection ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.valuation == math.inf

    @property
    def digits(self) -> tuple[int, ...]:
        """Stored digits, leading (lowest power) digit first."""
        if self.is_zero:
            return ()
        out, u = [], self.unit
        for _ in range(self.precision):
            u, d = divmod(u, self.prime)
            out.append(d)
        return tuple(out)

    @property
    def norm(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.prime) ** (-self.valuation)

    @property
    def absolute_precision(self) -> float | int:
        return self.valuation + self.precision

    def to_fraction(self) -> Fraction:
        """The truncated representative ``sum(d_i p**i)``."""
        if self.is_zero:
            return Fraction(0)
        return self.unit * Fraction(self.prime) ** self.valuation

    def fractional_part(self) -> Fraction:
        if self.is_zero or self.valuation >= 0:
            return Fraction(0)
        if self.precision < -self.valuation:
            raise PrecisionError("fractional digits exceed the stored precision")
        k = -self.valuation
        return Fraction(self.unit % self.prime**k, self.prime**k)

    # arithmetic ---------------------------------------------------------

    def _other(self, y) -> "PadicNumber":
        return PadicNumber.coerce(y, self.prime, self.precision)

    def __neg__(self) -> "PadicNumber":
        if self.is_zero:
            return self
        mod = self.prime**self.precision
        return PadicNumber(self.prime, self.valuation, (-self.unit) % mod, self.precision)

    def __add__(self, y) -> "PadicNumber":
        y = self._other(y)
        if self.is_zero:
            return y
        if y.is_zero:
            return self
        p = self.prime
        m = min(self.valuation, y.valuation)
        cap = min(self.absolute_precision, y.absolute_precision)
        mod = p ** (cap - m)
        s = (self.unit * p ** (self.valuation - m) + y.unit * p ** (y.valuation - m)) % mod
        if s == 0:
            raise PrecisionError(
                f"total cancellation: sum is 0 modulo p^{cap}, valuation undetermined"
            )
        shift = valuation_int(s, p)
        v = m + shift
        prec = cap - v
        return PadicNumber(p, v, (s // p**shift) % p**prec, prec)

    __radd__ = __add__

    def __sub__(self, y) -> "PadicNumber":
        return self + (-self._other(y))

    def __rsub__(self, y) -> "PadicNumber":
        return self._other(y) + (-self)

    def __mul__(self, y) -> "PadicNumber":
        y = self._other(y)
        if self.is_zero or y.is_zero:
            return PadicNumber.zero(self.prime, min(self.precision, y.precision))
        prec = min(self.precision, y.precision)
        mod = self.prime**prec
        return PadicNumber(
            self.prime, self.valuation + y.valuation, (self.unit * y.unit) % mod, prec
        )

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.is_zero:
            raise ZeroDivisionError("inverse of the zero p-adic number")
        mod = self.prime**self.precision
        return PadicNumber(self.prime, -self.valuation, pow(self.unit, -1, mod), self.precision)

    def __truediv__(self, y) -> "PadicNumber":
        return self * self._other(y).inverse()

    def __str__(self) -> str:
        return qp_format(self)


# --------------------------------------------------------------------------
# text format

_BASE_SUFFIX = re.compile(r"\(\s*base\s+(\d+)\s*\)\s*$")


def qp_format(x: PadicNumber) -> str:
    if x.is_zero:
        return f"0 (base {x.prime})"
    digits = x.digits
    lo = min(x.valuation, 0)
    hi = max(x.valuation + x.precision - 1, 0)
    tokens = []
    for pos in range(hi, lo - 1, -1):
        i = pos - x.valuation
        tokens.append(str(digits[i]) if 0 <= i < len(digits) else "0")
        if pos == 0 and lo < 0:
            tokens.append(".")
    return " ".join(tokens) + f" (base {x.prime})"


def _parse_digit_expansion(body: str, p: int) -> tuple[list[int], int]:
    """Return (digits lowest power first, exponent of the first digit)."""
    if " " in body.strip():
        tokens = body.split()
        if tokens.count(".") > 1:
            raise ValueError("more than one radix point")
        if "." in tokens:
            k = tokens.index(".")
            left, right = tokens[:k], tokens[k + 1 :]
        else:
            left, right = tokens, []
    else:
        if p > 10:
            raise ValueError("digits must be space separated for p > 10")
        if body.count(".") != 1:
            raise ValueError("malformed digit expansion")
        left_s, right_s = body.split(".")
        left, right = list(left_s), list(right_s)
    try:
        high_to_low = [int(t) for t in left + right]
    except ValueError:
        raise ValueError(f"malformed digit in {body!r}") from None
    if any(d < 0 or d >= p for d in high_to_low):
        raise ValueError(f"digit out of range for base {p}")
    return high_to_low[::-1], -len(right)


def qp_parse(text: str, p: int, precision: int = DEFAULT_PRECISION) -> PadicNumber:
    """Parse a rational literal (``"12"``, ``"-3/4"``) or a digit expansion.

    A text containing whitespace or ``.`` is read as a digit expansion; an
    optional ``(base p)`` suffix must agree with ``p``.
    """
    p = require_prime(p)
    if not isinstance(text, str) or not text.strip():
        raise ValueError("empty p-adic literal")
    body = text.strip()
    m = _BASE_SUFFIX.search(body)
    if m:
        if int(m.group(1)) != p:
            raise PrimeMismatchError(f"text is in base {m.group(1)}, expected {p}")
        body = body[: m.start()].strip()
    if body == "0":
        return PadicNumber.zero(p, precision)
    if " " not in body and "." not in body:
        try:
            x = Fraction(body)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"malformed rational literal {body!r}") from None
        return PadicNumber.from_rational(x, p, precision)

    digits, low = _parse_digit_expansion(body, p)
    nz = [i for i, d in enumerate(digits) if d]
    if not nz:
        return PadicNumber.zero(p, precision)
    first = nz[0]
    sig = digits[first:][:precision]
    unit = sum(d * p**i for i, d in enumerate(sig))
    return PadicNumber(p, low + first, unit, len(sig))


def qp_arith(op: str, x: PadicNumber, y: PadicNumber | None = None) -> PadicNumber:
    if op in ("add", "mul", "sub", "div"):
        if y is None:
            raise ValueError(f"{op} needs two operands")
        if isinstance(y, PadicNumber) and y.prime != x.prime:
            raise PrimeMismatchError("operands have different primes")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    if op == "neg":
        return -x
    if op == "inv":
        return x.inverse()
    raise ValueError(f"unknown operation {op!r}")


def qp_fractional_part(x) -> Fraction:
    if isinstance(x, PadicNumber):
        return x.fractional_part()
    raise TypeError("use frac_part(x, p) for plain rationals")


def additive_character(x, p: int | None = None) -> complex:
    """exp(2*pi*i*frac_p(x)) for a PadicNumber or (with ``p``) a rational."""
    if isinstance(x, PadicNumber):
        return unit_circle_phase(x.fractional_part())
    if p is None:
        raise ValueError("a prime is required for rational input")
    return unit_circle_phase(frac_part(x, p))


def indicator_omega(x, center, p: int | None = None) -> int:
    """1 if |x - center|_p <= 1 else 0.

    Decided through fractional parts, so it never suffers cancellation:
    ``x - c`` lies in Z_p exactly when the two fractional parts agree.
    """
    if isinstance(x, PadicNumber) or isinstance(center, PadicNumber):
        q = x.prime if isinstance(x, PadicNumber) else center.prime
        if p is not None and p != q:
            raise PrimeMismatchError("prime mismatch")
        xx = PadicNumber.coerce(x, q)
        cc = PadicNumber.coerce(center, q)
        return int(xx.fractional_part() == cc.fractional_part())
    if p is None:
        raise ValueError("a prime is required for rational input")
    return int(frac_part(x, p) == frac_part(center, p))


# --------------------------------------------------------------------------
# balls


@dataclass(frozen=True)
class Ball:
    """The closed ball {x : |x - center|_p <= p**radius_exponent}.

    ``center`` is kept canonical (digits only below position
    ``-radius_exponent``), so equal balls compare and hash equal.
    """

    prime: int
    center: Fraction
    radius_exponent: int

    def __hash__(self) -> int:
        # balls are dictionary keys in every integration; hash the Fraction once
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.prime, self.center, self.radius_exponent))
            object.__setattr__(self, "_hash", h)
        return h

    @classmethod
    def make(cls, p: int, center, r: int) -> "Ball":
        return cls(p, canonical_center(as_fraction(center), p, r), int(r))

    @property
    def measure(self) -> Fraction:
        return Fraction(self.prime) ** self.radius_exponent

    @property
    def contains_zero(self) -> bool:
        return self.center == 0

    def contains(self, x) -> bool:
        return valuation(as_fraction(x) - self.center, self.prime) >= -self.radius_exponent

    def ancestor(self, r: int) -> "Ball":
        if r < self.radius_exponent:
            raise ValueError("ancestor radius must not be smaller")
        return Ball(self.prime, canonical_center(self.center, self.prime, r), r)

    def contains_ball(self, other: "Ball") -> bool:
        return (
            other.radius_exponent <= self.radius_exponent
            and other.ancestor(self.radius_exponent) == self
        )

    def intersects(self, other: "Ball") -> bool:
        return self.contains_ball(other) or other.contains_ball(self)

    def children(self) -> list["Ball"]:
        p, r = self.prime, self.radius_exponent
        step = Fraction(p) ** (-r)
        return [Ball(p, self.center + d * step, r - 1) for d in range(p)]

    def representative(self) -> Fraction:
        return self.center


def canonical_center(c: Fraction, p: int, r: int) -> Fraction:
    scale = Fraction(p) ** r
    return frac_part(c * scale, p) / scale
