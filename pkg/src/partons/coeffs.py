"""Multiplicative coefficient streams of Hecke eigenforms.

A stream is fixed by its weight k, nebentypus values chi(p) and seeds a(p).
Prime powers follow the Hecke recursion

    a(p^(m+1)) = a(p) a(p^m) - chi(p) p^(k-1) a(p^(m-1)),

and a(n) is the product over the prime powers dividing n.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from ._arith import divisors, factorize, primes_below, require_prime
from .dirichlet import DirichletCharacter, argument_at

KINDS = ("cuspform", "product-dirichlet", "custom")


class MissingSeedError(KeyError):
    """No a(p) is available for a prime factor of the requested index."""


@dataclass(eq=False)
class CoefficientStream:
    weight: int
    nebentypus: Mapping[int, complex] | Callable[[int], complex]
    seeds: Mapping[int, complex] | Callable[[int], complex]
    kind: str = "custom"
    exact: bool = False  # integer arithmetic throughout (tau)
    name: str = ""
    _memo: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown stream kind {self.kind!r}")
        if self.weight < 1:
            raise ValueError("weight must be a positive integer")

    def chi(self, p: int):
        src = self.nebentypus
        if callable(src):
            return src(p)
        return src.get(p, 1)

    def seed(self, p: int):
        src = self.seeds
        try:
            value = src(p) if callable(src) else src[p]
        except (KeyError, IndexError):
            raise MissingSeedError(f"no seed a({p})") from None
        if value is None:
            raise MissingSeedError(f"no seed a({p})")
        return value

    def prime_power(self, p: int, m: int):
        """a(p^m) from the three-term recursion, memoized per prime."""
        if m == 0:
            return 1
        with self._lock:
            row = self._memo.get(p)
            if row is None:
                row = [1, self.seed(p)]
                self._memo[p] = row
            if len(row) <= m:
                ap, c = row[1], self.chi(p)
                q = p ** (self.weight - 1)
                if not self.exact:
                    ap, c = complex(ap), complex(c)
                while len(row) <= m:
                    row.append(ap * row[-1] - c * q * row[-2])
            return row[m]

    def __call__(self, n: int):
        return stream_coefficient(self, n)

    def table(self, n_max: int) -> list:
        return [stream_coefficient(self, n) for n in range(1, n_max + 1)]

    def descriptor(self) -> str:
        return self.name


def stream_coefficient(stream: CoefficientStream, n: int):
    """a(n) as the product of prime-power coefficients."""
    n = int(n)
    if n < 1:
        raise ValueError("coefficients are indexed by positive integers")
    out = 1
    for p, e in factorize(n).items() if n > 1 else ():
        out = out * stream.prime_power(p, e)
    return out


# --------------------------------------------------------------------------
# Ramanujan tau


def _euler_product_series(n_terms: int) -> list[int]:
    """prod_{n>=1} (1 - q^n) up to q^(n_terms-1), integer coefficients."""
    E = np.zeros(n_terms, dtype=np.int64)
    E[0] = 1
    for n in range(1, n_terms):
        E[n:] -= E[:-n].copy()
    return [int(c) for c in E]


def _series_power(E: list[int], k: int) -> list[int]:
    """E^k for E[0] = 1, by the power recurrence n F_n = sum ((k+1)j - n) E_j F_(n-j)."""
    N = len(E)
    F = [0] * N
    F[0] = 1
    nz = [(j, e) for j, e in enumerate(E) if j and e]
    for n in range(1, N):
        acc = 0
        for j, e in nz:
            if j > n:
                break
            acc += ((k + 1) * j - n) * e * F[n - j]
        F[n], rem = divmod(acc, n)
        if rem:
            raise ArithmeticError("non-integral power series coefficient")
    return F


def ramanujan_tau_table(n_max: int) -> list[int]:
    """[tau(1), ..., tau(n_max)] from q prod (1 - q^n)^24 in exact integers.

    The Euler product has only the pentagonal-number terms, so the power
    recurrence costs O(n_max^1.5) big-integer operations.
    """
    if n_max < 1:
        raise ValueError("n_max must be positive")
    return _series_power(_euler_product_series(n_max), 24)


_TAU_CACHE: dict[int, list[int]] = {}
_TAU_LOCK = threading.Lock()


def tau_seed_table(limit: int) -> list[int]:
    with _TAU_LOCK:
        best = max((k for k in _TAU_CACHE if k >= limit), default=None)
        if best is None:
            _TAU_CACHE[limit] = ramanujan_tau_table(limit)
            best = limit
        return _TAU_CACHE[best]


def tau_stream(seed_limit: int = 10_000) -> CoefficientStream:
    """Weight 12, level 1: seeds tau(p) read from the eta-product oracle."""

    def seed(p: int) -> int:
        if p > seed_limit:
            raise MissingSeedError(f"tau({p}) beyond seed table of size {seed_limit}")
        return tau_seed_table(seed_limit)[p - 1]

    return CoefficientStream(12, lambda p: 1, seed, "cuspform", exact=True, name="tau")


def custom_stream(
    weight: int, seeds: Mapping[int, complex], nebentypus: Mapping[int, complex] | None = None,
    name: str = "custom",
) -> CoefficientStream:
    return CoefficientStream(weight, dict(nebentypus or {}), dict(seeds), "custom", name=name)


def product_dirichlet_stream(nu: DirichletCharacter) -> CoefficientStream:
    """Coefficients of L(s, nu) L(s, conj nu): weight 1, a(p) = 2 cos arg nu(p)."""
    if nu.is_principal:
        raise ValueError("the product stream needs a nonprincipal character")
    N = nu.modulus

    def seed(p: int) -> complex:
        v = nu(p)
        return v + v.conjugate()

    def chi(p: int) -> complex:
        return 0 if N % p == 0 else 1

    return CoefficientStream(1, chi, seed, "product-dirichlet", name=f"dirichlet:{nu}")


# --------------------------------------------------------------------------
# Chebyshev polynomials and character convolutions


def chebyshev_u(n: int, xi):
    """U_n(xi) by U_0 = 1, U_1 = 2 xi, U_(n+1) = 2 xi U_n - U_(n-1)."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    xi = np.asarray(xi, dtype=float) if np.ndim(xi) else xi
    prev, cur = 1.0 + 0 * xi, 2 * xi
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, 2 * xi * cur - prev
    return cur


def chebyshev_u_trig(n: int, theta):
    """sin((n+1) theta) / sin(theta), the closed form of U_n(cos theta)."""
    return np.sin((n + 1) * theta) / np.sin(theta)


def _require_nonprincipal(nu: DirichletCharacter) -> None:
    if nu.is_principal:
        raise ValueError("convolution coefficients need a nonprincipal character")


def convolution_coeffs(nu: DirichletCharacter, n_max: int) -> np.ndarray:
    """a(n) = sum_{d | n} nu(d) conj(nu)(n/d) for n = 1..n_max (index 0 unused)."""
    _require_nonprincipal(nu)
    vals = nu.values(n_max + 1)
    out = np.zeros(n_max + 1, dtype=complex)
    for d in range(1, n_max + 1):
        if vals[d] == 0:
            continue
        multiples = np.arange(d, n_max + 1, d)
        out[multiples] += vals[d] * np.conj(vals[multiples // d])
    return out


def chebyshev_product_coeff(nu: DirichletCharacter, n: int) -> float:
    """prod_p U_(n_p)(cos arg nu(p)), with primes dividing N forcing n_p = 0."""
    _require_nonprincipal(nu)
    out = 1.0
    for p, e in factorize(n).items() if n > 1 else ():
        theta = argument_at(nu, p)
        if theta is None:
            return 0.0
        out *= chebyshev_u(e, math.cos(theta))
    return out


def divisor_sum_coeff(nu: DirichletCharacter, n: int) -> complex:
    _require_nonprincipal(nu)
    return sum(nu(d) * nu(n // d).conjugate() for d in divisors(n))


@dataclass(frozen=True)
class BoundReport:
    max_ratio: float
    argmax_prime: int
    constant: float
    ratios: dict

    @property
    def ok(self) -> bool:
        return self.max_ratio <= self.constant * (1 + 1e-12)


def coefficient_bound_check(stream: CoefficientStream, C: float, cutoff: int = 100) -> BoundReport:
    """max over primes p < cutoff of |a(p)| / p^((k-1)/2), compared with C."""
    ratios = {}
    for p in primes_below(cutoff):
        ratios[p] = abs(complex(stream.prime_power(p, 1))) / p ** ((stream.weight - 1) / 2)
    p_max = max(ratios, key=ratios.get)
    return BoundReport(ratios[p_max], p_max, C, ratios)


def local_euler_factor(stream: CoefficientStream, p: int, s: complex) -> complex:
    """1 / (1 - a(p) p^-s + chi(p) p^(k-1-2s))."""
    p = require_prime(p)
    x = complex(p) ** (-complex(s))
    return 1 / (1 - complex(stream.prime_power(p, 1)) * x
                + complex(stream.chi(p)) * p ** (stream.weight - 1) * x * x)


def stream_csv_rows(stream: CoefficientStream, n_max: int) -> list[tuple]:
    """Rows (n, Re a(n), Im a(n)) for n = 1..n_max; integers stay exact."""
    rows = []
    for n in range(1, n_max + 1):
        v = stream(n)
        rows.append((n, v, 0) if isinstance(v, int) else (n, complex(v).real, complex(v).imag))
    return rows


def stream_from_descriptor(text: str, seed_limit: int = 10_000) -> CoefficientStream:
    """Build a stream from a built-in name or flat key=value text.

    Built-ins: ``tau`` and ``dirichlet:N:i``.  Otherwise lines of
    ``weight = k``, ``character = N:i`` (nebentypus, optional),
    ``seeds = 2:-24, 3:252`` and optional ``kind``/``name``.
    """
    from .dirichlet import parse_character

    text = text.strip()
    if text == "tau":
        return tau_stream(seed_limit)
    if text.startswith("dirichlet:"):
        return product_dirichlet_stream(parse_character(text.split(":", 1)[1]))
    fields = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed stream line {line!r}")
        key, value = (t.strip() for t in line.split("=", 1))
        fields[key] = value
    if "weight" not in fields or "seeds" not in fields:
        raise ValueError("stream descriptor needs 'weight' and 'seeds'")
    seeds = {}
    for item in fields["seeds"].split(","):
        p_text, v_text = item.split(":")
        seeds[require_prime(int(p_text))] = complex(v_text.strip().replace(" ", ""))
    neb: dict[int, complex] | Callable[[int], complex] = {}
    if "character" in fields:
        chi = parse_character(fields["character"])
        neb = chi
    kind = fields.get("kind", "custom")
    return CoefficientStream(int(fields["weight"]), neb, seeds, kind, name=fields.get("name", "custom"))
