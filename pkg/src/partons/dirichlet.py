"""Dirichlet characters modulo N from generators of the unit group.

The unit group (Z/NZ)^* is the product over prime powers q = p^e || N of
cyclic groups (generated by a primitive root for odd p, by -1 and 5 for
2^e with e >= 3).  A character is an exponent vector against those
generators; values are exact roots of unity of order E, the exponent of
the group, until evaluated.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._arith import divisors, euler_phi, factorize, lcm
from .padic import unit_circle_phase


@dataclass(frozen=True)
class _Generator:
    residue: int  # generator lifted to Z/NZ by CRT
    order: int


def _primitive_root(q: int, p: int) -> int:
    """Smallest primitive root modulo q = p^e, p odd."""
    phi = euler_phi(q)
    factors = list(factorize(phi))
    for g in range(2, q):
        if g % p and all(pow(g, phi // r, q) != 1 for r in factors):
            return g
    raise ArithmeticError(f"no primitive root mod {q}")


def _crt_lift(residue: int, q: int, N: int) -> int:
    """x = residue mod q and x = 1 mod N/q."""
    rest = N // q
    if rest == 1:
        return residue % N
    t = ((residue - 1) * pow(rest, -1, q)) % q
    return (1 + rest * t) % N


@lru_cache(maxsize=64)
def unit_group_generators(N: int) -> tuple[_Generator, ...]:
    if N < 1:
        raise ValueError("modulus must be positive")
    gens = []
    for p, e in sorted(factorize(N).items()) if N > 1 else []:
        q = p**e
        if p == 2:
            if e >= 2:
                gens.append(_Generator(_crt_lift(-1, q, N), 2))
            if e >= 3:
                gens.append(_Generator(_crt_lift(5, q, N), 2 ** (e - 2)))
        else:
            gens.append(_Generator(_crt_lift(_primitive_root(q, p), q, N), euler_phi(q)))
    return tuple(gens)


@lru_cache(maxsize=64)
def _discrete_logs(N: int) -> dict[int, tuple[int, ...]]:
    """Residue -> exponent vector against the generators, by enumeration."""
    gens = unit_group_generators(N)
    table: dict[int, tuple[int, ...]] = {}
    for exps in itertools.product(*(range(g.order) for g in gens)):
        r = 1 % N
        for g, k in zip(gens, exps):
            r = r * pow(g.residue, k, N) % N
        table[r] = exps
    return table


@dataclass(frozen=True)
class DirichletCharacter:
    modulus: int
    exponents: tuple[int, ...]
    label: int = 0
    _orders: tuple[int, ...] = field(default=(), repr=False, compare=False)

    @property
    def group_exponent(self) -> int:
        E = 1
        for o in self._orders:
            E = lcm(E, o)
        return E

    def log_value(self, m: int) -> Fraction | None:
        """nu(m) = exp(2 pi i * result), or None when gcd(m, N) > 1."""
        N = self.modulus
        if math.gcd(m, N) != 1:
            return None
        logs = _discrete_logs(N)[m % N]
        t = sum(Fraction(a * k, o) for a, k, o in zip(self.exponents, logs, self._orders))
        return t - math.floor(t)

    def __call__(self, m: int) -> complex:
        t = self.log_value(int(m))
        return 0j if t is None else unit_circle_phase(t)

    def values(self, count: int | None = None) -> np.ndarray:
        """nu(0), nu(1), ..., nu(count-1) (default one period)."""
        count = self.modulus if count is None else count
        period = np.array([self(m) for m in range(self.modulus)], dtype=complex)
        return np.resize(period, count)

    @property
    def is_principal(self) -> bool:
        return all(a == 0 for a in self.exponents)

    def conjugate(self) -> "DirichletCharacter":
        exps = tuple((-a) % o for a, o in zip(self.exponents, self._orders))
        return character_from_exponents(self.modulus, exps)

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        if other.modulus != self.modulus:
            raise ValueError("characters must share the modulus")
        exps = tuple((a + b) % o for a, b, o in zip(self.exponents, other.exponents, self._orders))
        return character_from_exponents(self.modulus, exps)

    @property
    def order(self) -> int:
        o = 1
        for a, n in zip(self.exponents, self._orders):
            o = lcm(o, n // math.gcd(a, n))
        return o

    def __str__(self) -> str:
        return f"{self.modulus}:{self.label}"


@lru_cache(maxsize=64)
def characters_mod(N: int) -> tuple[DirichletCharacter, ...]:
    """All phi(N) characters, lexicographic in exponent vectors (principal first)."""
    gens = unit_group_generators(N)
    orders = tuple(g.order for g in gens)
    return tuple(
        DirichletCharacter(N, exps, label, orders)
        for label, exps in enumerate(itertools.product(*(range(o) for o in orders)))
    )


def character_from_exponents(N: int, exps: tuple[int, ...]) -> DirichletCharacter:
    for chi in characters_mod(N):
        if chi.exponents == tuple(exps):
            return chi
    raise ValueError(f"no character mod {N} with exponents {exps}")


def character(N: int, index: int) -> DirichletCharacter:
    chars = characters_mod(N)
    if not 0 <= index < len(chars):
        raise ValueError(f"character index {index} outside 0..{len(chars) - 1} for N={N}")
    return chars[index]


def parse_character(descriptor: str) -> DirichletCharacter:
    """Parse the text form ``"N:index"``."""
    try:
        n_text, i_text = descriptor.split(":")
        return character(int(n_text), int(i_text))
    except (ValueError, TypeError) as exc:
        raise ValueError(f"bad character descriptor {descriptor!r}: {exc}") from None


def parity_epsilon(nu: DirichletCharacter) -> int:
    """0 for even characters, 1 for odd ones."""
    v = nu(-1)
    return 0 if abs(v - 1) < 0.5 else 1


def gauss_sum(nu: DirichletCharacter) -> complex:
    N = nu.modulus
    return sum(nu(m) * unit_circle_phase(Fraction(m, N)) for m in range(N))


def induces(nu: DirichletCharacter, d: int) -> bool:
    """True if nu is constant on residues = 1 mod d coprime to N."""
    N = nu.modulus
    return all(
        nu.log_value(m) == 0 for m in range(1, N, d) if math.gcd(m, N) == 1
    )


def conductor(nu: DirichletCharacter) -> int:
    for d in divisors(nu.modulus):
        if induces(nu, d):
            return d
    return nu.modulus


def is_primitive(nu: DirichletCharacter) -> bool:
    return conductor(nu) == nu.modulus


def character_table_csv_rows(nu: DirichletCharacter) -> list[tuple[int, float, float]]:
    return [(m, nu(m).real, nu(m).imag) for m in range(nu.modulus)]


def argument_at(nu: DirichletCharacter, p: int) -> float | None:
    """arg nu(p) in (-pi, pi], None when p divides N."""
    v = nu(p)
    return None if v == 0 else cmath.phase(v)
