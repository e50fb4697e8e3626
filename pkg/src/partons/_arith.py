"""Small integer helpers shared by the number-theoretic modules."""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt

import numpy as np


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def require_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ValueError(f"{p!r} is not a prime")
    return int(p)


@lru_cache(maxsize=8)
def _sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for q in range(2, isqrt(limit) + 1):
        if flags[q]:
            flags[q * q :: q] = False
    return np.flatnonzero(flags)


def primes_below(limit: int) -> list[int]:
    """All primes ``p < limit``."""
    if limit <= 2:
        return []
    return [int(q) for q in _sieve(int(limit) - 1)]


def primes_array(limit: int) -> np.ndarray:
    if limit <= 2:
        return np.zeros(0, dtype=np.int64)
    return _sieve(int(limit) - 1)


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of a positive integer by trial division."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def valuation_int(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def euler_phi(n: int) -> int:
    result = n
    for q in factorize(n):
        result -= result // q
    return result


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b
