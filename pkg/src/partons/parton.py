"""Local p-arton states of a multiplicative coefficient stream.

At a prime p the coefficients a(p^m), m = 0..M, are the components of the
state along the wavelets psi_{1-m,0,1} supported in p^-1 Z_p.  Index m
counts the power of p; ``raise`` moves weight to larger m (the operator
a_- on wavelets, n -> n-1) and ``lower`` to smaller m (a_+, which
annihilates psi_{1,0,1}).  Every identity is checked on indices 0..M-1;
index M is the truncation boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from ._arith import factorize, primes_below, require_prime
from .coeffs import CoefficientStream, local_euler_factor
from .pmellin import cp, inverse_mellin
from .wavelets import (
    DivergenceError,
    SchwartzFunction,
    WaveletIndex,
    ball_integral,
    inner_product_L2,
    kozyrev_wavelet,
    modified_wavelet,
)
from .padic import Ball


class TruncationError(IndexError):
    """An exponent exceeds the truncation of the local state."""


@dataclass(frozen=True)
class PartonState:
    p: int
    M: int
    coeffs: tuple
    rescaled: bool = False
    weight: int = 1
    nebentypus_at_p: complex = 1
    tail_lost: complex = 0  # mass pushed past index M by the last ladder step
    boundary_unknown: bool = False  # entry M is not determined by the window

    def __post_init__(self):
        if len(self.coeffs) != self.M + 1:
            raise ValueError(f"expected {self.M + 1} coefficients, got {len(self.coeffs)}")

    def __getitem__(self, m: int):
        return self.coeffs[m]

    def as_array(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def with_coeffs(self, coeffs, **changes) -> "PartonState":
        return replace(self, coeffs=tuple(coeffs), **changes)

    def scaled(self, factor) -> "PartonState":
        return self.with_coeffs(factor * c for c in self.coeffs)

    def __add__(self, other: "PartonState") -> "PartonState":
        _check_pair(self, other)
        return self.with_coeffs(a + b for a, b in zip(self.coeffs, other.coeffs))

    def to_json(self) -> str:
        return json.dumps(
            {
                "p": self.p,
                "M": self.M,
                "rescaled": self.rescaled,
                "weight": self.weight,
                "nebentypus_at_p": {"re": complex(self.nebentypus_at_p).real,
                                    "im": complex(self.nebentypus_at_p).imag},
                "coeffs": [{"re": complex(c).real, "im": complex(c).imag} for c in self.coeffs],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "PartonState":
        d = json.loads(text)
        coeffs = tuple(complex(c["re"], c["im"]) for c in d["coeffs"])
        chi = d.get("nebentypus_at_p", {"re": 1.0, "im": 0.0})
        return cls(d["p"], d["M"], coeffs, d["rescaled"], d.get("weight", 1),
                   complex(chi["re"], chi["im"]))


def _check_pair(f: PartonState, g: PartonState) -> None:
    if f.p != g.p or f.M != g.M:
        raise ValueError("states must share prime and truncation")
    if f.rescaled != g.rescaled:
        raise ValueError("cannot combine rescaled and un-rescaled states")


def zero_state(p: int, M: int, rescaled: bool = False, weight: int = 1) -> PartonState:
    return PartonState(p, M, (0,) * (M + 1), rescaled, weight)


def vacuum_state(p: int, M: int, rescaled: bool = False, weight: int = 1) -> PartonState:
    return PartonState(p, M, (1,) + (0,) * M, rescaled, weight)


def decompose(stream: CoefficientStream, p: int, M: int, rescaled: bool = False) -> PartonState:
    """c_m = a(p^m), times p^(-(k-1)m/2) when ``rescaled``."""
    p = require_prime(p)
    if M < 1:
        raise ValueError("truncation M must be positive")
    k = stream.weight
    coeffs = [stream.prime_power(p, m) for m in range(M + 1)]
    if rescaled:
        coeffs = [complex(c) * p ** (-(k - 1) * m / 2) for m, c in enumerate(coeffs)]
    return PartonState(p, M, tuple(coeffs), rescaled, k, stream.chi(p))


def reconstruct(states: Mapping[int, PartonState], n: int):
    """a(n) as the product over p | n of c_{v_p(n)} (un-rescaled states)."""
    if n < 1:
        raise ValueError("n must be positive")
    out = 1
    for p, e in factorize(n).items() if n > 1 else ():
        state = states.get(p)
        if state is None:
            raise KeyError(f"no local state at p={p}")
        if state.rescaled:
            raise ValueError("reconstruct expects un-rescaled states")
        if e > state.M:
            raise TruncationError(f"exponent {e} of {p} exceeds truncation M={state.M}")
        out = out * state.coeffs[e]
    return out


def _raise_list(c: Sequence) -> list:
    return [0 * c[0]] + list(c[:-1])


def atom_state(p: int, a_p, chi_p, k: int, M: int) -> PartonState:
    """(1 - a(p) R + p^(k-1) chi(p) R^2)^-1 applied to the vacuum, R the raise shift.

    R is nilpotent on the window, so the geometric series stops after M
    terms and is exact there.
    """
    q = p ** (k - 1)

    def X(v):
        r1 = _raise_list(v)
        r2 = _raise_list(r1)
        return [a_p * x - chi_p * q * y for x, y in zip(r1, r2)]

    v = [1] + [0] * M
    total = list(v)
    for _ in range(M):
        v = X(v)
        total = [a + b for a, b in zip(total, v)]
    return PartonState(p, M, tuple(total), False, k, chi_p)


def ladder(state: PartonState, direction: str) -> PartonState:
    """Shift the coefficient window.

    ``raise``: c'_0 = 0, c'_{m+1} = c_m; c_M leaves the window (``tail_lost``).
    ``lower``: c'_m = c_{m+1}; c_0 is dropped and c'_M is unknown.
    """
    c = state.coeffs
    zero = 0 * c[0]
    if direction == "raise":
        return state.with_coeffs((zero,) + c[:-1], tail_lost=c[-1], boundary_unknown=False)
    if direction == "lower":
        return state.with_coeffs(c[1:] + (zero,), tail_lost=0, boundary_unknown=True)
    raise ValueError(f"direction must be 'raise' or 'lower', not {direction!r}")


def hecke_apply(state: PartonState, variant: str = "I"):
    """T(p) on the window and its eigen-residual over indices 0..M-1.

    I:  (Tc)_m = c_{m+1} + chi p^(k-1) c_{m-1}, eigenvalue a(p) = c_1.
    II: (Tb)_m = b_{m+1} + chi b_{m-1}, eigenvalue p^(-(k-1)/2) a(p) = b_1.
    """
    if variant == "I" and state.rescaled:
        raise ValueError("variant I acts on un-rescaled states")
    if variant == "II" and not state.rescaled:
        raise ValueError("variant II acts on rescaled states")
    if variant not in ("I", "II"):
        raise ValueError(f"unknown Hecke variant {variant!r}")
    p, k, chi = state.p, state.weight, state.nebentypus_at_p
    factor = chi * p ** (k - 1) if variant == "I" else chi
    up, down = ladder(state, "lower").coeffs, ladder(state, "raise").coeffs
    out = tuple(u + factor * d for u, d in zip(up, down))
    eigen = state.coeffs[1]
    scale = state.coeffs[0]
    residual = max(
        (abs(complex(out[m] - eigen * state.coeffs[m])) for m in range(state.M)), default=0.0
    )
    if scale == 0:
        residual = max(abs(complex(x)) for x in out[: state.M]) if state.M else 0.0
    return state.with_coeffs(out, boundary_unknown=True), residual


# --------------------------------------------------------------------------
# q-series oracle for U, V and T


@dataclass(frozen=True)
class QSeries:
    coeffs: tuple  # a(0), a(1), ..., a(N)

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_stream(cls, stream: CoefficientStream, N: int) -> "QSeries":
        return cls((0,) + tuple(stream.table(N)))

    def __getitem__(self, n: int):
        return self.coeffs[n]


def uv_on_qseries(f: QSeries, m: int, op: str, k: int | None = None, chi=1) -> QSeries:
    """Coefficient-level V(m), U(m) and T(p) = U(p) + chi p^(k-1) V(p)."""
    if m < 1:
        raise ValueError("m must be positive")
    a, N = f.coeffs, f.truncation
    zero = 0 * a[0]
    if op == "V":
        b = [zero] * (N + 1)
        for n in range(N // m + 1):
            b[m * n] = a[n]
        return QSeries(tuple(b))
    if op == "U":
        return QSeries(tuple(a[m * n] for n in range(N // m + 1)))
    if op == "T":
        if k is None:
            raise ValueError("T needs the weight k")
        require_prime(m)
        q = chi * m ** (k - 1)
        return QSeries(
            tuple(a[m * n] + (q * a[n // m] if n % m == 0 else zero) for n in range(N // m + 1))
        )
    raise ValueError(f"unknown operator {op!r}")


def local_states(stream: CoefficientStream, N: int, rescaled: bool = False) -> dict[int, PartonState]:
    """States at every prime <= N with the smallest M covering exponents up to N."""
    out = {}
    for p in primes_below(N + 1):
        M = max(1, int(math.log(N) / math.log(p) + 1e-9) + 1)
        out[p] = decompose(stream, p, M, rescaled)
    return out


def hecke_qseries_residual(stream: CoefficientStream, p: int, N: int) -> float:
    """max relative |T(p) via q-series - T(p) via the local state at p|, n <= N/p.

    The T-applied state replaces the factor at p for every n, including
    n coprime to p, where it contributes its entry at index 0, a(p).
    """
    qs = QSeries.from_stream(stream, N)
    oracle = uv_on_qseries(qs, p, "T", stream.weight, stream.chi(p))
    states = local_states(stream, N)
    t_state, _ = hecke_apply(states[p], "I")
    worst = 0.0
    for n in range(1, oracle.truncation + 1):
        e = 0
        rest = n
        while rest % p == 0:
            rest //= p
            e += 1
        got = t_state[e] * reconstruct(states, rest)
        want = oracle[n]
        worst = max(worst, abs(complex(got - want)) / max(1.0, abs(complex(want))))
    return worst


# --------------------------------------------------------------------------
# assembled functions and inner products


def assemble(state: PartonState) -> SchwartzFunction:
    """sum_m c_m psi_{1-m,0,1} (modified wavelets for rescaled states)."""
    make = modified_wavelet if state.rescaled else kozyrev_wavelet
    total = None
    for m, c in enumerate(state.coeffs):
        if c == 0:
            continue
        term = make(state.p, WaveletIndex(1 - m)).scaled(complex(c))
        total = term if total is None else total + term
    if total is None:
        return SchwartzFunction(state.p, (), 0.5 if state.rescaled else 0.0)
    return total


def _shell_power_integral(p: int, r: int, a: float) -> float:
    """Integral of |x|^a dx over |x| <= p^r."""
    return ball_integral(Ball.make(p, 0, r), a).real


def kozyrev_gram_weighted(p: int, M: int, a: float) -> np.ndarray:
    """G[m, m'] = integral of psi_{1-m} psi_{1-m'} |x|^a dx, in closed form.

    psi_n = p^(-n/2) (1 on |x| <= p^(n-1), omega_1(x) on |x| = p^n), and
    the leading-digit phases sum to -1 over a shell.
    """
    G = np.zeros((M + 1, M + 1))
    for i in range(M + 1):
        for j in range(i, M + 1):
            n_big, n_small = 1 - i, 1 - j  # n_big >= n_small
            inner = _shell_power_integral(p, n_small - 1, a)
            shell = float(p) ** (n_small - 1) * float(p) ** (n_small * a)
            if i == j:
                val = p ** (-n_small) * (inner + (p - 1) * shell)
            else:
                val = p ** (-(n_big + n_small) / 2) * (inner - shell)
            G[i, j] = G[j, i] = val
    return G


@dataclass(frozen=True)
class InnerProductI:
    value: complex  # exact integral via assembled Schwartz functions
    gram_value: complex  # same integral via the closed-form wavelet Gram matrix
    diagonal_model: complex  # sum_m p^((k-1)(1-m)) conj(c_m) d_m

    @property
    def path_mismatch(self) -> float:
        return abs(self.value - self.gram_value) / max(1.0, abs(self.value))


def diagonal_model_I(f: PartonState, g: PartonState, k: int) -> complex:
    p = f.p
    return sum(
        p ** ((k - 1) * (1 - m)) * complex(a).conjugate() * complex(b)
        for m, (a, b) in enumerate(zip(f.coeffs, g.coeffs))
    )


def inner_product_I_paths(f: PartonState, g: PartonState, k: int) -> InnerProductI:
    _check_pair(f, g)
    if f.rescaled:
        raise ValueError("inner product I takes un-rescaled states")
    if k <= 1:
        raise DivergenceError("d^x x |x|^(k-1) is not integrable at 0 for k <= 1")
    a = k - 2  # |x|^(k-1) dx/|x|
    value = inner_product_L2(assemble(f), assemble(g), "multiplicative", k - 1)
    cf, cg = f.as_array(), g.as_array()
    gram_value = np.conj(cf) @ kozyrev_gram_weighted(f.p, f.M, a) @ cg
    return InnerProductI(complex(value), complex(gram_value), diagonal_model_I(f, g, k))


def inner_product_I(f: PartonState, g: PartonState, k: int) -> complex:
    """Exact integral of |x|^(k-1) conj(f) g d^x x for the assembled states."""
    return inner_product_I_paths(f, g, k).value


def inner_product_II(f: PartonState, g: PartonState, partial: bool = False):
    """sum_m conj(b_m) b'_m; with ``partial`` also the partial-sum sequence."""
    _check_pair(f, g)
    terms = np.conj(f.as_array()) * g.as_array()
    sums = np.cumsum(terms)
    return (complex(sums[-1]), sums) if partial else complex(sums[-1])


def interior_adjoint_mismatch(f: PartonState, g: PartonState, form: str, k: int = 1) -> float:
    """Relative gap in <lower f, g> = w <f, raise g> on the known window.

    ``form`` "II" uses the plain overlap and w = 1; "diagonal-I" uses the
    weights p^((k-1)(1-m)) and w = p^(k-1).  Entry M of ``lower f`` is
    unknown, so index M is excluded; that boundary is the only place the
    two sides can differ for infinite states.
    """
    if form == "II":
        weight, factor = (lambda m: 1.0), 1.0
    elif form == "diagonal-I":
        weight, factor = (lambda m: float(f.p) ** ((k - 1) * (1 - m))), float(f.p) ** (k - 1)
    else:
        raise ValueError(f"unknown form {form!r}")
    lf, rg, M = ladder(f, "lower"), ladder(g, "raise"), f.M
    lhs = sum(weight(m) * complex(lf[m]).conjugate() * complex(g[m]) for m in range(M))
    rhs = sum(weight(m) * complex(f[m]).conjugate() * complex(rg[m]) for m in range(1, M + 1))
    return abs(lhs - factor * rhs) / max(1.0, abs(lhs))


# --------------------------------------------------------------------------
# Mellin transforms of states


def parton_mellin(state: PartonState, s: complex, ell: int = 0) -> complex:
    """c_p(ell,s) sum_m c_m p^((1-m)(s-1/2)), or the modified analogue
    c_p(ell,s+1/2) sum_m b_m p^((1-m)s) for rescaled states."""
    p, s = state.p, complex(s)
    if state.rescaled:
        shift, pref = s, cp(p, ell, s, "modified")
    else:
        shift, pref = s - 0.5, cp(p, ell, s, "kozyrev")
    x = complex(p) ** shift
    total = 0j
    power = x  # p^((1-m) shift) at m = 0
    for c in state.coeffs:
        total += complex(c) * power
        power /= x
    return pref * total


def _converged_local_sum(stream: CoefficientStream, p: int, s: complex, ell: int,
                         tol: float = 1e-16, start: int = 8, max_M: int = 4096):
    M = start
    prev = parton_mellin(decompose(stream, p, M), s, ell)
    while M < max_M:
        M *= 2
        cur = parton_mellin(decompose(stream, p, M), s, ell)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur, M
        prev = cur
    raise ArithmeticError(f"local Mellin sum at p={p} did not settle by M={max_M}")


def finite_euler_mellin_check(
    stream: CoefficientStream, primes: Sequence[int], s: complex, ells: Mapping[int, int] | None = None
) -> float:
    """Relative gap between prod_p M[f_p](s) and prod_p c_p p^(s-1/2) L_p(s-1/2)."""
    s = complex(s)
    ells = ells or {}
    lhs, rhs = 1 + 0j, 1 + 0j
    for p in primes:
        ell = ells.get(p, 0)
        local, _ = _converged_local_sum(stream, p, s, ell)
        lhs *= local
        rhs *= cp(p, ell, s) * complex(p) ** (s - 0.5) * local_euler_factor(stream, p, s - 0.5)
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def parseval_check(
    f: PartonState, g: PartonState, variant: str = "II", quadrature_points: int = 256
) -> dict:
    """Mellin-side integral against the coefficient-side inner product.

    LHS = sum_ell (ln p / 2 pi) integral over a period of conj(M[f]) M[g] at
    Re s = sigma, sigma = (k-1)/2 for variant I and 0 for variant II, by
    the trapezoid rule with doubling.  RHS is the exact d^x x integral of
    |x|^(2 sigma) conj(f) g: inner_product_I for variant I and
    sum_m conj(b_m) b'_m for variant II.
    """
    _check_pair(f, g)
    p = f.p
    if variant == "I":
        if f.rescaled:
            raise ValueError("variant I takes un-rescaled states")
        k = f.weight
        sigma = (k - 1) / 2
        rhs = inner_product_I(f, g, k)
    elif variant == "II":
        if not f.rescaled:
            raise ValueError("variant II takes rescaled states")
        sigma = 0.0
        rhs = inner_product_II(f, g)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    period = 2 * math.pi / math.log(p)

    def lhs_at(n_pts: int) -> complex:
        total = 0j
        for j in range(n_pts):
            s = complex(sigma, period * j / n_pts)
            for ell in range(p):
                total += parton_mellin(f, s, ell).conjugate() * parton_mellin(g, s, ell)
        return total / n_pts

    n_pts = max(quadrature_points, 2 * f.M + 4)
    prev = lhs_at(n_pts)
    cur = lhs_at(2 * n_pts)
    scale = max(1.0, abs(rhs)) if variant == "I" else 1.0
    while abs(cur - prev) > 1e-12 * max(1.0, abs(cur)) and n_pts < 1 << 14:
        n_pts *= 2
        prev, cur = cur, lhs_at(2 * n_pts)
    return {
        "lhs": cur,
        "rhs": rhs,
        "residual": abs(cur - rhs) / scale,
        "quadrature_change": abs(cur - prev) / scale,
        "sigma": sigma,
    }


# --------------------------------------------------------------------------
# orthogonality as a divergence dichotomy


@dataclass(frozen=True)
class DichotomyReport:
    p: int
    kind: str  # diagonal | off-diagonal | degenerate
    windows: tuple
    partial_sums: tuple  # inner product II truncated at each window
    growth_ratios: tuple  # |S(next window)| / |S(window)|
    max_partial: float  # max over every M <= the largest window of |S(M)|
    bound: float | None

    @property
    def holds(self) -> bool:
        if self.kind == "diagonal":
            return all(r >= 1.5 for r in self.growth_ratios[-2:])
        if self.kind == "off-diagonal":
            return self.max_partial <= self.bound * (1 + 1e-9)
        return True


def classify_pair(theta_f: float | None, theta_g: float | None, tol: float = 1e-12) -> str:
    """diagonal when a(p) agree, degenerate when nu(p) is 0 or +-1 for either."""
    if theta_f is None or theta_g is None:
        return "degenerate"
    if abs(math.sin(theta_f)) < tol or abs(math.sin(theta_g)) < tol:
        return "degenerate"
    if abs(math.cos(theta_f) - math.cos(theta_g)) < tol:
        return "diagonal"
    return "off-diagonal"


def off_diagonal_bound(theta_f: float, theta_g: float) -> float:
    """Bound on |sum_{m<=M} U_m(cos theta_f) U_m(cos theta_g)| uniform in M.

    The product of sines is half a difference of cosines, and partial sums
    of cos(j a) are bounded by 1/|sin(a/2)|.
    """
    d = abs(math.sin((theta_f - theta_g) / 2))
    s = abs(math.sin((theta_f + theta_g) / 2))
    return 0.5 * (1 / d + 1 / s) / abs(math.sin(theta_f) * math.sin(theta_g))


def dichotomy_report(
    stream_f: CoefficientStream, stream_g: CoefficientStream, p: int,
    theta_f: float | None, theta_g: float | None, windows: Sequence[int] = (50, 100, 200, 400, 800),
) -> DichotomyReport:
    """Partial sums of inner product II over doubling windows."""
    kind = classify_pair(theta_f, theta_g)
    top = max(windows)
    _, seq = inner_product_II(
        decompose(stream_f, p, top, rescaled=True), decompose(stream_g, p, top, rescaled=True),
        partial=True,
    )
    sums = tuple(complex(seq[M]) for M in windows)
    ratios = tuple(abs(b) / abs(a) if abs(a) > 0 else math.inf for a, b in zip(sums, sums[1:]))
    bound = off_diagonal_bound(theta_f, theta_g) if kind == "off-diagonal" else None
    return DichotomyReport(p, kind, tuple(windows), sums, ratios, float(np.max(np.abs(seq))), bound)


def mellin_roundtrip_state(state: PartonState, x, sigma: float | None = None) -> complex:
    """Inverse Mellin of parton_mellin evaluated at x (consistency helper)."""
    if sigma is None:
        sigma = 0.0 if state.rescaled else 1.0
    return inverse_mellin(lambda ell, s: parton_mellin(state, s, ell), x, state.p, 64, sigma)
