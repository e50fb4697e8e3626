import math
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from partons.padic import Ball
from partons.wavelets import (
    DivergenceError,
    SchwartzFunction,
    WaveletIndex,
    gamma_p,
    gram_matrix,
    inner_product_L2,
    integrate,
    kozyrev_wavelet,
    log_vladimirov_at,
    modified_wavelet,
    sample_points,
    vladimirov_apply,
    vladimirov_at,
    vladimirov_eigencheck,
    wavelet_window,
)


def test_kozyrev_values():
    assert kozyrev_wavelet(2, WaveletIndex(0, 0, 1))(1) == pytest.approx(-1)
    assert kozyrev_wavelet(3, WaveletIndex(1, 0, 1))(0) == pytest.approx(3**-0.5)
    psi = kozyrev_wavelet(5, WaveletIndex(2, Fraction(1, 5), 3))
    assert psi(Fraction(1, 5**4)) == 0  # |p^n x - m| > 1


def test_phase_index_range():
    with pytest.raises(ValueError):
        kozyrev_wavelet(3, WaveletIndex(0, 0, 3))
    with pytest.raises(ValueError):
        kozyrev_wavelet(3, WaveletIndex(0, 0, 0))


def test_modified_wavelet_values():
    mod = modified_wavelet(2, WaveletIndex(0, 0, 1))
    plain = kozyrev_wavelet(2, WaveletIndex(0, 0, 1))
    assert mod(1) == pytest.approx(-1)
    assert mod(2) == pytest.approx(plain(2) / math.sqrt(2))
    assert mod(0) == 0


@pytest.mark.parametrize(
    "f, measure, w, expected",
    [
        (SchwartzFunction.indicator(Ball.make(2, 0, 0)), "additive", 0.0, 1.0),
        (SchwartzFunction.indicator(Ball.make(2, 0, 0)), "additive", 1.0, 2 / 3),
        (SchwartzFunction.indicator(Ball.make(3, Fraction(1, 3), -1)), "additive", 0.0, 1 / 3),
    ],
)
def test_integrate_examples(f, measure, w, expected):
    assert integrate(f, measure, w) == pytest.approx(expected, abs=1e-15)


def test_local_zeta_at_two():
    unit = SchwartzFunction.indicator(Ball.make(2, 0, 0))
    assert 2 * integrate(unit, "additive", 1.0) == pytest.approx(4 / 3, abs=1e-15)


def test_divergent_shell_sum_is_reported():
    unit = SchwartzFunction.indicator(Ball.make(3, 0, 0))
    with pytest.raises(DivergenceError):
        integrate(unit, "multiplicative", 0.0)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
@pytest.mark.parametrize("n", [-2, 0, 3])
def test_wavelet_mean_zero(p, n):
    # one piece carries p^(n/2) of mass, so roundoff scales with it
    assert abs(integrate(kozyrev_wavelet(p, WaveletIndex(n, Fraction(1, p), 1)))) < 1e-15 * max(1, p ** (n / 2))


def test_inner_product_examples():
    a, b = kozyrev_wavelet(3, 0), kozyrev_wavelet(3, 1)
    assert inner_product_L2(a, a) == pytest.approx(1)
    assert abs(inner_product_L2(a, b)) < 1e-15
    for n in range(-2, 3):
        for k in range(-2, 3):
            val = inner_product_L2(modified_wavelet(3, n), modified_wavelet(3, k), "multiplicative")
            assert val == pytest.approx(float(n == k), abs=1e-14)


def test_inner_product_conjugate_linear():
    a, b = kozyrev_wavelet(5, WaveletIndex(1, 0, 2)), kozyrev_wavelet(5, WaveletIndex(0, 0, 1))
    f = a + b.scaled(0.5j)
    assert inner_product_L2(f.scaled(2j), a) == pytest.approx(-2j * inner_product_L2(f, a))


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_gram_identity(p):
    idx = wavelet_window(p, range(-3, 4))
    start = time.perf_counter()
    G = gram_matrix([kozyrev_wavelet(p, i) for i in idx])
    assert np.max(np.abs(G - np.eye(len(idx)))) < 1e-12
    assert time.perf_counter() - start < 10


@given(st.sampled_from([2, 3, 5]), st.integers(-3, 3), st.integers(0, 8), st.integers(1, 3))
def test_refinement_preserves_integrals(p, n, k, levels):
    psi = kozyrev_wavelet(p, WaveletIndex(n, Fraction(k % p, p), 1))
    f = psi + SchwartzFunction.indicator(Ball.make(p, 0, n), 0.25)
    fine = f.refine(levels)
    # summation error grows with the piece count and the absolute mass
    mass = SchwartzFunction(p, tuple((b, abs(c)) for b, c in fine.pieces))
    for measure, w in (("additive", 0.0), ("additive", 0.5)):
        base = integrate(f, measure, w)
        tol = 4 * np.finfo(float).eps * len(fine.pieces) * abs(integrate(mass, measure, w))
        assert abs(integrate(fine, measure, w) - base) <= max(tol, 1e-15)
    for x in sample_points(f):
        assert f.refine(levels)(x) == pytest.approx(f(x))


def test_json_round_trip():
    f = kozyrev_wavelet(3, WaveletIndex(1, Fraction(2, 3), 2))
    g = SchwartzFunction.from_json(f.to_json())
    assert g.prime == f.prime and len(g.pieces) == len(f.pieces)
    for x in sample_points(f):
        assert g(x) == pytest.approx(f(x))


def _shell_sum_oracle(alpha, p, shells):
    # shells |x| = p^k for k <= 0 give (1 - 1/p) p^(-alpha k); |x| = p gives -p^(-alpha-1)
    inner = sum((1 - 1 / p) * complex(p) ** (-alpha * k) for k in range(-shells, 1))
    return inner - complex(p) ** (-alpha - 1)


@pytest.mark.parametrize("p, alpha", [(2, -2.0), (2, -2 + 1j), (3, -1.0), (5, -0.5)])
def test_gamma_p_shell_sum(p, alpha):
    assert abs(gamma_p(alpha, p) - _shell_sum_oracle(alpha, p, 80)) < 1e-12
    assert abs(_shell_sum_oracle(alpha, p, 160) - _shell_sum_oracle(alpha, p, 80)) < 1e-14


def test_gamma_p_divergence():
    with pytest.raises(DivergenceError):
        gamma_p(1.0, 3)
    assert gamma_p(1.0, 3, continuation=True) == pytest.approx((1 - 1 / 3) / (1 - 3) - 3**-2)


@pytest.mark.parametrize(
    "p, n, alpha, tol",
    [(2, 1, 1.0, 1e-10), (3, 0, 2.0, 1e-10), (5, 0, 0.5, 1e-8), (2, -2, 2.0, 1e-8)],
)
def test_vladimirov_examples(p, n, alpha, tol):
    assert vladimirov_eigencheck(p, n, alpha) < tol * max(1.0, p ** (alpha * (1 - n)))


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_vladimirov_grid(p, alpha):
    for n in range(-2, 3):
        assert vladimirov_eigencheck(p, n, alpha) < 1e-8


def test_vladimirov_zero_and_truncated_tail():
    assert vladimirov_apply(SchwartzFunction.zero(3), 1.0).pieces == ()
    f = SchwartzFunction.indicator(Ball.make(3, 0, 0))
    exact = vladimirov_at(f, 1.0, 0)
    truncated = vladimirov_at(f, 1.0, 0, tail_policy=60)
    assert abs(exact - truncated) < 1e-12


def test_vladimirov_apply_matches_eigenvalue():
    psi = kozyrev_wavelet(3, WaveletIndex(0, 0, 1))
    out = vladimirov_apply(psi, 2.0)
    for b, v in out.pieces:
        assert v == pytest.approx(9 * psi(b.center))


@pytest.mark.parametrize("p, n", [(2, 0), (3, 2), (5, -1)])
def test_log_derivative_limit(p, n):
    psi = kozyrev_wavelet(p, WaveletIndex(n))
    for x in sample_points(psi, exterior=False):
        assert abs(log_vladimirov_at(psi, x) - (1 - n) * psi(x)) < 1e-4
