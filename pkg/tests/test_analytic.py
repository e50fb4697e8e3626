import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from partons.analytic import (
    AbscissaError,
    bessel_k0,
    bessel_k0_asymptotic,
    bessel_k0_series,
    dirichlet_l,
    euler_tail_bound,
    k0_mellin_closed_form,
    k0_mellin_quadrature,
    l_from_theta_mellin,
    local_chebyshev_factor_series,
    local_factor,
    maass_fourier_mode,
    maass_norm_divergence_probe,
    maass_terms,
    maass_waveform,
    product_l,
    product_l_bessel_check,
    theta_convolution_weight_residual,
    theta_s_transform_residual,
    theta_series,
    time_average_inner_product,
    time_average_trend,
    two_sided_exponential_integral,
    zeta_p_integral_check,
)
from partons.dirichlet import argument_at, character, characters_mod, is_primitive, parity_epsilon

QUAD5 = character(5, 2)  # the quadratic character mod 5 (even)
ODD5 = character(5, 1)  # order four, odd
PRIMITIVE = [nu for N in (5, 7) for nu in characters_mod(N) if is_primitive(nu)]


@pytest.mark.parametrize("index", [1, 2, 3])
def test_dirichlet_series_and_euler_agree(index):
    nu = character(5, index)
    a = dirichlet_l(2, nu, "series", n_terms=10**6)
    short = dirichlet_l(2, nu, "euler", prime_limit=10**5)
    # primes below 1e5 leave an uncancelled tail near 1e-9, inside the bound
    assert abs(a - short) < euler_tail_bound(2, 10**5) * abs(short)
    assert abs(a - dirichlet_l(2, nu, "euler", prime_limit=10**6)) < 1e-9


def test_trivial_character_gives_zeta_two():
    trivial = characters_mod(1)[0]
    # independent series for zeta(2): the fast-converging 3 sum 1/(n^2 C(2n,n))
    zeta2 = 3 * sum(1 / (n * n * math.comb(2 * n, n)) for n in range(1, 40))
    assert abs(dirichlet_l(2, trivial) - zeta2) < 1e-8
    assert abs(zeta2 - math.pi**2 / 6) < 1e-15


def test_single_local_factor():
    nu = character(5, 1)
    assert local_factor(2, nu, 2) == pytest.approx(1 / (1 - nu(2) / 4))


def test_abscissa_violation():
    with pytest.raises(AbscissaError):
        dirichlet_l(0.9, ODD5)
    with pytest.raises(AbscissaError):
        product_l(1.0, ODD5)


@pytest.mark.parametrize("p, s, value", [(2, 2, 4 / 3), (7, 1, 7 / 6), (3, 2.5, None), (5, 1.5 + 2j, None)])
def test_zeta_p_integral(p, s, value):
    out = zeta_p_integral_check(p, s)
    assert out["residual"] < 1e-14
    assert abs(out["multiplicative"] - out["additive"]) < 1e-14
    if value is not None:
        assert out["exact"] == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("s", [2, 3, 2.5])
@pytest.mark.parametrize("index", [1, 2, 3])
def test_product_l_three_routes(s, index):
    nu = character(5, index)
    direct = product_l(s, nu, "direct")
    series = product_l(s, nu, "series")
    euler = product_l(s, nu, "euler")
    assert abs(direct - series) < 1e-8 and abs(direct - euler) < 1e-8


def test_product_l_general_mode_reduces():
    nu = character(7, 1)
    assert abs(product_l(2.5, nu, "general") - product_l(2.5, nu, "euler")) < 1e-14


def test_product_l_symmetric_and_principal_rejected():
    nu = character(5, 1)
    assert product_l(2, nu) == pytest.approx(product_l(2, nu.conjugate()), rel=1e-14)
    with pytest.raises(ValueError):
        product_l(2, character(5, 0))


@pytest.mark.parametrize("p", [2, 3, 7, 11])
def test_local_chebyshev_generating_function(p):
    theta = argument_at(ODD5, p)
    x = p**-2
    closed = 1 / (1 - 2 * math.cos(theta) * x + x * x)
    assert abs(local_chebyshev_factor_series(theta, p, 2) - closed) < 1e-12


def test_theta_direct_summation():
    y, N = 1.0, 5
    direct = 2 * sum(QUAD5(n) * math.exp(-math.pi * n * n * y / N) for n in range(1, 26))
    assert abs(theta_series(y, QUAD5) - direct) < 1e-15


def test_theta_parity_and_errors():
    assert parity_epsilon(ODD5) == 1 and parity_epsilon(QUAD5) == 0
    with pytest.raises(ValueError):
        theta_series(0, QUAD5)
    with pytest.raises(ValueError):
        theta_series(1, character(5, 0))


@pytest.mark.parametrize("nu", [QUAD5, ODD5])
@pytest.mark.parametrize("y", [4.0, 8.0, 16.0])
def test_theta_decay(nu, y):
    eps = parity_epsilon(nu)
    lead = 2 * math.exp(-math.pi * y / nu.modulus)
    assert abs(theta_series(y, nu)) <= lead * (1 + 2**eps * math.exp(-3 * math.pi * y / 5) * 2)


@pytest.mark.parametrize("nu", PRIMITIVE, ids=str)
@pytest.mark.parametrize("y", [0.5, 1.0, 2.0])
def test_theta_s_transform(nu, y):
    assert theta_s_transform_residual(y, nu) < 1e-10


@given(st.floats(min_value=0.05, max_value=20))
def test_theta_s_transform_property(y):
    assert theta_s_transform_residual(y, ODD5) < 1e-10 * max(1, y**1.5)


@pytest.mark.parametrize("nu, s", [(QUAD5, 2), (ODD5, 3), (character(7, 1), 2.5), (character(7, 3), 2 + 1j)])
def test_l_from_theta(nu, s):
    assert abs(l_from_theta_mellin(s, nu) - dirichlet_l(s, nu)) < 1e-8


def test_bessel_asymptotic_at_twenty():
    value = bessel_k0(20.0)
    leading = math.sqrt(math.pi / 40) * math.exp(-20)
    assert abs(value - leading) / value < 1e-2  # leading term only
    assert abs(value - bessel_k0_asymptotic(20.0)) / value < 1e-6


@pytest.mark.parametrize("x", [0.01, 0.1, 0.5, 1.0, 2.0])
def test_bessel_small_argument_series(x):
    assert abs(bessel_k0(x) - bessel_k0_series(x)) < 1e-12 * bessel_k0(x)


def test_bessel_against_scipy():
    xs = np.geomspace(1e-3, 200, 80)
    assert np.max(np.abs(bessel_k0(xs) / special.k0(xs) - 1)) < 1e-12


def test_bessel_monotone_and_domain():
    vals = bessel_k0(np.linspace(0.05, 30, 200))
    assert np.all(np.diff(vals) < 0)
    with pytest.raises(ValueError):
        bessel_k0(0.0)


@pytest.mark.parametrize("a, b", [(1, 1), (0.3, 2.0), (5.0, 0.1)])
def test_two_sided_integral(a, b):
    assert abs(two_sided_exponential_integral(a, b) - 2 * special.k0(2 * math.sqrt(a * b))) < 1e-10


@pytest.mark.parametrize("n", range(1, 11))
def test_k0_mellin_per_term(n):
    c, mu = 2 * math.pi * n / 5, 2.0
    assert abs(k0_mellin_quadrature(c, mu) - k0_mellin_closed_form(c, mu)) < 1e-8


def test_product_l_bessel():
    assert product_l_bessel_check(2, QUAD5) < 1e-6
    assert product_l_bessel_check(3, ODD5) < 1e-6


def test_product_l_bessel_truncation_monotone():
    res = [product_l_bessel_check(2, QUAD5, n) for n in (1000, 2000, 4000, 8000)]
    assert all(b < a for a, b in zip(res, res[1:]))


@pytest.mark.parametrize("nu", [QUAD5, ODD5, character(7, 1)], ids=str)
@pytest.mark.parametrize("y", [0.4, 0.7, 1.0, 1.6, 2.5])
def test_convolution_weight(nu, y):
    out = theta_convolution_weight_residual(y, nu)
    assert out["residual"] < 1e-6 and out["pointwise"] < 1e-10


def test_maass_waveform_value_and_tail():
    value, tail = maass_waveform(0, 1, QUAD5, 50, with_tail=True)
    assert math.isfinite(value.real) and tail < 1e-12
    direct = sum(maass_terms(1, QUAD5, 50))
    assert abs(value - direct) < 1e-14


@given(st.floats(min_value=-10, max_value=10), st.floats(min_value=0.2, max_value=3))
def test_maass_periodic(x, y):
    assert abs(maass_waveform(x, y, QUAD5) - maass_waveform(x + 5, y, QUAD5)) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 4, 9])
def test_maass_fourier_mode(n):
    amps = maass_terms(0.8, QUAD5, 50)
    assert abs(maass_fourier_mode(n, 0.8, QUAD5) - amps[n - 1]) < 1e-10


def test_maass_odd_behind_flag():
    with pytest.raises(ValueError):
        maass_waveform(0, 1, ODD5)
    assert math.isfinite(abs(maass_waveform(0, 1, ODD5, allow_odd=True)))


EPS = [2.0**-k for k in (4, 8, 12, 16, 20)]


@pytest.mark.parametrize("m, n", [(1, 1), (1, 2), (2, 2)])
def test_maass_norm_probe_growth(m, n):
    probe = maass_norm_divergence_probe(m, n, EPS)
    inc = probe.increments
    # the integral diverges, with increments per cutoff step growing like L^2
    assert all(b > a > 0 for a, b in zip(inc, inc[1:]))
    model_inc = np.diff(probe.model)
    assert abs(inc[-1] / model_inc[-1] - 1) < 1e-8
    # the remainder against the cubic model settles
    drift = probe.remainder_drift
    assert all(b < a for a, b in zip(drift, drift[1:])) and drift[-1] < 1e-6


def test_maass_norm_probe_offset_is_linear_in_cutoff():
    one = maass_norm_divergence_probe(1, 1, EPS)
    two = maass_norm_divergence_probe(2, 2, EPS)
    offset = np.array(two.increments) - np.array(one.increments)
    # scaling y -> 2y shifts the log cutoff by ln 2, so the offset grows with L
    assert np.all(np.diff(offset) < 0)
    steps = np.diff(offset)
    assert steps[-1] == pytest.approx(steps[-2], rel=0.05)


@pytest.mark.parametrize("pair", [(1, 2), (2, 3), (1, 3)])
def test_time_average_odd_imaginary_part(pair):
    f, g = (character(5, i) for i in pair)
    out = time_average_inner_product(f, g, 50)
    assert out.odd_part_residual < 1e-10 and out.status == "exploratory"


def test_time_average_diagonal_grows_with_terms():
    vals = [time_average_inner_product(QUAD5, QUAD5, 50, 4001, n).value.real for n in (50, 100, 200, 400)]
    assert vals[0] > 0 and all(b > a for a, b in zip(vals, vals[1:]))


def test_time_average_trend_report():
    trend = time_average_trend(character(5, 1), QUAD5, [10, 20, 40], n_terms=100)
    assert [t.T for t in trend] == [10, 20, 40]
    assert all(math.isfinite(abs(t.value)) for t in trend)
    with pytest.raises(ValueError):
        time_average_inner_product(QUAD5, QUAD5, 0)
