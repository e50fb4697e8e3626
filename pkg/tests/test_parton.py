import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from partons.coeffs import (
    chebyshev_u,
    custom_stream,
    product_dirichlet_stream,
    ramanujan_tau_table,
    tau_stream,
)
from partons.dirichlet import argument_at, character, characters_mod
from partons.parton import (
    PartonState,
    QSeries,
    TruncationError,
    assemble,
    atom_state,
    classify_pair,
    decompose,
    dichotomy_report,
    finite_euler_mellin_check,
    hecke_apply,
    hecke_qseries_residual,
    inner_product_I,
    inner_product_I_paths,
    inner_product_II,
    interior_adjoint_mismatch,
    ladder,
    local_states,
    parseval_check,
    parton_mellin,
    reconstruct,
    uv_on_qseries,
    vacuum_state,
    zero_state,
)
from partons.pmellin import cp, mellin_transform
from partons.wavelets import DivergenceError

TAU = tau_stream()


def test_decompose_tau():
    state = decompose(TAU, 2, 3)
    assert state.coeffs == (1, -24, -1472, (-24) * (-1472) - 2**11 * (-24))


def test_decompose_trivial_stream():
    trivial = custom_stream(1, {3: 0}, {3: 0})
    assert decompose(trivial, 3, 4).coeffs == (1, 0, 0, 0, 0)


@pytest.mark.parametrize("label", ["5:1", "5:2", "7:1", "7:3"])
def test_product_state_is_chebyshev(label):
    N, i = map(int, label.split(":"))
    nu = character(N, i)
    stream = product_dirichlet_stream(nu)
    for p in (2, 3, 11, 13):
        if N % p == 0:
            continue
        xi = math.cos(argument_at(nu, p))
        state = decompose(stream, p, 12)
        assert max(abs(complex(c) - chebyshev_u(m, xi)) for m, c in enumerate(state.coeffs)) < 1e-12


@pytest.mark.parametrize("p, M", [(2, 8), (3, 6), (13, 4)])
def test_state_is_truncated_atom(p, M):
    expected = atom_state(p, TAU.prime_power(p, 1), 1, 12, M)
    assert expected.coeffs == decompose(TAU, p, M).coeffs


def test_state_recursion_invariant():
    state = decompose(TAU, 3, 10)
    q = 3**11
    for m in range(1, 10):
        assert state[m + 1] == state[1] * state[m] - q * state[m - 1]


def test_reconstruct_examples():
    states = local_states(TAU, 100)
    assert reconstruct(states, 1) == 1
    assert reconstruct(states, 12) == (-1472) * 252
    with pytest.raises(TruncationError):
        reconstruct({2: decompose(TAU, 2, 3)}, 2**5)


def test_reconstruct_equals_stream_to_ten_thousand():
    table = ramanujan_tau_table(10_000)
    states = local_states(TAU, 10_000)
    assert all(reconstruct(states, n) == table[n - 1] for n in range(1, 10_001))


def test_ladder_examples():
    vac = vacuum_state(3, 5)
    assert all(c == 0 for c in ladder(vac, "lower").coeffs)
    s = PartonState(3, 4, (1, 2, 3, 4, 5))
    assert ladder(s, "raise").coeffs == (0, 1, 2, 3, 4)
    assert ladder(s, "raise").tail_lost == 5
    assert ladder(ladder(s, "raise"), "lower").coeffs[:4] == s.coeffs[:4]
    with pytest.raises(ValueError):
        ladder(s, "sideways")


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13])
def test_hecke_tau_variant_one(p):
    state = decompose(TAU, p, 10)
    out, residual = hecke_apply(state, "I")
    assert residual == 0  # exact integers
    assert out[0] == TAU(p)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13])
def test_hecke_tau_variant_two(p):
    _, residual = hecke_apply(decompose(TAU, p, 10, rescaled=True), "II")
    assert residual < 1e-10


@pytest.mark.parametrize("N", [5, 7])
def test_hecke_product_streams(N):
    for nu in characters_mod(N)[1:]:
        stream = product_dirichlet_stream(nu)
        for p in (2, 3, 5, 7, 11):
            for variant, rescaled in (("I", False), ("II", True)):
                state = decompose(stream, p, 10, rescaled)
                out, residual = hecke_apply(state, variant)
                assert residual < 1e-10
                assert abs(out[0] - stream(p)) < 1e-12


def test_hecke_zero_state_and_mismatch():
    out, residual = hecke_apply(zero_state(2, 5), "I")
    assert residual == 0 and all(c == 0 for c in out.coeffs)
    with pytest.raises(ValueError):
        hecke_apply(decompose(TAU, 2, 5), "II")


def test_u_after_v_is_identity_and_v_after_u_is_not():
    f = QSeries.from_stream(TAU, 60)
    uv = uv_on_qseries(uv_on_qseries(f, 3, "V"), 3, "U")
    n = uv.truncation
    assert n > 0 and all(uv[j] == f[j] for j in range(1, n + 1))
    vu = uv_on_qseries(uv_on_qseries(f, 3, "U"), 3, "V")
    assert vu[1] == 0 and f[1] == 1
    assert vu[6] == f[6]


def test_t_on_tau_series_is_eigen():
    f = QSeries.from_stream(TAU, 200)
    t = uv_on_qseries(f, 2, "T", 12, 1)
    assert all(t[n] == -24 * f[n] for n in range(1, t.truncation + 1))


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13])
def test_hecke_matches_qseries_oracle(p):
    assert hecke_qseries_residual(TAU, p, 2000) < 1e-10


@pytest.mark.parametrize("label", ["5:1", "5:2", "7:1", "7:2"])
def test_hecke_matches_qseries_oracle_product(label):
    N, i = map(int, label.split(":"))
    stream = product_dirichlet_stream(character(N, i))
    for p in (2, 3, 7):
        assert hecke_qseries_residual(stream, p, 2000) < 1e-10


def test_inner_product_single_ball():
    p, k = 3, 12
    vac = vacuum_state(p, 4)
    value = inner_product_I(vac, vac, k)
    exact = p ** (k - 2) * (1 - 1 / p) / (1 - p ** (-(k - 1)))
    assert value == pytest.approx(exact, rel=1e-13)
    # the formal weight is one power of p larger
    paths = inner_product_I_paths(vac, vac, k)
    assert paths.diagonal_model == pytest.approx(p ** (k - 1))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_inner_product_paths_agree(p):
    f = decompose(TAU, p, 5)
    g = decompose(custom_stream(12, {p: 3.0 + 1j}), p, 5)
    paths = inner_product_I_paths(f, g, 12)
    assert paths.path_mismatch < 1e-12


def test_inner_product_divergence():
    with pytest.raises(DivergenceError):
        inner_product_I(vacuum_state(2, 3), vacuum_state(2, 3), 1)


def test_cross_terms_of_orthogonal_components_vanish():
    a = PartonState(5, 3, (0, 1, 0, 0), weight=12)
    b = PartonState(5, 3, (0, 0, 0, 1), weight=12)
    assert abs(inner_product_II(a, b)) == 0


@given(st.lists(st.complex_numbers(max_magnitude=10), min_size=9, max_size=9),
       st.lists(st.complex_numbers(max_magnitude=10), min_size=9, max_size=9))
def test_adjoint_relations_on_interior(cf, cg):
    f, g = PartonState(3, 8, tuple(cf)), PartonState(3, 8, tuple(cg))
    assert interior_adjoint_mismatch(f, g, "II") < 1e-12
    assert interior_adjoint_mismatch(f, g, "diagonal-I", k=4) < 1e-12


def test_inner_product_two_partial_sums():
    f = decompose(TAU, 2, 6, rescaled=True)
    total, seq = inner_product_II(f, f, partial=True)
    assert len(seq) == 7 and seq[-1] == total


def test_parton_mellin_trivial_state():
    s = 2.3 + 0.4j
    for ell in range(3):
        assert parton_mellin(vacuum_state(3, 5), s, ell) == pytest.approx(cp(3, ell, s) * 3 ** (s - 0.5))


@pytest.mark.parametrize("rescaled", [False, True])
def test_parton_mellin_matches_ball_sum(rescaled):
    state = decompose(TAU, 2, 6, rescaled)
    s = 7.5 + 1.1j if not rescaled else 0.3 + 1.1j
    for ell in range(2):
        exact = mellin_transform(assemble(state), s, ell)
        assert abs(parton_mellin(state, s, ell) - exact) < 1e-10 * max(1, abs(exact))


def test_parton_mellin_linear():
    f, g = decompose(TAU, 3, 4), decompose(custom_stream(12, {3: 2.0}), 3, 4)
    s = 3.0 + 0.2j
    assert parton_mellin(f + g.scaled(2j), s, 1) == pytest.approx(
        parton_mellin(f, s, 1) + 2j * parton_mellin(g, s, 1))


def test_finite_euler_examples():
    assert finite_euler_mellin_check(TAU, [2, 3], 8.0) < 1e-9
    trivial = custom_stream(1, {2: 0}, {2: 0})
    assert finite_euler_mellin_check(trivial, [2], 3.0) < 1e-15
    stream = product_dirichlet_stream(character(5, 1))
    assert finite_euler_mellin_check(stream, [2, 3, 7], 3.0, {2: 1, 3: 0, 7: 6}) < 1e-9


def test_parseval_tau_variant_two():
    f = decompose(TAU, 2, 10, rescaled=True)
    assert parseval_check(f, f, "II")["residual"] < 1e-8


def test_parseval_tau_variant_one():
    f = decompose(TAU, 2, 10)
    assert parseval_check(f, f, "I")["residual"] < 1e-8


def test_parseval_product_pair():
    f = decompose(product_dirichlet_stream(character(5, 1)), 2, 40, rescaled=True)
    g = decompose(product_dirichlet_stream(character(5, 2)), 2, 40, rescaled=True)
    assert parseval_check(f, g, "II")["residual"] < 1e-8
    assert parseval_check(f, f, "II")["residual"] < 1e-8


def test_parseval_zero_state():
    z = zero_state(3, 6, rescaled=True)
    g = decompose(TAU, 3, 6, rescaled=True)
    out = parseval_check(z, g, "II")
    assert out["lhs"] == 0 and out["rhs"] == 0


def test_json_round_trip():
    state = decompose(product_dirichlet_stream(character(7, 1)), 2, 5, rescaled=True)
    back = PartonState.from_json(state.to_json())
    assert np.allclose(back.as_array(), state.as_array()) and back.rescaled


def _streams(N, labels):
    return {i: product_dirichlet_stream(character(N, i)) for i in labels}


def test_dichotomy_diagonal_grows():
    nu = character(7, 1)
    s = product_dirichlet_stream(nu)
    rep = dichotomy_report(s, s, 2, argument_at(nu, 2), argument_at(nu, 2))
    assert rep.kind == "diagonal" and rep.holds
    assert rep.growth_ratios[-1] == pytest.approx(2, rel=0.05)


@pytest.mark.parametrize("pair", [(1, 2), (1, 4), (2, 5)])
@pytest.mark.parametrize("p", [3, 5])
def test_dichotomy_off_diagonal_bounded(pair, p):
    a, b = (character(7, i) for i in pair)
    sa, sb = product_dirichlet_stream(a), product_dirichlet_stream(b)
    rep = dichotomy_report(sa, sb, p, argument_at(a, p), argument_at(b, p))
    assert rep.kind == "off-diagonal"
    assert rep.holds


def test_classify_pair_degenerate():
    assert classify_pair(0.0, 1.0) == "degenerate"
    assert classify_pair(None, 1.0) == "degenerate"
    assert classify_pair(1.0, -1.0) == "diagonal"
