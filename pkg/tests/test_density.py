import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shimsign.arith import mobius_table
from shimsign.characters import character_group, principal
from shimsign.density import (
    SignFunction,
    d_independence_check,
    dedekind_dirichlet_estimate,
    delange_partial_sums,
    identity_1q_diagnostic,
    progression_sign_counts,
    multiplicativity_check,
    progression_units,
    scatter_rows,
    sign_f,
)
from shimsign.shimura import invert_lift, synth_hecke_form


def constant_sign(X, N=1, value=1):
    table = np.full(X + 1, value, dtype=np.int8)
    n = np.arange(X + 1)
    table[np.gcd(n, N) != 1] = 0
    table[0] = 0
    return SignFunction(table, N, 1)


@pytest.fixture(scope="module")
def delta_f(delta_preimage):
    return SignFunction.from_values(delta_preimage, 4, principal(4))


def test_sign_f_basics(delta_preimage):
    assert sign_f(2, delta_preimage, 4) == 0
    assert sign_f(1, delta_preimage, 4) == 1
    assert sign_f(3, delta_preimage, 4) == 1  # a(9) = 9
    with pytest.raises(IndexError):
        sign_f(10**7, delta_preimage, 4)


def test_delta_sign_function_multiplicative(delta_f):
    report = multiplicativity_check(delta_f, 1000, 10_000, seed=1)
    assert report.ok and report.checked == 1000


@pytest.mark.parametrize("seed", range(20))
def test_synthetic_sign_functions_multiplicative(seed):
    A = synth_hecke_form(3, seed, 5000, a_t=1 + seed % 3)
    chi = principal(4)
    f = SignFunction.from_values(invert_lift(A, 1, chi, 4, 3), 4, chi)
    assert multiplicativity_check(f, 1000, seed=seed).ok


def test_multiplicativity_violation_found():
    f = constant_sign(1000)
    f.table[6] = -1
    report = multiplicativity_check(f, 5000, seed=0)
    assert not report.ok and all(6 in (m, n, m * n) for m, n in report.violations)


def test_constant_f_counts():
    X, q = 10_000, 5
    f = constant_sign(X)
    for d in progression_units(q):
        r = progression_sign_counts(f, q, d, X)
        assert r.pos_ratio == 1 and r.negative == 0 and r.zero == 0
        assert r.positive == len(range(d, X + 1, q))
        assert r.difference_quotient == Fraction(r.positive, X)
        assert abs(float(r.difference_quotient) - 1 / q) <= 1 / X


def test_rejects_nonunit_class():
    with pytest.raises(ValueError):
        progression_sign_counts(constant_sign(100), 4, 2)


sign_tables = st.lists(st.integers(-1, 1), min_size=50, max_size=400)


@settings(max_examples=100, deadline=None)
@given(sign_tables, st.sampled_from([1, 3, 4, 5, 8, 12]), st.sampled_from([1, 2, 4, 6]))
def test_count_conservation(values, q, N):
    table = np.array([0] + values, dtype=np.int8)
    f = SignFunction(table, N, 1)
    X = f.X
    total_nonzero = 0
    for d in progression_units(q):
        r = progression_sign_counts(f, q, d, X)
        units = [n for n in range(d, X + 1, q) if math.gcd(n, N) == 1]
        assert r.positive + r.negative + r.zero == len(units)
        assert r.positive == sum(1 for n in units if table[n] > 0)
        # (P - M)^2 + 4 P M = (P + M)^2
        assert r.difference_quotient**2 + 4 * Fraction(r.positive, X) * Fraction(r.negative, X) == r.sum_quotient**2
        total_nonzero += r.nonzero
    assert total_nonzero == sum(1 for n in range(1, X + 1) if math.gcd(n, q * N) == 1 and table[n] != 0)


def test_delta_progression_signs(delta_f):
    for d in (1, 2, 3, 4):
        r = progression_sign_counts(delta_f, 5, d, 100_000)
        assert 0.45 <= r.pos_ratio <= 0.55
        assert r.radius == pytest.approx(1 / math.sqrt(r.nonzero))


def brute_character_sum(f, eps, x):
    return abs(sum(f(n) * complex(eps(n)) for n in range(1, x + 1) if eps(n) != 0)) / x


def test_delange_matches_brute_force(delta_f):
    for eps in character_group(5):
        for pt in delange_partial_sums(delta_f, eps, [1000, 3000]):
            assert pt.value == pytest.approx(brute_character_sum(delta_f, eps, pt.x), abs=1e-12)


def test_delange_zero_function():
    f = constant_sign(1000, value=0)
    for eps in character_group(5):
        assert all(pt.value == 0 for pt in delange_partial_sums(f, eps, [10, 100, 1000]))


def test_delange_squarefree_control():
    X = 100_000
    table = (mobius_table(X) != 0).astype(np.int8)
    table[0] = 0
    f = SignFunction(table, 1, 1)
    value = delange_partial_sums(f, principal(5), [X])[0].value
    expected = 6 / math.pi**2 * (1 - 1 / 5) / (1 - 1 / 25)
    assert value >= 0.3 and value == pytest.approx(expected, abs=0.01)


def test_delange_small_on_delta(delta_f):
    for eps in character_group(5):
        assert delange_partial_sums(delta_f, eps, [100_000])[0].value <= 0.05


def test_dedekind_dirichlet_targets():
    X = 1_000_000
    n = np.arange(1, X + 1)
    (all_n,) = dedekind_dirichlet_estimate(np.ones(X, dtype=bool), [0.01], X)
    (even,) = dedekind_dirichlet_estimate(lambda m: m % 2 == 0, [0.01], X)
    assert abs(all_n.estimate - 1) <= all_n.tail_bound
    assert abs(even.estimate - 0.5) <= even.tail_bound
    assert all_n.tail_bound == pytest.approx(X**-0.01)
    # the bound is loose at this delta; the density-corrected value is the sharp check
    assert abs(all_n.corrected - 1) <= 0.01 and abs(even.corrected - 0.5) <= 0.01
    (empty,) = dedekind_dirichlet_estimate(n < 0, [0.01], X)
    assert empty.estimate == 0


def test_dedekind_dirichlet_tail_is_an_upper_bound():
    # delta * sum_{n > X} n^-(1 + delta) <= X^-delta for the all-n set
    X, delta = 10_000, 0.5
    (est,) = dedekind_dirichlet_estimate(np.ones(X, dtype=bool), [delta], X)
    zeta = 2.6123753486854883  # zeta(3/2)
    assert 0 <= delta * zeta - est.estimate <= est.tail_bound


def test_identity_1q_degenerate():
    f = constant_sign(1_000_000)
    r = identity_1q_diagnostic(f, 5, 2, 0.01)
    assert r.target == 0.2
    assert abs(r.estimate - 2 * 0.2) <= r.tail_bound
    with pytest.raises(ValueError):
        identity_1q_diagnostic(SignFunction(np.zeros(10, dtype=np.int8), 4, 1), 6, 1, 0.1)


def test_d_independence():
    X = 10_000
    f = constant_sign(X)
    report = d_independence_check(f, 7, X)
    assert report["max_deviation"] <= 1 / X
    assert d_independence_check(f, 1, X)["max_deviation"] == 0


def test_d_independence_delta(delta_f):
    assert d_independence_check(delta_f, 5, 100_000)["max_deviation"] <= 0.05


def test_scatter_rows(delta_preimage):
    rows = list(scatter_rows(delta_preimage, 1, principal(4), 4, 10))
    assert [r[0] for r in rows] == [1, 3, 5, 7, 9]
    assert rows[1][:4] == (3, 9, 9.0, 0.0)
    assert all(r[4] == "0/1" for r in rows)
    assert cmath.isclose(rows[0][2], 1)
