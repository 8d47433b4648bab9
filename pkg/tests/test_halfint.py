import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from shimsign.arith import kronecker, sieve_primes
from shimsign.characters import character_group, principal
from shimsign.cyclotomic import CyclotomicRational, RootOfUnity, to_exact
from shimsign.halfint import (
    CoefficientRangeError,
    FormError,
    HalfIntegralForm,
    LevelError,
    MalformedFormFile,
    SquarefreeError,
    VanishingCoefficientError,
    dumps_form,
    eigencheck,
    load_form,
    loads_form,
    reality_check,
    save_form,
    tpsq_coefficient,
)
from shimsign.shimura import invert_lift, synth_hecke_form

MINIMAL = """shimsign-form v1
level: 4
k: 6
character: 4:0
t: 1
truncation: 16
coefficients:
1 1
4 -56
9 120   # a comment
"""


def full_form(seed, T=400, level=4, k=3, character=None):
    rng = random.Random(seed)
    coeffs = {n: rng.randint(-50, 50) for n in range(1, T + 1)}
    coeffs[1] = 1
    return HalfIntegralForm(level, k, character or principal(level), 1, T, coeffs)


def synthetic_preimage(seed, k=3, M=1600, mode="integer-uniform"):
    A = synth_hecke_form(k, seed, M, mode)
    chi = principal(4)
    values = invert_lift(A, 1, chi, 4, k)
    return A, HalfIntegralForm.from_square_class(values, 1, 4, k, chi)


def test_minimal_file_loads():
    f = loads_form(MINIMAL)
    assert (f.level, f.k, f.t, f.truncation) == (4, 6, 1, 16)
    assert f.a(1) == 1 and f.a(4) == -56 and f.a(9) == 120 and f.a(2) == 0
    with pytest.raises(CoefficientRangeError):
        f.a(17)


def test_squarefree_violation():
    with pytest.raises(SquarefreeError):
        loads_form(MINIMAL.replace("t: 1", "t: 12"))


@pytest.mark.parametrize(
    "text, error",
    [
        (MINIMAL.replace("level: 4", "level: 6").replace("4:0", "6:0"), LevelError),
        (MINIMAL.replace("1 1\n", ""), VanishingCoefficientError),
        (MINIMAL.replace("shimsign-form v1", "form"), MalformedFormFile),
        (MINIMAL.replace("coefficients:", "coeffs"), MalformedFormFile),
        (MINIMAL.replace("9 120", "9 12x"), MalformedFormFile),
        (MINIMAL.replace("9 120", "4 120"), MalformedFormFile),
        (MINIMAL.replace("k: 6\n", ""), MalformedFormFile),
        (MINIMAL.replace("character: 4:0", "character: 8:0,0"), FormError),
        (MINIMAL.replace("9 120", "25 120"), CoefficientRangeError),
    ],
)
def test_invalid_files(text, error):
    with pytest.raises(error):
        loads_form(text)


def test_roundtrip_rational(tmp_path):
    f = full_form(1)
    f.coeffs[7] = Fraction(-3, 7)
    save_form(f, tmp_path / "f.form")
    assert load_form(tmp_path / "f.form") == f


def test_roundtrip_cyclotomic():
    group = character_group(20)
    chi = next(c for c in group if c.order == 4)
    i = CyclotomicRational.coerce(RootOfUnity(4, 1))
    coeffs = {1: 1, 4: i * 3 + 2, 9: Fraction(1, 2) * i, 16: -5}
    f = HalfIntegralForm(20, 2, chi, 1, 20, coeffs)
    assert loads_form(dumps_form(f)) == f


def test_value_outside_character_field_rejected():
    zeta3 = CyclotomicRational.coerce(RootOfUnity(3, 1))
    with pytest.raises(FormError):
        HalfIntegralForm(4, 2, principal(4), 1, 10, {1: 1, 2: zeta3})


def test_square_class_access():
    _, f = synthetic_preimage(0, M=20)
    assert f.a(4) == f.coeffs[4]
    with pytest.raises(LookupError):
        f.a(2)


def direct_tpsq(f, p, n):
    chi = f.chi
    total = f.a(p * p * n)
    total += to_exact(chi(p)) * kronecker((-1) ** f.k * n, p) * p ** (f.k - 1) * f.a(n)
    if n % (p * p) == 0:
        total += to_exact(chi(p * p)) * p ** (2 * f.k - 1) * f.a(n // (p * p))
    return total


def test_tpsq_term_structure():
    f = full_form(2, T=500, k=3)
    p = 3
    n = 7  # p does not divide n
    assert tpsq_coefficient(f, p, n) == f.a(63) + kronecker(-7, 3) * 9 * f.a(7)
    n = 6  # p | n, p^2 does not: middle symbol vanishes
    assert tpsq_coefficient(f, p, n) == f.a(54)
    n = 9
    assert tpsq_coefficient(f, p, n) == f.a(81) + 3**5 * f.a(1)
    for p in (3, 5, 7):
        for n in range(1, 500 // (p * p) + 1):
            assert tpsq_coefficient(f, p, n) == direct_tpsq(f, p, n)


def test_tpsq_rejects_level_primes_and_range():
    f = full_form(3, T=100)
    with pytest.raises(ValueError):
        tpsq_coefficient(f, 2, 1)
    with pytest.raises(CoefficientRangeError):
        tpsq_coefficient(f, 11, 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6), st.integers(-9, 9), st.integers(-9, 9))
def test_tpsq_linear(seed1, seed2, x, y):
    f, g = full_form(seed1, T=300), full_form(seed2, T=300)
    assume(x + y != 0)  # a(t) must not vanish
    combo = {n: x * f.a(n) + y * g.a(n) for n in range(1, 301)}
    h = HalfIntegralForm(4, f.k, f.character, 1, 300, combo)
    for p in (3, 5, 7, 11, 13, 17):
        for n in range(1, 300 // (p * p) + 1):
            assert tpsq_coefficient(h, p, n) == x * tpsq_coefficient(f, p, n) + y * tpsq_coefficient(g, p, n)


@pytest.mark.parametrize("seed", range(20))
def test_eigencheck_recovers_generator_eigenvalues(seed):
    mode = "integer-uniform" if seed % 2 else "sato-tate-rounded"
    A, f = synthetic_preimage(seed, mode=mode)
    primes = [p for p in sieve_primes(50) if p != 2]
    results = eigencheck(f, primes, 1000)
    for p in primes:
        assert results[p].ok, (seed, p, results[p])
        assert results[p].eigenvalue == A[p]


def test_eigencheck_locates_perturbation():
    A, f = synthetic_preimage(5, M=400)
    f.coeffs[9 * 25] += 1  # a(t * 15^2)
    result = eigencheck(f, [3], 1000)[3]
    assert not result.ok and result.witness == 25


def test_eigencheck_n_max_one():
    A, f = synthetic_preimage(6, M=40)
    result = eigencheck(f, [5], 1)[5]
    assert result.ok and result.eigenvalue == tpsq_coefficient(f, 5, 1)


def test_reality_trivial_character():
    assert reality_check(full_form(4)).ok


def test_reality_order_four_character():
    group = character_group(20)
    chi = next(c for c in group if c.order == 4)
    rng = random.Random(0)
    coeffs = {}
    for m in range(1, 31):
        v = chi(m)
        if v != 0:
            coeffs[m * m] = to_exact(v) * rng.randint(1, 9)
    f = HalfIntegralForm(20, 2, chi, 1, 900, coeffs)
    report = reality_check(f)
    assert report.ok and report.checked > 0
    coeffs[49] = coeffs[49] * CyclotomicRational.coerce(RootOfUnity(4, 1))
    bad = HalfIntegralForm(20, 2, chi, 1, 900, coeffs)
    assert reality_check(bad).violations == [7]
