import math
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import euler_product, tau_naive
from shimsign.arith import sieve_primes
from shimsign.qseries import (
    CacheError,
    QSeries,
    cache_path,
    cached_delta,
    dedekind_eta,
    delta,
    eta_quotient,
    mul,
    naive_mul,
    pow_series,
    read_cache,
    tau_table,
    theta,
    write_cache,
)


def test_identity_and_difference_of_squares():
    A = QSeries.from_coeffs([3, -1, 4, 1, -5], 4)
    assert A * QSeries.one(4) == A
    assert QSeries.from_coeffs([1, -1], 4) * QSeries.from_coeffs([1, 1], 4) == QSeries.from_coeffs([1, 0, -1], 4)


def test_powers():
    A = QSeries.from_coeffs([1, 2, -3, 0, 7], 4)
    assert pow_series(A, 1) == A
    assert pow_series(A, 2) == mul(A, A)
    with pytest.raises(ValueError):
        pow_series(A, 0)


def test_truncation_mismatch_rejected():
    with pytest.raises(ValueError):
        mul(QSeries.one(3), QSeries.one(4))


def test_eta_examples():
    eta = dedekind_eta(1, 10)
    assert list(eta.coeffs) == [1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0]
    assert list(eta.coeffs) == euler_product(10)
    eta2 = dedekind_eta(2, 10)
    assert list(eta2.coeffs) == [c if i % 2 == 0 else 0 for i, c in enumerate([euler_product(5)[i // 2] for i in range(11)])]
    assert dedekind_eta(24, 10).offset24 == 24
    assert dedekind_eta(24, 10).exponent_shift() == 1
    with pytest.raises(ValueError):
        dedekind_eta(1, 10).exponent_shift()


def test_eta_pentagonal_sparsity():
    T = 5000
    pentagonal = {}
    k = 0
    while k * (3 * k - 1) // 2 <= T or k * (3 * k + 1) // 2 <= T:
        for e in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if e <= T:
                pentagonal[e] = (-1) ** k
        k += 1
    coeffs = dedekind_eta(1, T).coeffs
    assert {i: c for i, c in enumerate(coeffs) if c} == pentagonal


def test_theta():
    th = theta(10)
    assert list(th.coeffs) == [1, 2, 0, 0, 2, 0, 0, 0, 0, 2, 0]
    assert th[5] == 0 and theta(20)[16] == 2


def test_eta_quotient_matches_product():
    T = 200
    q = eta_quotient({1: 2, 2: 3}, T)
    manual = naive_mul(naive_mul(dedekind_eta(1, T), dedekind_eta(1, T)), pow_series(dedekind_eta(2, T), 3))
    assert q == manual and q.offset24 == 8


def test_delta_against_naive_oracle():
    start = time.perf_counter()
    series = delta(10)
    elapsed = time.perf_counter() - start
    assert series.table() == tau_naive(11)
    assert series.table()[1:6] == [1, -24, 252, -1472, 4830]
    assert elapsed < 1.0


def test_tau_table_against_naive_at_300():
    assert tau_table(300) == tau_naive(300)


def test_tau6():
    tau = tau_table(6)
    assert tau[6] == tau[2] * tau[3]


series_st = st.lists(st.integers(-10**6, 10**6), min_size=65, max_size=65)


@settings(max_examples=100, deadline=None)
@given(series_st, series_st, series_st)
def test_mul_commutative_associative(a, b, c):
    A, B, C = (QSeries.from_coeffs(x) for x in (a, b, c))
    assert mul(A, B) == mul(B, A)
    assert mul(mul(A, B), C) == mul(A, mul(B, C))


@settings(max_examples=40, deadline=None)
@given(st.integers(65, 400), st.integers(0, 2**40), st.data())
def test_kronecker_product_matches_naive(T, bound, data):
    a = data.draw(st.lists(st.integers(-bound, bound), min_size=T + 1, max_size=T + 1))
    b = data.draw(st.lists(st.integers(-bound, bound), min_size=T + 1, max_size=T + 1))
    A, B = QSeries.from_coeffs(a), QSeries.from_coeffs(b)
    assert mul(A, B) == naive_mul(A, B)


def test_tau_multiplicative(tau):
    for m in range(1, 101):
        for n in range(1, 10_000 // m + 1):
            if math.gcd(m, n) == 1:
                assert tau[m * n] == tau[m] * tau[n]


def test_tau_prime_squares(tau):
    for p in sieve_primes(100):
        assert tau[p * p] == tau[p] ** 2 - p**11


def test_deligne_bound(tau):
    # |tau(p)| <= 2 p^(11/2), squared to stay exact
    for p in sieve_primes(100_000):
        assert tau[p] ** 2 <= 4 * p**11


def test_cache_roundtrip(tmp_path):
    s = delta(500)
    path = cache_path(tmp_path, "delta", {})
    write_cache(path, s, "delta", {})
    back, meta = read_cache(path)
    assert back == s and meta["truncation"] == 500 and meta["constructor"] == "delta"


def test_cache_detects_corruption(tmp_path):
    path = cache_path(tmp_path, "delta", {})
    write_cache(path, delta(50), "delta", {})
    lines = path.read_text().splitlines()
    lines[-1] = str(int(lines[-1]) + 1)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CacheError):
        read_cache(path)


def test_cached_delta_reuses_and_rebuilds(tmp_path):
    assert cached_delta(tmp_path, 100) == delta(100)
    assert cached_delta(tmp_path, 40) == delta(40)
    assert cached_delta(tmp_path, 300) == delta(300)
    _, meta = read_cache(cache_path(tmp_path, "delta", {}))
    assert meta["truncation"] == 300
