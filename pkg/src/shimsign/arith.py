"""Integer kernel: primes, factorization, Moebius, Euler phi, divisors, Kronecker symbol."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

TRIAL_DIVISION_LIMIT = 10**6


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)

    def value(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: tuple[int, ...]

    def __iter__(self):
        return iter(self.primes)

    def __len__(self):
        return len(self.primes)

    def __contains__(self, n):
        i = _bisect(self.primes, n)
        return i < len(self.primes) and self.primes[i] == n

    def pi(self, x: float) -> int:
        """Number of primes <= x (x must not exceed the table limit)."""
        if x > self.limit:
            raise ValueError(f"x={x} exceeds table limit {self.limit}")
        return _bisect(self.primes, math.floor(x) + 1)


def _bisect(seq, x):
    lo, hi = 0, len(seq)
    while lo < hi:
        mid = (lo + hi) // 2
        if seq[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


def sieve_mask(limit: int) -> np.ndarray:
    """Boolean array ``m`` of length ``limit + 1`` with ``m[n]`` true iff n is prime."""
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return mask


def sieve_primes(limit: int) -> PrimeTable:
    if limit < 2:
        raise ValueError(f"no primes below limit={limit}; need limit >= 2")
    primes = np.flatnonzero(sieve_mask(limit))
    return PrimeTable(limit, tuple(int(p) for p in primes))


@lru_cache(maxsize=None)
def _small_primes() -> tuple[int, ...]:
    return sieve_primes(math.isqrt(TRIAL_DIVISION_LIMIT) + 1).primes


def is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _small_primes()[:20]:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3e24
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        c = rng.randrange(1, n)
        x = y = rng.randrange(2, n)
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


def _factor_large(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_probable_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_rho(n)
    _factor_large(d, out)
    _factor_large(n // d, out)


def factorize(n: int) -> Factorization:
    if n < 1:
        raise ValueError(f"cannot factor n={n}; need n >= 1")
    original = n
    found: dict[int, int] = {}
    for p in _small_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            found[p] = e
    if n > 1:
        # no factor below the trial bound survives, so a small cofactor is prime
        if n < _small_primes()[-1] ** 2:
            found[n] = found.get(n, 0) + 1
        else:
            _factor_large(n, found)
    return Factorization(original, tuple(sorted(found.items())))


def mobius(n: int) -> int:
    fac = factorize(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def mobius_table(limit: int) -> np.ndarray:
    """Moebius values for 0..limit via a linear sieve (index 0 is 0)."""
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    mask = sieve_mask(limit)
    for p in np.flatnonzero(mask):
        p = int(p)
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError(f"euler_phi needs n >= 1, got {n}")
    out = n
    for p, _ in factorize(n):
        out = out // p * (p - 1)
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for _, e in factorize(n))


def jacobi(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise ValueError("jacobi symbol needs a positive odd modulus")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), extended to every integer n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        v = 0
        while n % 2 == 0:
            n //= 2
            v += 1
        if v % 2 and a % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * jacobi(a, n)
