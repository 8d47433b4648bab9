"""The Shimura lift, its Moebius inversion, and normalized eigenvalues.

The lift sends half-integral coefficients to

    A_t(n) = sum_{d | n} chi_{t,N}(d) d^(k-1) a(t n^2 / d^2),
    chi_{t,N}(d) = chi(d) * ((-1)^k N^2 t / d),

and ``invert_lift`` undoes it with the Moebius function. Normalized
eigenvalues divide by the weight-2k Ramanujan-Petersson bound 2 p^((2k-1)/2),
so B_t(p) lies in [-1, 1].
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .arith import kronecker, mobius_table, sieve_mask
from .characters import DirichletCharacter, principal
from .cyclotomic import CyclotomicRational, exact_div, is_real, simplify, to_exact
from .halfint import CoefficientRangeError, HalfIntegralForm
from .qseries import tau_table


class RamanujanPeterssonViolation(ValueError):
    pass


class RealityViolation(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LiftedForm:
    """Weight-2k form F_t with coefficients ``coeffs[n] = A_t(n)`` (index 0 unused)."""

    weight: int
    level: int
    character: DirichletCharacter
    coeffs: tuple = field(repr=False)
    a_t: object = 1
    nebentypus: DirichletCharacter | None = None  # chi of the half-integral source

    def __post_init__(self):
        if self.weight % 2:
            raise ValueError(f"lifted weight must be even, got {self.weight}")
        if len(self.coeffs) < 2:
            raise ValueError("need at least A(1)")
        if self.coeffs[1] != self.a_t:
            raise ValueError(f"A(1) = {self.coeffs[1]} differs from a(t) = {self.a_t}")

    @property
    def k(self) -> int:
        return self.weight // 2

    @property
    def T(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int):
        if n < 1 or n > self.T:
            raise CoefficientRangeError(n, self.T)
        return self.coeffs[n]

    def with_coefficient(self, n: int, value) -> LiftedForm:
        coeffs = list(self.coeffs)
        coeffs[n] = value
        return LiftedForm(self.weight, self.level, self.character, tuple(coeffs), self.a_t, self.nebentypus)


def delta_lift(T: int, N: int | None = None) -> LiftedForm:
    """Delta as a lifted form: level 1 by default, or N/2 as the lift of a level-N preimage."""
    level = 1 if N is None else N // 2
    char = principal(N if N is not None else 1)
    return LiftedForm(12, level, char, tuple(tau_table(T)), 1, char)


def chi_tN(d: int, chi: DirichletCharacter, t: int, N: int, k: int):
    """chi(d) * ((-1)^k N^2 t / d), exactly."""
    symbol = kronecker((-1) ** k * N * N * t, d)
    if symbol == 0:
        return 0
    value = chi(d)
    if value == 0:
        return 0
    return simplify(to_exact(value) * symbol)


def _twist_weights(T: int, chi, t: int, N: int, k: int, with_mobius: bool) -> list:
    mu = mobius_table(T) if with_mobius else None
    w = [0] * (T + 1)
    for d in range(1, T + 1):
        if mu is not None and mu[d] == 0:
            continue
        c = chi_tN(d, chi, t, N, k)
        if c == 0:
            continue
        c = c * d ** (k - 1)
        w[d] = -c if mu is not None and mu[d] < 0 else c
    return w


def _convolve(w: list, v: list, T: int) -> list:
    out = [0] * (T + 1)
    for d in range(1, T + 1):
        c = w[d]
        if c == 0:
            continue
        for m in range(1, T // d + 1):
            x = v[m]
            if x != 0:
                out[d * m] = c * x + out[d * m]
    return [simplify(x) for x in out]


def lift(f: HalfIntegralForm, t: int | None = None, T: int = 100) -> LiftedForm:
    t = f.t if t is None else t
    if f.a(t) == 0:
        raise ValueError(f"a(t) = a({t}) vanishes")
    if t != f.t:
        f = HalfIntegralForm(f.level, f.k, f.character, t, f.truncation, f.coeffs, f.square_class_only)
    values = f.square_class_values(T)
    w = _twist_weights(T, f.character, t, f.level, f.k, with_mobius=False)
    A = _convolve(w, values, T)
    return LiftedForm(2 * f.k, f.level // 2, f.character * f.character, tuple(A), simplify(values[1]), f.character)


def invert_lift(A, t: int, chi: DirichletCharacter, N: int, k: int, T: int | None = None) -> list:
    """[0, a(t), a(4t), ..., a(t T^2)] from lifted coefficients A(1..T)."""
    coeffs = A.coeffs if isinstance(A, LiftedForm) else A
    T = len(coeffs) - 1 if T is None else T
    if T > len(coeffs) - 1:
        raise CoefficientRangeError(T, len(coeffs) - 1)
    w = _twist_weights(T, chi, t, N, k, with_mobius=True)
    return _convolve(w, list(coeffs[: T + 1]), T)


def preimage_form(A: LiftedForm, t: int, chi: DirichletCharacter, N: int, k: int, T: int | None = None):
    """Half-integral form on the square class of t whose lift is A."""
    values = invert_lift(A, t, chi, N, k, T)
    return HalfIntegralForm.from_square_class(values, t, N, k, chi)


def rp_bound(p: int, weight: int) -> float:
    return 2.0 * p ** ((weight - 1) / 2)


def _normalized_ratio(A: LiftedForm, p: int, chi: DirichletCharacter):
    """A_t(p) / (a(t) chi(p)), exact and checked to be real."""
    chip = chi(p)
    if chip == 0:
        raise ValueError(f"chi({p}) = 0")
    r = exact_div(exact_div(A[p], A.a_t), chip)
    if not is_real(r):
        raise RealityViolation(f"A_t({p}) / chi({p}) is not real")
    return r


def _source_character(A: LiftedForm, chi):
    if chi is not None:
        return chi
    return A.nebentypus if A.nebentypus is not None else principal(A.character.modulus)


def bt(A: LiftedForm, p: int, chi: DirichletCharacter | None = None, k: int | None = None) -> float:
    """B_t(p) = A_t(p) / (2 a(t) p^((2k-1)/2) chi(p)); never clamped."""
    k = A.k if k is None else k
    if A.level % p == 0:
        raise ValueError(f"p={p} divides the level {A.level}")
    chi = _source_character(A, chi)
    r = _normalized_ratio(A, p, chi)
    weight = 2 * k
    bound_sq = 4 * p ** (weight - 1)
    exact = r.rational() if isinstance(r, CyclotomicRational) else r
    if exact is not None:
        if exact * exact > bound_sq:
            raise RamanujanPeterssonViolation(f"|A_t({p})/a(t)| exceeds 2 p^{(weight - 1) / 2}")
        return float(exact) / rp_bound(p, weight)
    value = float(r)
    if abs(value) > rp_bound(p, weight) * (1 + 1e-12):
        raise RamanujanPeterssonViolation(f"|A_t({p})/a(t)| exceeds 2 p^{(weight - 1) / 2}")
    return value / rp_bound(p, weight)


@dataclass
class NormalizedEigenvalues:
    primes: np.ndarray
    values: np.ndarray
    exact: dict = field(repr=False, default_factory=dict)

    def __len__(self):
        return len(self.primes)

    def restrict(self, x_max: float) -> NormalizedEigenvalues:
        keep = self.primes <= x_max
        return NormalizedEigenvalues(self.primes[keep], self.values[keep], self.exact)


def normalized_eigenvalues(A: LiftedForm, x_max: int | None = None, chi=None) -> NormalizedEigenvalues:
    """B_t(p) for all primes p <= x_max not dividing the level."""
    x_max = A.T if x_max is None else x_max
    if x_max > A.T:
        raise CoefficientRangeError(x_max, A.T)
    primes = [int(p) for p in np.flatnonzero(sieve_mask(x_max)) if A.level % int(p)]
    chi = _source_character(A, chi)
    values = np.array([bt(A, p, chi) for p in primes], dtype=float)
    exact = {p: _normalized_ratio(A, p, chi) for p in primes}
    return NormalizedEigenvalues(np.array(primes, dtype=np.int64), values, exact)


@dataclass
class HeckeReport:
    checked: int
    violation: tuple[int, int] | None = None  # (p, n)

    @property
    def ok(self) -> bool:
        return self.violation is None


def integral_eigencheck(A: LiftedForm, primes, n_max: int) -> HeckeReport:
    """A(p) A(n) = a(t) [A(pn) + chi^2(p) p^(2k-1) A(n/p)] for p not dividing the level."""
    checked = 0
    w1 = A.weight - 1
    for p in primes:
        if A.level % p == 0:
            raise ValueError(f"p={p} divides the level {A.level}")
        chi2p = to_exact(A.character(p))
        for n in range(1, min(n_max, A.T // p) + 1):
            rhs = A[p * n]
            if n % p == 0:
                rhs = chi2p * p**w1 * A[n // p] + rhs
            if A[p] * A[n] != A.a_t * rhs:
                return HeckeReport(checked, (p, n))
            checked += 1
    return HeckeReport(checked)


def multiplicativity_violations(A: LiftedForm, pairs) -> list[tuple[int, int]]:
    """Coprime pairs (m, n) where A(mn) a(t) != A(m) A(n)."""
    return [(m, n) for m, n in pairs if A[m * n] * A.a_t != A[m] * A[n]]


def _st_draw(rng: random.Random) -> float:
    while True:
        x = rng.uniform(-1.0, 1.0)
        if rng.random() <= math.sqrt(1.0 - x * x):
            return x


def synth_hecke_form(k: int, seed: int, T: int, eigenvalue_mode: str = "integer-uniform", N: int = 4, a_t=1) -> LiftedForm:
    """Random Hecke-multiplicative weight-2k coefficients with integer A(p).

    A(p) is drawn with |A(p)| <= 2 p^((2k-1)/2); prime powers follow
    A(p^(r+1)) = A(p) A(p^r) - p^(2k-1) A(p^(r-1)) and coprime indices multiply.
    The result is scaled by ``a_t``.
    """
    if eigenvalue_mode not in ("integer-uniform", "sato-tate-rounded"):
        raise ValueError(f"unknown eigenvalue mode {eigenvalue_mode!r}")
    if T < 1:
        raise ValueError("need T >= 1")
    rng = random.Random(seed)
    w1 = 2 * k - 1
    A = [0] * (T + 1)
    A[1] = 1
    primes = [int(p) for p in np.flatnonzero(sieve_mask(T))] if T >= 2 else []
    spf = list(range(T + 1))
    for p in primes:
        for m in range(p * p, T + 1, p):
            if spf[m] == m:
                spf[m] = p
    for p in primes:
        bound = math.isqrt(4 * p**w1)
        if eigenvalue_mode == "integer-uniform":
            ap = rng.randint(-bound, bound)
        else:
            ap = int(round(_st_draw(rng) * rp_bound(p, 2 * k)))
            ap = max(-bound, min(bound, ap))
        A[p] = ap
        prev, cur, q = 1, ap, p
        while q * p <= T:
            prev, cur = cur, ap * cur - p**w1 * prev
            q *= p
            A[q] = cur
    for n in range(2, T + 1):
        p = spf[n]
        if p == n:
            continue
        m, pe = n, 1
        while m % p == 0:
            m //= p
            pe *= p
        if m > 1:
            A[n] = A[pe] * A[m]
    coeffs = tuple(a_t * a for a in A) if a_t != 1 else tuple(A)
    return LiftedForm(2 * k, N // 2, principal(N), coeffs, a_t, principal(N))
