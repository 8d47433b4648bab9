"""Sign function f(n), progression counts, Delange sums, and density estimators."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .characters import DirichletCharacter, character_group
from .cyclotomic import CyclotomicRational, exact_div, exact_sign


@dataclass(frozen=True, eq=False)
class SignFunction:
    """f(n) in {-1, 0, 1} for 1 <= n <= X; ``table[0]`` is unused."""

    table: np.ndarray = field(repr=False)
    N: int
    a_t_sign: int = 1

    @property
    def X(self) -> int:
        return self.table.size - 1

    def __call__(self, n: int) -> int:
        if n < 1 or n > self.X:
            raise IndexError(f"f({n}) outside 1..{self.X}")
        return int(self.table[n])

    @classmethod
    def from_values(cls, values, N: int, chi: DirichletCharacter | None = None) -> SignFunction:
        """Build f from ``values[n] = a(t n^2)`` (index 0 ignored)."""
        X = len(values) - 1
        table = np.zeros(X + 1, dtype=np.int8)
        for n in range(1, X + 1):
            table[n] = sign_f(n, values, N, chi)
        return cls(table, N, exact_sign(values[1]) if X >= 1 else 1)


def sign_f(n: int, values, N: int, chi: DirichletCharacter | None = None) -> int:
    """Sign of a(t n^2) / chi(n) when gcd(n, N) = 1, else 0."""
    if n < 1 or n >= len(values):
        raise IndexError(f"a(t n^2) for n={n} is not in the table")
    if math.gcd(n, N) != 1:
        return 0
    v = values[n]
    if v == 0:
        return 0
    if chi is not None:
        v = exact_div(v, chi(n))
    return exact_sign(v)


@dataclass
class MultiplicativityReport:
    checked: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def multiplicativity_check(f: SignFunction, pair_count: int, X: int | None = None, seed: int = 0) -> MultiplicativityReport:
    """f(mn) = f(m) f(n) on random coprime pairs with mn <= X."""
    if f.a_t_sign <= 0:
        raise ValueError("multiplicativity needs a(t) > 0")
    X = f.X if X is None else min(X, f.X)
    rng = random.Random(seed)
    bad = []
    checked = 0
    while checked < pair_count:
        m = rng.randint(1, max(1, math.isqrt(X) * 4))
        m = min(m, X)
        n = rng.randint(1, X // m)
        if math.gcd(m, n) != 1:
            continue
        checked += 1
        if f(m * n) != f(m) * f(n):
            bad.append((m, n))
    return MultiplicativityReport(checked, bad)


# -- Dedekind-Dirichlet estimates -----------------------------------------------


@dataclass
class DDEstimate:
    delta: float
    estimate: float
    tail_bound: float
    corrected: float


def dedekind_dirichlet_estimate(indicator, delta_grid, X: int) -> list[DDEstimate]:
    """delta * sum_{n <= X, n in A} n^-(1+delta) for each delta.

    ``tail_bound`` is X^-delta, which dominates the omitted tail
    delta * sum_{n > X} n^-(1+delta) for any A. ``corrected`` adds the tail
    under the assumption that A keeps its observed density beyond X.
    """
    n = np.arange(1, X + 1, dtype=float)
    if callable(indicator):
        mask = np.asarray(indicator(np.arange(1, X + 1)), dtype=bool)
    else:
        mask = np.asarray(indicator, dtype=bool)
        if mask.size == X + 1:
            mask = mask[1:]
    if mask.size != X:
        raise ValueError(f"indicator covers {mask.size} values, need {X}")
    share = np.count_nonzero(mask) / X
    out = []
    for delta in delta_grid:
        if delta <= 0:
            raise ValueError(f"delta must be positive, got {delta}")
        raw = float(delta * np.sum(n[mask] ** -(1.0 + delta)))
        tail = X ** -delta
        out.append(DDEstimate(float(delta), raw, tail, raw + share * tail))
    return out


# -- progression experiments ------------------------------------------------------


@dataclass
class DensityReport:
    q: int
    d: int
    X: int
    positive: int
    negative: int
    zero: int
    out_of_class: int
    dd_estimates: list = field(default_factory=list)

    @property
    def nonzero(self) -> int:
        return self.positive + self.negative

    @property
    def in_class_units(self) -> int:
        return self.positive + self.negative + self.zero

    @property
    def pos_ratio(self) -> float:
        return self.positive / self.nonzero if self.nonzero else math.nan

    @property
    def neg_ratio(self) -> float:
        return self.negative / self.nonzero if self.nonzero else math.nan

    @property
    def radius(self) -> float:
        return 1 / math.sqrt(self.nonzero) if self.nonzero else math.inf

    @property
    def difference_quotient(self) -> Fraction:
        return Fraction(self.positive - self.negative, self.X)

    @property
    def sum_quotient(self) -> Fraction:
        return Fraction(self.positive + self.negative, self.X)


def _class_masks(f: SignFunction, q: int, d: int, X: int):
    n = np.arange(1, X + 1)
    in_class = n % q == d % q
    unit = np.gcd(n, f.N) == 1
    return n, in_class, unit


def progression_sign_counts(f: SignFunction, q: int, d: int, X: int | None = None, delta_grid=()) -> DensityReport:
    """Count f = +1, -1, 0 over n <= X with n = d mod q and gcd(n, N) = 1."""
    if math.gcd(d, q) != 1:
        raise ValueError(f"gcd(d={d}, q={q}) must be 1")
    X = f.X if X is None else X
    if X > f.X:
        raise IndexError(f"sign table covers n <= {f.X}, asked for {X}")
    _, in_class, unit = _class_masks(f, q, d, X)
    vals = f.table[1 : X + 1]
    sel = in_class & unit
    report = DensityReport(
        q,
        d,
        X,
        int(np.count_nonzero(sel & (vals > 0))),
        int(np.count_nonzero(sel & (vals < 0))),
        int(np.count_nonzero(sel & (vals == 0))),
        int(np.count_nonzero(in_class & ~unit)),
    )
    if len(delta_grid):
        report.dd_estimates = dedekind_dirichlet_estimate(sel & (vals != 0), delta_grid, X)
    return report


def d_independence_check(f: SignFunction, q: int, X: int | None = None) -> dict:
    """Nonzero density per unit class d mod q and the largest pairwise gap."""
    X = f.X if X is None else X
    vals = f.table[1 : X + 1]
    n = np.arange(1, X + 1)
    nonzero = vals != 0
    per_class = {}
    for d in range(q):
        if math.gcd(d, q) != 1:
            continue
        per_class[d] = np.count_nonzero(nonzero & (n % q == d)) / X
    spread = max(per_class.values()) - min(per_class.values())
    return {"q": q, "X": X, "densities": per_class, "max_deviation": spread}


# -- Delange ------------------------------------------------------------------------


@dataclass
class DelangePoint:
    x: int
    exact_sum: object
    value: float


def delange_partial_sums(f: SignFunction, eps: DirichletCharacter, checkpoints) -> list[DelangePoint]:
    """|sum_{n <= x} f(n) eps(n)| / x, summed exactly in Z[zeta_m]."""
    q = eps.modulus
    m = eps.group.exponent
    residue_exp = np.array([-1 if (j := eps.exponent_at(r)) is None else j for r in range(q)], dtype=np.int64)
    out = []
    for x in sorted(checkpoints):
        if x > f.X:
            raise IndexError(f"sign table covers n <= {f.X}, asked for {x}")
        n = np.arange(1, x + 1)
        exps = residue_exp[n % q]
        vals = f.table[1 : x + 1].astype(np.int64)
        live = (exps >= 0) & (vals != 0)
        buckets = np.zeros(m, dtype=np.int64)
        np.add.at(buckets, exps[live], vals[live])
        total = CyclotomicRational.from_group_ring(m, [int(b) for b in buckets])
        out.append(DelangePoint(x, total, abs(complex(total)) / x))
    return out


# -- 1/q identity ---------------------------------------------------------------------


@dataclass
class IdentityReport:
    q: int
    d: int
    delta: float
    X: int
    estimate: float
    corrected: float
    target: float
    tail_bound: float

    @property
    def deviation(self) -> float:
        return self.estimate - self.target


def identity_1q_diagnostic(f: SignFunction, q: int, d: int, delta: float, X: int | None = None) -> IdentityReport:
    """delta * (2 S_{f>0} + S_{f=0, unit} + S_{non-unit}) over n = d mod q, against 1/q."""
    if not (q == f.N or math.gcd(q, f.N) == 1):
        raise ValueError(f"needs q = N or gcd(q, N) = 1 (q={q}, N={f.N})")
    if delta <= 0:
        raise ValueError("delta must be positive")
    X = f.X if X is None else X
    n, in_class, unit = _class_masks(f, q, d, X)
    vals = f.table[1 : X + 1]
    weight = np.where(unit, np.where(vals > 0, 2, np.where(vals == 0, 1, 0)), 1) * in_class
    terms = n.astype(float) ** -(1.0 + delta)
    raw = float(delta * np.sum(weight * terms))
    tail = 2 * X ** -delta
    corrected = raw + float(np.sum(weight)) / X * X ** -delta
    return IdentityReport(q, d, delta, X, raw, corrected, 1 / q, tail)


# -- exports ------------------------------------------------------------------------


def scatter_rows(values, t: int, chi: DirichletCharacter, N: int, X: int | None = None):
    """(n, t n^2, Re a, Im a, chi(n) label) for units n <= X."""
    X = len(values) - 1 if X is None else X
    for n in range(1, X + 1):
        if math.gcd(n, N) != 1:
            continue
        z = complex(values[n])
        yield n, t * n * n, z.real, z.imag, chi(n).label()


def progression_units(q: int):
    return [d for d in range(1, q + 1) if math.gcd(d, q) == 1] if q > 1 else [1]


def all_characters(q: int):
    return list(character_group(q))
