"""Sato-Tate measure, restricted samples of B_t(p), KS statistics, and error-term fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import euler_phi, sieve_mask
from .characters import DirichletCharacter, RootOfUnity, image
from .cyclotomic import exact_sign


class EmptySampleError(ValueError):
    """Raised when a restriction selects no primes."""


def _check_unit_interval(*xs: float) -> None:
    for x in xs:
        if not -1.0 <= x <= 1.0:
            raise ValueError(f"{x} lies outside [-1, 1]")


def st_cdf(x: float) -> float:
    _check_unit_interval(x)
    return 0.5 + (x * math.sqrt(1.0 - x * x) + math.asin(x)) / math.pi


def st_density(x: float) -> float:
    _check_unit_interval(x)
    return 2.0 / math.pi * math.sqrt(1.0 - x * x)


def st_measure(a: float, b: float) -> float:
    """mu([a, b]) for the semicircle measure (2/pi) sqrt(1 - t^2) dt."""
    _check_unit_interval(a, b)
    if a > b:
        raise ValueError(f"empty interval [{a}, {b}]")
    return st_cdf(b) - st_cdf(a)


def st_cdf_array(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any((x < -1.0) | (x > 1.0)):
        raise ValueError("values outside [-1, 1]")
    return 0.5 + (x * np.sqrt(1.0 - x * x) + np.arcsin(x)) / np.pi


def st_sample(seed: int, count: int) -> np.ndarray:
    """I.i.d. semicircle draws by rejection from the uniform envelope."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    out = np.empty(0)
    while out.size < count:
        need = count - out.size
        x = rng.uniform(-1.0, 1.0, size=2 * need + 16)
        u = rng.uniform(0.0, 1.0, size=x.size)
        out = np.concatenate([out, x[u <= np.sqrt(1.0 - x * x)]])
    return out[:count]


def ks_statistic(sample, cdf=st_cdf_array) -> float:
    """One-sample Kolmogorov-Smirnov distance sup |F_n - F|."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("KS statistic of an empty sample")
    try:
        F = np.asarray(cdf(x), dtype=float)
    except (TypeError, ValueError):
        F = np.array([cdf(float(v)) for v in x])
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def chi_square_statistic(sample, bins: int = 20) -> tuple[float, int]:
    """Pearson statistic over ``bins`` equal-width bins of [-1, 1]; returns (stat, dof)."""
    x = np.asarray(sample, dtype=float)
    edges = np.linspace(-1.0, 1.0, bins + 1)
    observed, _ = np.histogram(x, bins=edges)
    expected = x.size * np.diff(st_cdf_array(edges))
    return float(np.sum((observed - expected) ** 2 / expected)), bins - 1


# -- restrictions -------------------------------------------------------------


@dataclass(frozen=True)
class Restriction:
    """Which primes enter a sample: all, p = d mod q, or eps(p) = xi."""

    kind: str = "all"
    d: int = 1
    q: int = 1
    character: DirichletCharacter | None = None
    xi: RootOfUnity | None = None

    @classmethod
    def progression(cls, d: int, q: int) -> Restriction:
        if math.gcd(d, q) != 1:
            raise ValueError(f"gcd(d={d}, q={q}) must be 1")
        return cls("progression", d % q, q)

    @classmethod
    def character_value(cls, eps: DirichletCharacter, xi: RootOfUnity) -> Restriction:
        if xi not in image(eps):
            raise ValueError(f"{xi} is not in the image of {eps.label()}")
        return cls("character", character=eps, xi=xi)

    def accepts(self, p: int) -> bool:
        if self.kind == "all":
            return True
        if self.kind == "progression":
            return p % self.q == self.d % self.q
        return self.character(p) == self.xi

    def density(self) -> Fraction:
        """Predicted share of all primes meeting the restriction."""
        if self.kind == "all":
            return Fraction(1)
        if self.kind == "progression":
            return Fraction(1, euler_phi(self.q))
        return Fraction(1, self.character.order)

    def label(self) -> str:
        if self.kind == "all":
            return "all"
        if self.kind == "progression":
            return f"{self.d}mod{self.q}"
        return f"{self.character.label()}={self.xi.label()}"


def default_partition(bins: int = 20) -> list[tuple[float, float]]:
    edges = np.linspace(-1.0, 1.0, bins + 1)
    return [(float(a), float(b)) for a, b in zip(edges[:-1], edges[1:])]


@dataclass
class STStats:
    restriction: Restriction
    sample: np.ndarray = field(repr=False)
    x_max: int
    ks_distance: float
    interval_table: list  # (a, b, empirical share, predicted share)
    prime_count: int  # pi(x_max) over primes not dividing the level
    chi_square: tuple[float, int] = (math.nan, 0)

    @property
    def n_sample(self) -> int:
        return int(self.sample.size)

    def share(self, a: float, b: float) -> float:
        """Fraction of the sample inside the closed interval [a, b]."""
        lo = np.searchsorted(self.sample, a, side="left")
        hi = np.searchsorted(self.sample, b, side="right")
        return (hi - lo) / self.sample.size

    def class_fraction(self) -> float:
        return self.n_sample / self.prime_count


def _interval_table(sample: np.ndarray, intervals) -> list:
    rows = []
    n = sample.size
    for i, (a, b) in enumerate(intervals):
        lo = np.searchsorted(sample, a, side="left")
        # half-open bins except the last keep a partition's shares summing to 1
        side = "right" if i == len(intervals) - 1 else "left"
        hi = np.searchsorted(sample, b, side=side)
        rows.append((a, b, (hi - lo) / n, st_measure(a, b)))
    return rows


def restricted_sample(B, restriction: Restriction | None = None, x_max: int | None = None, intervals=None) -> STStats:
    """Sample of B_t(p), p <= x_max, meeting the restriction, with its KS distance."""
    restriction = restriction or Restriction()
    x_max = int(B.primes.max()) if x_max is None else x_max
    in_range = B.primes <= x_max
    primes, values = B.primes[in_range], B.values[in_range]
    if restriction.kind == "all":
        keep = np.ones(primes.size, dtype=bool)
    elif restriction.kind == "progression":
        keep = primes % restriction.q == restriction.d % restriction.q
    else:
        keep = np.array([restriction.accepts(int(p)) for p in primes], dtype=bool)
    sample = np.sort(values[keep])
    if sample.size == 0:
        raise EmptySampleError(f"no primes <= {x_max} satisfy {restriction.label()}")
    table = _interval_table(sample, intervals or default_partition())
    return STStats(
        restriction,
        sample,
        x_max,
        ks_statistic(sample),
        table,
        int(primes.size),
        chi_square_statistic(sample),
    )


# -- prime sign densities -----------------------------------------------------


@dataclass
class PrimeSignReport:
    d: int
    q: int
    x: int
    positive: int
    negative: int
    zero: int
    class_count: int
    prime_count: int

    def ratios(self) -> tuple[float, float, float]:
        """Shares of >, <, = 0 within the progression."""
        c = self.class_count
        return self.positive / c, self.negative / c, self.zero / c

    def ratios_vs_all(self) -> tuple[float, float, float]:
        c = self.prime_count
        return self.positive / c, self.negative / c, self.zero / c

    @property
    def predicted(self) -> float:
        """1 / (2 phi(q)), the density of each sign among all primes."""
        return 1.0 / (2 * euler_phi(self.q))


def prime_sign_densities(signs: dict, d: int, q: int, x: int) -> PrimeSignReport:
    """Count signs of a(t p^2)/chi(p) over primes p <= x, p = d mod q."""
    if math.gcd(d, q) != 1:
        raise ValueError(f"gcd(d={d}, q={q}) must be 1")
    pos = neg = zero = total = 0
    for p, s in signs.items():
        if p > x:
            continue
        total += 1
        if p % q != d % q:
            continue
        s = exact_sign(s)
        if s > 0:
            pos += 1
        elif s < 0:
            neg += 1
        else:
            zero += 1
    if pos + neg + zero == 0:
        raise EmptySampleError(f"no primes <= {x} in the class {d} mod {q}")
    return PrimeSignReport(d, q, x, pos, neg, zero, pos + neg + zero, total)


def sign_criterion_threshold(p: int, chi1_p: int) -> float:
    """a(t p^2)/chi(p) > 0  iff  B_t(p) > chi_1(p) / (2 sqrt p), for a(t) > 0."""
    return chi1_p / (2.0 * math.sqrt(p))


def sign_by_criterion(A_p_over_chi: Fraction, a_t, p: int, chi1_p: int, k: int) -> int:
    """Exact sign of B_t(p) - chi_1(p)/(2 sqrt p), times sign a(t).

    Both sides are scaled by 2 p^((2k-1)/2) a(t): the comparison becomes
    A(p)/chi(p) vs chi_1(p) p^(k-1) a(t).
    """
    diff = A_p_over_chi - chi1_p * p ** (k - 1) * a_t
    s = (diff > 0) - (diff < 0)
    return s if a_t > 0 else -s


# -- error terms ---------------------------------------------------------------


@dataclass
class ErrorFit:
    checkpoints: list
    C: float
    alpha: float
    residual: float

    def predict(self, x):
        return self.C * np.asarray(x, dtype=float) ** (-self.alpha)


def error_term_fit(checkpoints) -> ErrorFit:
    """Least-squares fit of log|E(x)| = log C - alpha log x."""
    usable = [(float(x), float(e)) for x, e in checkpoints if e != 0 and x > 0]
    xs = {x for x, _ in usable}
    if len(usable) < 3 or len(xs) < 2:
        raise ValueError(f"need >= 3 checkpoints with nonzero E(x), got {len(usable)}")
    lx = np.log([x for x, _ in usable])
    le = np.log([abs(e) for _, e in usable])
    design = np.column_stack([np.ones_like(lx), -lx])
    coef, *_ = np.linalg.lstsq(design, le, rcond=None)
    resid = le - design @ coef
    return ErrorFit(list(checkpoints), float(math.exp(coef[0])), float(coef[1]), float(np.sqrt(np.mean(resid**2))))


def geometric_checkpoints(x_max: int, start: int = 1000) -> list[int]:
    """x = start * 2^j up to x_max."""
    out = []
    x = start
    while x <= x_max:
        out.append(x)
        x *= 2
    return out


def error_checkpoints(B, restriction: Restriction, a: float, b: float, x_max: int, start: int = 1000) -> list:
    """E(x) = #{p <= x : restriction, B(p) in [a,b]} / pi(x) - mu([a,b]) * density."""
    _check_unit_interval(a, b)
    mask = sieve_mask(x_max)
    target = st_measure(a, b) * float(restriction.density())
    primes, values = B.primes, B.values
    hit = (values >= a) & (values <= b)
    if restriction.kind == "progression":
        hit &= primes % restriction.q == restriction.d % restriction.q
    elif restriction.kind == "character":
        hit &= np.array([restriction.accepts(int(p)) for p in primes], dtype=bool)
    pi_all = np.cumsum(mask)
    out = []
    for x in geometric_checkpoints(x_max, start):
        count = int(np.count_nonzero(hit & (primes <= x)))
        out.append((x, count / int(pi_all[x]) - target))
    return out
