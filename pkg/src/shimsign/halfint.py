"""Half-integral weight cusp forms with exact coefficients.

A form of weight k + 1/2 on Gamma_0(N) (4 | N) with nebentypus chi is held as
a table n -> a(n). Tables built by inverting a lift only know the square
class t*m^2; reading outside it raises instead of returning a silent zero.

Form file grammar (UTF-8 text, one item per line, ``#`` starts a comment)::

    shimsign-form v1
    level: <N>
    k: <k>
    character: <q:e1,...,ek>
    t: <t>
    truncation: <T>
    support: all | square-class
    coefficients:
    <n> <value>
    ...

``<value>`` is an integer, a rational ``p/q``, or ``z<m>:c0,c1,...`` for
sum c_i zeta_m^i with rational c_i over the power basis of Q(zeta_m).
Indices absent from an ``all`` table are zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .arith import is_squarefree, kronecker
from .characters import DirichletCharacter, parse_label, principal
from .cyclotomic import CyclotomicRational, exact_div, is_real, simplify, to_exact

FORM_MAGIC = "shimsign-form v1"


class FormError(ValueError):
    """Base class for invalid form data."""


class MalformedFormFile(FormError):
    pass


class LevelError(FormError):
    pass


class SquarefreeError(FormError):
    pass


class VanishingCoefficientError(FormError):
    pass


class CoefficientRangeError(IndexError):
    def __init__(self, index: int, truncation: int):
        super().__init__(f"coefficient index {index} beyond truncation {truncation}")
        self.index = index


def _in_field(x: CyclotomicRational, d: int) -> bool:
    """True iff x lies in Q(zeta_d)."""
    L = math.lcm(x.order, d)
    y = x._lift(L)
    return all(y.galois(j) == y for j in range(1, L + 1, d) if math.gcd(j, L) == 1)


def _nonzero(coeffs: dict) -> dict:
    return {n: v for n, v in coeffs.items() if v != 0}


def _square_root_in_class(n: int, t: int) -> int | None:
    if n % t:
        return None
    m = math.isqrt(n // t)
    return m if m * m * t == n else None


@dataclass(frozen=True, eq=False)
class HalfIntegralForm:
    level: int
    k: int
    character: DirichletCharacter
    t: int
    truncation: int
    coeffs: dict = field(repr=False)
    square_class_only: bool = False

    def __post_init__(self):
        if self.level % 4:
            raise LevelError(f"level {self.level} is not divisible by 4")
        if self.k < 2:
            raise FormError(f"k must be >= 2, got {self.k}")
        if self.character.modulus != self.level:
            raise FormError(f"nebentypus modulus {self.character.modulus} != level {self.level}")
        if not is_squarefree(self.t):
            raise SquarefreeError(f"t={self.t} is not squarefree")
        if self.t > self.truncation:
            raise CoefficientRangeError(self.t, self.truncation)
        if self.coeffs.get(self.t, 0) == 0:
            raise VanishingCoefficientError(f"a(t) = a({self.t}) vanishes")
        field_order = math.lcm(2, self.character.order)
        for n, v in self.coeffs.items():
            if n < 1 or n > self.truncation:
                raise CoefficientRangeError(n, self.truncation)
            if isinstance(v, CyclotomicRational) and not _in_field(v, field_order):
                raise FormError(f"a({n}) lies outside Q(zeta_{field_order})")

    @classmethod
    def from_square_class(cls, values, t: int, level: int, k: int, character=None) -> HalfIntegralForm:
        """Form known only on n = t*m^2, from ``values[m] = a(t m^2)`` (index 0 ignored)."""
        character = character if character is not None else principal(level)
        M = len(values) - 1
        coeffs = {t * m * m: simplify(values[m]) for m in range(1, M + 1) if values[m] != 0}
        return cls(level, k, character, t, t * M * M, coeffs, square_class_only=True)

    def a(self, n: int):
        if n < 1:
            raise ValueError(f"index must be positive, got {n}")
        if n > self.truncation:
            raise CoefficientRangeError(n, self.truncation)
        v = self.coeffs.get(n)
        if v is None:
            if self.square_class_only and _square_root_in_class(n, self.t) is None:
                raise LookupError(f"a({n}) is outside the square class of t={self.t}")
            return 0
        return v

    __getitem__ = a

    def known_indices(self, limit: int | None = None) -> list[int]:
        limit = self.truncation if limit is None else min(limit, self.truncation)
        if self.square_class_only:
            return [self.t * m * m for m in range(1, math.isqrt(limit // self.t) + 1)]
        return list(range(1, limit + 1))

    def square_class_values(self, M: int) -> list:
        """[0, a(t), a(4t), ..., a(t M^2)]."""
        if self.t * M * M > self.truncation:
            first = math.isqrt(self.truncation // self.t) + 1
            raise CoefficientRangeError(self.t * first * first, self.truncation)
        return [0] + [self.a(self.t * m * m) for m in range(1, M + 1)]

    def chi(self, n: int):
        return to_exact(self.character(n))

    def __eq__(self, other):
        if not isinstance(other, HalfIntegralForm):
            return NotImplemented
        return (
            (self.level, self.k, self.character, self.t, self.truncation, self.square_class_only)
            == (other.level, other.k, other.character, other.t, other.truncation, other.square_class_only)
            and _nonzero(self.coeffs).keys() == _nonzero(other.coeffs).keys()
            and all(self.coeffs[n] == other.coeffs[n] for n in _nonzero(self.coeffs))
        )

    __hash__ = None


# -- file format -------------------------------------------------------------


def format_value(v) -> str:
    v = simplify(v)
    if isinstance(v, CyclotomicRational):
        return f"z{v.order}:" + ",".join(str(c) for c in v.coords)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return str(int(v))


def parse_value(text: str):
    text = text.strip()
    if text.startswith("z"):
        head, _, body = text.partition(":")
        m = int(head[1:])
        coords = [Fraction(c) for c in body.split(",")]
        return simplify(CyclotomicRational(m, coords))
    return simplify(Fraction(text))


def dumps_form(f: HalfIntegralForm) -> str:
    lines = [
        FORM_MAGIC,
        f"level: {f.level}",
        f"k: {f.k}",
        f"character: {f.character.label()}",
        f"t: {f.t}",
        f"truncation: {f.truncation}",
        f"support: {'square-class' if f.square_class_only else 'all'}",
        "coefficients:",
    ]
    for n in sorted(f.coeffs):
        if f.coeffs[n] != 0:
            lines.append(f"{n} {format_value(f.coeffs[n])}")
    return "\n".join(lines) + "\n"


def save_form(f: HalfIntegralForm, path) -> None:
    Path(path).write_text(dumps_form(f))


def loads_form(text: str) -> HalfIntegralForm:
    lines = [line.split("#", 1)[0].strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines or lines[0] != FORM_MAGIC:
        raise MalformedFormFile(f"missing header line {FORM_MAGIC!r}")
    header: dict[str, str] = {}
    i = 1
    while i < len(lines) and lines[i] != "coefficients:":
        key, sep, value = lines[i].partition(":")
        if not sep:
            raise MalformedFormFile(f"expected 'key: value', got {lines[i]!r}")
        header[key.strip()] = value.strip()
        i += 1
    if i == len(lines):
        raise MalformedFormFile("missing 'coefficients:' section")
    missing = {"level", "k", "character", "t", "truncation"} - header.keys()
    if missing:
        raise MalformedFormFile(f"missing header fields: {sorted(missing)}")
    try:
        level, k, t, T = (int(header[key]) for key in ("level", "k", "t", "truncation"))
        character = parse_label(header["character"])
        coeffs = {}
        for line in lines[i + 1 :]:
            n_text, value = line.split(None, 1)
            n = int(n_text)
            if n in coeffs:
                raise MalformedFormFile(f"duplicate coefficient index {n}")
            coeffs[n] = parse_value(value)
    except MalformedFormFile:
        raise
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedFormFile(str(exc)) from exc
    support = header.get("support", "all")
    if support not in ("all", "square-class"):
        raise MalformedFormFile(f"unknown support {support!r}")
    return HalfIntegralForm(level, k, character, t, T, coeffs, square_class_only=support == "square-class")


def load_form(path) -> HalfIntegralForm:
    return loads_form(Path(path).read_text())


# -- Hecke operators ---------------------------------------------------------


def tpsq_coefficient(f: HalfIntegralForm, p: int, n: int):
    """n-th coefficient of f | T(p^2).

    a(p^2 n) + chi(p) ((-1)^k n / p) p^(k-1) a(n) + chi(p^2) p^(2k-1) a(n / p^2)
    """
    if f.level % p == 0:
        raise ValueError(f"p={p} divides the level {f.level}")
    if p * p * n > f.truncation:
        raise CoefficientRangeError(p * p * n, f.truncation)
    k = f.k
    total = f.a(p * p * n)
    symbol = kronecker((-1) ** k * n, p)
    if symbol:
        total = f.chi(p) * (symbol * p ** (k - 1)) * f.a(n) + total
    if n % (p * p) == 0:
        total = f.chi(p * p) * p ** (2 * k - 1) * f.a(n // (p * p)) + total
    return simplify(total)


@dataclass
class EigenResult:
    prime: int
    eigenvalue: object = None
    witness: int | None = None
    inconclusive: bool = False

    @property
    def ok(self) -> bool:
        return self.witness is None and not self.inconclusive


def eigencheck(f: HalfIntegralForm, primes, n_max: int) -> dict[int, EigenResult]:
    """Find lambda_p with f | T(p^2) = lambda_p f on every known n <= n_max."""
    out = {}
    for p in primes:
        if f.level % p == 0:
            raise ValueError(f"p={p} divides the level {f.level}")
        result = EigenResult(p)
        lam = None
        for n in f.known_indices(min(n_max, f.truncation // (p * p))):
            image = tpsq_coefficient(f, p, n)
            an = f.a(n)
            if lam is None:
                if an == 0:
                    if image != 0:
                        result.witness = n
                        break
                    continue
                lam = exact_div(image, an)
                continue
            if image != simplify(lam * an):
                result.witness = n
                break
        result.eigenvalue = lam
        if lam is None and result.witness is None:
            result.inconclusive = True
        out[p] = result
    return out


@dataclass
class RealityReport:
    checked: int
    violations: list[int]

    @property
    def ok(self) -> bool:
        return not self.violations


def reality_check(f: HalfIntegralForm) -> RealityReport:
    """Check a(t n^2) / chi(n) is real for every gcd(n, N) = 1 in range."""
    checked = 0
    bad = []
    for n in range(1, math.isqrt(f.truncation // f.t) + 1):
        if math.gcd(n, f.level) != 1:
            continue
        checked += 1
        if not is_real(exact_div(f.a(f.t * n * n), f.character(n))):
            bad.append(n)
    return RealityReport(checked, bad)
