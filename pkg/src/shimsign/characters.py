"""Dirichlet characters modulo q with exact root-of-unity values.

Generators of (Z/qZ)^x are fixed per prime-power component: the smallest
primitive root for odd p^e, and {-1, 5} for 2^e (only -1 when e = 2).
A character is the vector of exponents e_i such that chi(g_i) is
exp(2 pi i e_i / ord(g_i)); its label is ``"q:e1,...,ek"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product

from .arith import euler_phi, factorize
from .cyclotomic import CyclotomicRational, RootOfUnity, simplify

__all__ = [
    "RootOfUnity",
    "DirichletCharacter",
    "CharacterGroup",
    "character_group",
    "evaluate",
    "principal",
    "image",
    "progression_indicator",
    "parse_label",
]


def _primitive_root(pe: int, p: int) -> int:
    phi = euler_phi(pe)
    prime_factors = [r for r, _ in factorize(phi)]
    for g in range(2, pe):
        if math.gcd(g, p) != 1:
            continue
        if all(pow(g, phi // r, pe) != 1 for r in prime_factors):
            return g
    raise ValueError(f"no primitive root modulo {pe}")


@dataclass(frozen=True)
class _Component:
    modulus: int  # prime power p^e
    generator: int  # lifted to the full modulus by CRT
    order: int
    dlog: dict  # residue mod p^e -> exponent

    def __hash__(self):
        return hash((self.modulus, self.generator, self.order))


@dataclass(frozen=True, eq=False)
class CharacterGroup:
    modulus: int
    components: tuple = field(repr=False)

    @property
    def generators(self) -> tuple[int, ...]:
        return tuple(c.generator for c in self.components)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(c.order for c in self.components)

    @cached_property
    def exponent(self) -> int:
        return math.lcm(1, *self.orders)

    def discrete_log(self, n: int) -> tuple[int, ...] | None:
        """Exponent vector of n over the generators, or None if gcd(n, q) > 1."""
        if math.gcd(n, self.modulus) != 1:
            return None
        return tuple(c.dlog[n % c.modulus] for c in self.components)

    def character(self, exponents) -> DirichletCharacter:
        exponents = tuple(int(e) % o for e, o in zip(exponents, self.orders))
        if len(exponents) != len(self.components):
            raise ValueError(f"expected {len(self.components)} exponents, got {len(exponents)}")
        return DirichletCharacter(self, exponents)

    @cached_property
    def characters(self) -> tuple[DirichletCharacter, ...]:
        return tuple(self.character(e) for e in product(*(range(o) for o in self.orders)))

    def __iter__(self):
        return iter(self.characters)

    def __len__(self):
        return len(self.characters)

    @cached_property
    def _log_table(self) -> list:
        return [self.discrete_log(n) for n in range(self.modulus)]


@lru_cache(maxsize=None)
def character_group(q: int) -> CharacterGroup:
    if q < 1:
        raise ValueError(f"modulus must be >= 1, got {q}")
    by_pe: dict[int, list] = {}
    for p, e in factorize(q):
        pe = p**e
        rest = q // pe
        gens = []
        if p == 2:
            if e >= 2:
                gens.append((pe - 1, 2))
            if e >= 3:
                gens.append((5, pe // 4))
        else:
            gens.append((_primitive_root(pe, p), pe - pe // p))
        for g, order in gens:
            # CRT: g mod p^e, 1 mod the rest
            lifted = (g * rest * pow(rest, -1, pe) + pe * pow(pe, -1, rest)) % q if rest > 1 else g % q
            by_pe.setdefault(pe, []).append((lifted, g, order))
    built = []
    # the 2-power part may carry two generators and needs a joint log table
    for pe, gens in by_pe.items():
        if len(gens) == 1:
            lifted, g, order = gens[0]
            table, x = {}, 1
            for j in range(order):
                table[x] = j
                x = x * g % pe
            built.append(_Component(pe, lifted, order, table))
        else:
            (l1, g1, o1), (l2, g2, o2) = gens
            t1, t2 = {}, {}
            x = 1
            for b in range(o2):
                for a in range(o1):
                    y = x * pow(g1, a, pe) % pe
                    t1[y] = a
                    t2[y] = b
                x = x * g2 % pe
            built.append(_Component(pe, l1, o1, t1))
            built.append(_Component(pe, l2, o2, t2))
    return CharacterGroup(q, tuple(built))


@dataclass(frozen=True)
class DirichletCharacter:
    group: CharacterGroup = field(repr=False, compare=False)
    exponents: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return self.group.modulus

    def __eq__(self, other):
        return (
            isinstance(other, DirichletCharacter)
            and self.modulus == other.modulus
            and self.exponents == other.exponents
        )

    def __hash__(self):
        return hash((self.modulus, self.exponents))

    @cached_property
    def order(self) -> int:
        m = self.group.exponent
        scaled = [e * (m // o) for e, o in zip(self.exponents, self.group.orders)]
        return m // math.gcd(m, *scaled)

    def exponent_at(self, n: int) -> int | None:
        """j such that chi(n) = zeta_m^j with m the group exponent; None when chi(n) = 0."""
        logs = self.group._log_table[n % self.modulus]
        if logs is None:
            return None
        m = self.group.exponent
        return sum(e * l * (m // o) for e, l, o in zip(self.exponents, logs, self.group.orders)) % m

    def __call__(self, n: int) -> RootOfUnity | int:
        j = self.exponent_at(n)
        if j is None:
            return 0
        return RootOfUnity(self.group.exponent, j)

    def __mul__(self, other: DirichletCharacter) -> DirichletCharacter:
        if other.modulus != self.modulus:
            raise ValueError("characters have different moduli")
        return self.group.character(a + b for a, b in zip(self.exponents, other.exponents))

    def conjugate(self) -> DirichletCharacter:
        return self.group.character(-e for e in self.exponents)

    @property
    def is_principal(self) -> bool:
        return not any(self.exponents)

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    def label(self) -> str:
        return f"{self.modulus}:" + ",".join(str(e) for e in self.exponents)

    def __repr__(self):
        return f"DirichletCharacter({self.label()!r})"


def evaluate(chi: DirichletCharacter, n: int) -> RootOfUnity | int:
    return chi(n)


def principal(q: int) -> DirichletCharacter:
    g = character_group(q)
    return g.character([0] * len(g.components))


def image(chi: DirichletCharacter) -> frozenset[RootOfUnity]:
    m = chi.order
    return frozenset(RootOfUnity(m, j) for j in range(m))


def parse_label(label: str) -> DirichletCharacter:
    try:
        q_part, _, exps = label.partition(":")
        q = int(q_part)
        exponents = [int(e) for e in exps.split(",")] if exps.strip() else []
    except ValueError as exc:
        raise ValueError(f"malformed character label {label!r}") from exc
    g = character_group(q)
    if len(exponents) != len(g.components):
        raise ValueError(f"label {label!r} needs {len(g.components)} exponents")
    return g.character(exponents)


def character_sum(values) -> CyclotomicRational | int | Fraction:
    """Exact sum of root-of-unity / rational terms."""
    total = 0
    buckets: dict[int, list] = {}
    for v in values:
        if isinstance(v, RootOfUnity):
            buckets.setdefault(v.order, [0] * v.order)[v.exponent] += 1
        else:
            total += v
    out = total
    for m, w in buckets.items():
        out = CyclotomicRational.from_group_ring(m, w) + out
    return simplify(out) if not isinstance(out, (int, Fraction)) else out


def progression_indicator(d: int, q: int, n: int) -> Fraction:
    """1 if n = d mod q (with gcd(n, q) = 1), else 0, via the character sum."""
    if math.gcd(d, q) != 1:
        raise ValueError(f"gcd(d={d}, q={q}) must be 1")
    g = character_group(q)
    terms = []
    for eps in g:
        a = eps(n)
        if a == 0:
            continue
        terms.append(a * eps(d).conjugate())
    s = character_sum(terms)
    if isinstance(s, CyclotomicRational):
        raise ArithmeticError("orthogonality sum failed to be rational")
    return Fraction(s) / euler_phi(q)
