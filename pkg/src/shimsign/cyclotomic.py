"""Exact arithmetic in cyclotomic fields.

``RootOfUnity`` stores e^{2 pi i j/m} in lowest terms. ``CyclotomicRational``
stores an element of Q(zeta_m) by its rational coordinates over the power
basis 1, zeta, ..., zeta^{phi(m)-1}. Plain ``int`` and ``Fraction`` values
mix freely with both; ``simplify`` collapses rational results back to them.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from .arith import divisors, mobius


@dataclass(frozen=True)
class RootOfUnity:
    order: int
    exponent: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("root of unity order must be >= 1")
        m, j = self.order, self.exponent % self.order
        g = math.gcd(j, m)
        object.__setattr__(self, "order", m // g)
        object.__setattr__(self, "exponent", j // g)

    def __mul__(self, other):
        if isinstance(other, RootOfUnity):
            m = math.lcm(self.order, other.order)
            return RootOfUnity(m, self.exponent * (m // self.order) + other.exponent * (m // other.order))
        return to_exact(self) * other

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, RootOfUnity):
            return (self.order, self.exponent) == (other.order, other.exponent)
        if isinstance(other, int) and self.order <= 2:
            return other == (1 if self.order == 1 else -1)
        return NotImplemented

    def __hash__(self):
        # equal to +-1 as ints, so hash like them
        if self.order <= 2:
            return hash(1 if self.order == 1 else -1)
        return hash((self.order, self.exponent))

    def __pow__(self, e: int):
        return RootOfUnity(self.order, self.exponent * e)

    def conjugate(self) -> RootOfUnity:
        return RootOfUnity(self.order, -self.exponent)

    def __complex__(self):
        if self.order <= 2:
            return complex(1 if self.exponent == 0 else -1)
        if self.order == 4:
            return complex(0, 1) if self.exponent == 1 else complex(0, -1)
        return cmath.exp(2j * math.pi * self.exponent / self.order)

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    def label(self) -> str:
        return f"{self.exponent}/{self.order}"


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_m, lowest degree first."""
    num = [1]
    den = [1]
    for d in divisors(m):
        mu = mobius(m // d)
        if mu == 0:
            continue
        factor = [-1] + [0] * (d - 1) + [1]
        if mu == 1:
            num = _poly_mul(num, factor)
        else:
            den = _poly_mul(den, factor)
    quo, rem = _poly_divmod(num, den)
    assert not any(rem)
    return tuple(int(c) for c in quo)


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_divmod(a, b):
    # b monic
    a = list(a)
    db = len(b) - 1
    if len(a) - 1 < db:
        return [0], a
    quo = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c:
            quo[i - db] = c
            for j in range(db + 1):
                a[i - db + j] -= c * b[j]
    return quo, a[:db]


def _reduce(coeffs, m: int) -> tuple[Fraction, ...]:
    phi = cyclotomic_polynomial(m)
    deg = len(phi) - 1
    a = [Fraction(c) for c in coeffs]
    for i in range(len(a) - 1, deg - 1, -1):
        c = a[i]
        if c:
            for j in range(deg + 1):
                a[i - deg + j] -= c * phi[j]
    a = a[:deg] + [Fraction(0)] * max(0, deg - len(a))
    return tuple(a)


class CyclotomicRational:
    """Element of Q(zeta_m) with exact rational coordinates."""

    __slots__ = ("order", "coords")
    __hash__ = None

    def __init__(self, order: int, coords):
        self.order = order
        self.coords = _reduce(coords, order)

    @classmethod
    def from_group_ring(cls, order: int, weights) -> CyclotomicRational:
        """Build sum_j weights[j] * zeta_m^j (weights may have any length)."""
        folded = [0] * order
        for j, w in enumerate(weights):
            folded[j % order] += w
        return cls(order, folded)

    @classmethod
    def coerce(cls, x, order: int = 1) -> CyclotomicRational:
        if isinstance(x, CyclotomicRational):
            return x if x.order == order else x._lift(math.lcm(x.order, order))
        if isinstance(x, RootOfUnity):
            m = math.lcm(x.order, order)
            w = [0] * m
            w[x.exponent * (m // x.order)] = 1
            return cls(m, w)
        if isinstance(x, (int, Rational)):
            return cls(order, [Fraction(x)])
        raise TypeError(f"cannot coerce {type(x).__name__} to a cyclotomic value")

    def _lift(self, m: int) -> CyclotomicRational:
        if m == self.order:
            return self
        step = m // self.order
        w = [Fraction(0)] * m
        for i, c in enumerate(self.coords):
            w[i * step] = c
        return CyclotomicRational(m, w)

    def _common(self, other):
        if isinstance(other, CyclotomicRational):
            m = math.lcm(self.order, other.order)
            return self._lift(m), other._lift(m)
        other = CyclotomicRational.coerce(other, self.order)
        return self._common(other)

    def __add__(self, other):
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        n = max(len(a.coords), len(b.coords))
        ca = a.coords + (Fraction(0),) * (n - len(a.coords))
        cb = b.coords + (Fraction(0),) * (n - len(b.coords))
        return CyclotomicRational(a.order, [x + y for x, y in zip(ca, cb)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicRational(self.order, [-c for c in self.coords])

    def __sub__(self, other):
        return self + (-CyclotomicRational.coerce(other, self.order))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            return CyclotomicRational(self.order, [c * other for c in self.coords])
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        return CyclotomicRational(a.order, _poly_mul(a.coords, b.coords))

    __rmul__ = __mul__

    def galois(self, j: int) -> CyclotomicRational:
        """Apply the automorphism zeta -> zeta^j (gcd(j, m) = 1)."""
        m = self.order
        w = [Fraction(0)] * m
        for i, c in enumerate(self.coords):
            w[(i * j) % m] += c
        return CyclotomicRational(m, w)

    def conjugate(self) -> CyclotomicRational:
        return self.galois(-1)

    def norm(self) -> Fraction:
        out = CyclotomicRational.coerce(1, self.order)
        for j in range(1, self.order + 1):
            if math.gcd(j, self.order) == 1:
                out = out * self.galois(j)
        value = out.rational()
        assert value is not None
        return value

    def inverse(self) -> CyclotomicRational:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        others = CyclotomicRational.coerce(1, self.order)
        for j in range(2, self.order + 1):
            if math.gcd(j, self.order) == 1:
                others = others * self.galois(j)
        n = (self * others).rational()
        return others * (1 / Fraction(n))

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self * (1 / Fraction(other))
        if isinstance(other, RootOfUnity):
            return self * other.conjugate()
        return self * CyclotomicRational.coerce(other, self.order).inverse()

    def __rtruediv__(self, other):
        return CyclotomicRational.coerce(other, self.order) * self.inverse()

    def is_zero(self) -> bool:
        return not any(self.coords)

    def rational(self) -> Fraction | None:
        """The value as a Fraction if it lies in Q, else None."""
        if any(self.coords[1:]):
            return None
        return self.coords[0] if self.coords else Fraction(0)

    def is_real(self) -> bool:
        return self == self.conjugate()

    def __eq__(self, other):
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        return (a - b).is_zero()

    def __complex__(self):
        m = self.order
        return sum((complex(c) * cmath.exp(2j * math.pi * i / m) for i, c in enumerate(self.coords) if c), 0j)

    def __float__(self):
        if not self.is_real():
            raise ValueError("value is not real")
        return complex(self).real

    def sign(self) -> int:
        """Sign of a real value; exact when rational."""
        r = self.rational()
        if r is not None:
            return (r > 0) - (r < 0)
        if not self.is_real():
            raise ValueError("sign of a non-real value")
        x = complex(self).real
        return (x > 0) - (x < 0)

    def __repr__(self):
        return f"CyclotomicRational({self.order}, {[str(c) for c in self.coords]})"


def to_exact(x):
    """Root of unity -> int when real, CyclotomicRational otherwise."""
    if isinstance(x, RootOfUnity):
        if x.order == 1:
            return 1
        if x.order == 2:
            return -1
        return CyclotomicRational.coerce(x)
    return x


def simplify(x):
    """Collapse a rational CyclotomicRational (or Fraction) to int/Fraction."""
    if isinstance(x, CyclotomicRational):
        r = x.rational()
        if r is None:
            return x
        x = r
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


def exact_sign(x) -> int:
    if isinstance(x, CyclotomicRational):
        return x.sign()
    return (x > 0) - (x < 0)


def is_real(x) -> bool:
    if isinstance(x, CyclotomicRational):
        return x.is_real()
    if isinstance(x, RootOfUnity):
        return x.is_real
    return True


def conjugate(x):
    if isinstance(x, (CyclotomicRational, RootOfUnity)):
        return x.conjugate()
    return x


def exact_div(x, y):
    """x / y with exact semantics: ints divide to int when possible."""
    x, y = to_exact(x), to_exact(y)
    if isinstance(x, int) and isinstance(y, int):
        q, r = divmod(x, y)
        return q if r == 0 else Fraction(x, y)
    if isinstance(y, CyclotomicRational) and not isinstance(x, CyclotomicRational):
        return simplify(CyclotomicRational.coerce(x, y.order) / y)
    if isinstance(x, CyclotomicRational):
        return simplify(x / y)
    return simplify(Fraction(x) / Fraction(y))
