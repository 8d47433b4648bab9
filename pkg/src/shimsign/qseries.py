"""Truncated q-series with exact integer coefficients.

A series carries an ``offset24`` (the power of q^{1/24} in front) and dense
coefficients for integer q-powers 0..T. Products use Kronecker substitution:
both operands are packed into one big integer, multiplied with GMP, and
unpacked with signed-digit carries. ``naive_mul`` is the O(T^2) convolution
kept as an independent check.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

try:
    import gmpy2

    _mpz = gmpy2.mpz
except ImportError:  # pragma: no cover
    _mpz = int

CACHE_VERSION = 1
CACHE_MAGIC = "shimsign-qseries"

# below this length the schoolbook product beats packing overhead
_NAIVE_CUTOFF = 64


@dataclass(frozen=True)
class QSeries:
    offset24: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a series needs at least one coefficient")

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_coeffs(cls, coeffs, T: int | None = None, offset24: int = 0) -> QSeries:
        coeffs = [int(c) for c in coeffs]
        if T is not None:
            coeffs = (coeffs + [0] * (T + 1))[: T + 1]
        return cls(offset24, tuple(coeffs))

    @classmethod
    def one(cls, T: int) -> QSeries:
        return cls.from_coeffs([1], T)

    def __getitem__(self, i: int) -> int:
        if i < 0 or i > self.truncation:
            raise IndexError(f"index {i} outside 0..{self.truncation}")
        return self.coeffs[i]

    def __len__(self):
        return len(self.coeffs)

    def __mul__(self, other: QSeries) -> QSeries:
        return mul(self, other)

    def __pow__(self, r: int) -> QSeries:
        return pow_series(self, r)

    def exponent_shift(self) -> int:
        """Integer q-power of index 0; rejects fractional offsets."""
        if self.offset24 % 24:
            raise ValueError(f"offset {self.offset24}/24 is not an integral q-power")
        return self.offset24 // 24

    def coefficient(self, exponent: int) -> int:
        """Coefficient of q^exponent (integral offsets only)."""
        return self[exponent - self.exponent_shift()]

    def table(self) -> list[int]:
        """List indexed by true exponent 0..(shift + T); entries below the shift are 0."""
        shift = self.exponent_shift()
        if shift < 0:
            raise ValueError("negative leading exponent has no table form")
        return [0] * shift + list(self.coeffs)


def _check_same(a: QSeries, b: QSeries) -> None:
    if a.truncation != b.truncation:
        raise ValueError(f"truncation mismatch: {a.truncation} vs {b.truncation}")


def naive_mul(a: QSeries, b: QSeries) -> QSeries:
    _check_same(a, b)
    T = a.truncation
    out = [0] * (T + 1)
    bc = b.coeffs
    for i, x in enumerate(a.coeffs):
        if x:
            for j in range(T + 1 - i):
                y = bc[j]
                if y:
                    out[i + j] += x * y
    return QSeries(a.offset24 + b.offset24, tuple(out))


def _pack(coeffs, nbytes: int):
    pos = b"".join((c if c > 0 else 0).to_bytes(nbytes, "little") for c in coeffs)
    neg = b"".join((-c if c < 0 else 0).to_bytes(nbytes, "little") for c in coeffs)
    return _mpz(int.from_bytes(pos, "little")) - _mpz(int.from_bytes(neg, "little"))


def _unpack(value, nbytes: int, count: int) -> list[int]:
    bits = 8 * nbytes
    raw = int(value % (_mpz(1) << (bits * count))).to_bytes(nbytes * count, "little")
    half, full = 1 << (bits - 1), 1 << bits
    out = []
    carry = 0
    for i in range(count):
        x = int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") + carry
        if x >= half:
            x -= full
            carry = 1
        else:
            carry = 0
        out.append(x)
    return out


def mul(a: QSeries, b: QSeries) -> QSeries:
    _check_same(a, b)
    T = a.truncation
    if T < _NAIVE_CUTOFF:
        return naive_mul(a, b)
    ma = max(abs(c) for c in a.coeffs)
    mb = max(abs(c) for c in b.coeffs)
    if ma == 0 or mb == 0:
        return QSeries(a.offset24 + b.offset24, (0,) * (T + 1))
    # every output coefficient is bounded by (T + 1) * max|a| * max|b|
    bits = ma.bit_length() + mb.bit_length() + (T + 1).bit_length() + 2
    nbytes = (bits + 7) // 8
    prod = _pack(a.coeffs, nbytes) * _pack(b.coeffs, nbytes)
    return QSeries(a.offset24 + b.offset24, tuple(_unpack(prod, nbytes, T + 1)))


def pow_series(a: QSeries, r: int) -> QSeries:
    if r < 1:
        raise ValueError(f"power must be >= 1, got {r}")
    result = None
    base = a
    while r:
        if r & 1:
            result = base if result is None else mul(result, base)
        r >>= 1
        if r:
            base = mul(base, base)
    return result


def _pentagonal_exponents(limit: int):
    """(exponent, sign) for prod(1 - q^n) = sum_k (-1)^k q^{k(3k-1)/2}, exponent <= limit."""
    yield 0, 1
    k = 1
    while True:
        e1 = k * (3 * k - 1) // 2
        e2 = k * (3 * k + 1) // 2
        if e1 > limit:
            break
        sign = -1 if k % 2 else 1
        yield e1, sign
        if e2 <= limit:
            yield e2, sign
        k += 1


def dedekind_eta(m: int, T: int) -> QSeries:
    """eta(m z) = q^{m/24} prod_{n>=1} (1 - q^{m n}), truncated at q-index T."""
    if m < 1 or T < 1:
        raise ValueError("need m >= 1 and T >= 1")
    out = [0] * (T + 1)
    for e, s in _pentagonal_exponents(T // m):
        out[e * m] = s
    return QSeries(m, tuple(out))


def theta(T: int) -> QSeries:
    if T < 1:
        raise ValueError("need T >= 1")
    out = [0] * (T + 1)
    out[0] = 1
    for n in range(1, math.isqrt(T) + 1):
        out[n * n] = 2
    return QSeries(0, tuple(out))


def eta_quotient(exponents: dict[int, int], T: int) -> QSeries:
    """prod_m eta(m z)^{r_m} for nonnegative r_m."""
    if any(r < 0 for r in exponents.values()):
        raise ValueError("only holomorphic (nonnegative) eta products are supported")
    result = QSeries.one(T)
    for m, r in sorted(exponents.items()):
        if r:
            result = mul(result, pow_series(dedekind_eta(m, T), r))
    return result


def delta(T: int) -> QSeries:
    """Delta = eta^24 = q prod (1 - q^n)^24; index i holds tau(i + 1)."""
    return pow_series(dedekind_eta(1, T), 24)


def tau_table(T: int) -> list[int]:
    """[0, tau(1), ..., tau(T)]."""
    if T < 1:
        raise ValueError("need T >= 1")
    return delta(T - 1).table() if T > 1 else [0, 1]


# -- disk cache -----------------------------------------------------------


def _body_digest(lines) -> str:
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode())
        h.update(b"\n")
    return h.hexdigest()


def cache_path(cache_dir, constructor: str, params: dict) -> Path:
    tag = "-".join(f"{k}{v}" for k, v in sorted(params.items()))
    name = f"{constructor}-{tag}.qs" if tag else f"{constructor}.qs"
    return Path(cache_dir) / name


def write_cache(path, series: QSeries, constructor: str, params: dict) -> None:
    body = [str(c) for c in series.coeffs]
    header = [
        f"# {CACHE_MAGIC} v{CACHE_VERSION}",
        f"# constructor: {constructor}",
        f"# params: {json.dumps(params, sort_keys=True)}",
        f"# offset24: {series.offset24}",
        f"# truncation: {series.truncation}",
        f"# sha256: {_body_digest(body)}",
    ]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        fh.write("\n".join(header + body) + "\n")
    os.replace(tmp, path)


class CacheError(ValueError):
    pass


def read_cache_header(path) -> dict:
    meta = {}
    with open(path) as fh:
        first = fh.readline().strip()
        if not first.startswith(f"# {CACHE_MAGIC} v"):
            raise CacheError(f"{path}: not a series cache")
        meta["version"] = int(first.rsplit("v", 1)[1])
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition(": ")
            meta[key] = value
    meta["params"] = json.loads(meta.get("params", "{}"))
    meta["offset24"] = int(meta["offset24"])
    meta["truncation"] = int(meta["truncation"])
    return meta


def read_cache(path, verify: bool = True) -> tuple[QSeries, dict]:
    meta = read_cache_header(path)
    if meta["version"] != CACHE_VERSION:
        raise CacheError(f"{path}: cache version {meta['version']} != {CACHE_VERSION}")
    with open(path) as fh:
        body = [line.rstrip("\n") for line in fh if not line.startswith("#")]
    if len(body) != meta["truncation"] + 1:
        raise CacheError(f"{path}: expected {meta['truncation'] + 1} coefficients, found {len(body)}")
    if verify and _body_digest(body) != meta["sha256"]:
        raise CacheError(f"{path}: checksum mismatch")
    return QSeries(meta["offset24"], tuple(int(x) for x in body)), meta


def cached_delta(cache_dir, T: int) -> QSeries:
    """delta(T) served from ``cache_dir``; larger caches are truncated, smaller ones rebuilt."""
    path = cache_path(cache_dir, "delta", {})
    if path.exists():
        series, meta = read_cache(path)
        if meta["truncation"] >= T:
            return QSeries(series.offset24, series.coeffs[: T + 1])
    series = delta(T)
    write_cache(path, series, "delta", {})
    return series
