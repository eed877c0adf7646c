"""Dense subsets of F_2^n, exact Walsh-Hadamard spectra, sumsets and convolution.

Elements of F_2^n are integers in ``[0, 2**n)``; bit ``i`` is the coordinate
along the i-th standard basis vector and addition is XOR.  A :class:`DenseSet`
holds the indicator as a read-only numpy bool array indexed by element.

Everything in this module is exact: densities are :class:`fractions.Fraction`
values with power-of-two denominators and spectra are integer arrays.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

import numpy as np

MAX_DIM = 28
BINARY_MAGIC = b"F2SET\x00\x00\x00"

# translate-and-OR beats the three transforms of the spectral route below this
_TRANSLATE_CUTOFF = 48


class CapacityError(ValueError):
    """Raised when a dimension exceeds the dense representation limit."""


class DimensionMismatch(ValueError):
    pass


def check_dim(n: int) -> int:
    n = int(n)
    if n < 0:
        raise ValueError(f"dimension must be non-negative, got {n}")
    if n > MAX_DIM:
        raise CapacityError(f"n={n} exceeds dense capacity (n <= {MAX_DIM})")
    return n


def popcount(x: int) -> int:
    return bin(x).count("1")


def parity(x: int) -> int:
    return popcount(x) & 1


def pairing(mask: int, x: int) -> int:
    """Value of the character ``mask`` at ``x``: +1 or -1."""
    return -1 if parity(mask & x) else 1


def popcounts(n: int) -> np.ndarray:
    """Hamming weight of every element of F_2^n, as an int64 array."""
    w = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        w = np.concatenate([w, w + 1])
    return w


# ---------------------------------------------------------------------------
# dyadic rationals

def is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


def dyadic_str(q: Fraction) -> str:
    """Format a dyadic rational as ``"numerator/2^k"`` (``k`` minimal)."""
    q = Fraction(q)
    if not is_dyadic(q):
        raise ValueError(f"{q} is not a dyadic rational")
    k = q.denominator.bit_length() - 1
    return f"{q.numerator}/2^{k}"


def parse_dyadic(text: str) -> Fraction:
    """Inverse of :func:`dyadic_str`; also accepts plain ``p/q`` and integers."""
    text = text.strip()
    if "/2^" in text:
        num, k = text.split("/2^")
        return Fraction(int(num), 1 << int(k))
    return Fraction(text)


# ---------------------------------------------------------------------------
# sets

class DenseSet:
    """A subset of F_2^n stored as a bool array of length ``2**n``."""

    __slots__ = ("n", "bits", "card")

    def __init__(self, n: int, bits: np.ndarray):
        n = check_dim(n)
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} bits, got shape {bits.shape}")
        if bits.flags.writeable:
            bits = bits.copy()
            bits.flags.writeable = False
        self.n = n
        self.bits = bits
        self.card = int(np.count_nonzero(bits))

    # constructors -------------------------------------------------------
    @classmethod
    def empty(cls, n: int) -> DenseSet:
        return cls(n, np.zeros(1 << check_dim(n), dtype=bool))

    @classmethod
    def full(cls, n: int) -> DenseSet:
        return cls(n, np.ones(1 << check_dim(n), dtype=bool))

    @classmethod
    def from_elements(cls, n: int, elements: Iterable[int]) -> DenseSet:
        bits = np.zeros(1 << check_dim(n), dtype=bool)
        elems = np.fromiter((int(x) for x in elements), dtype=np.int64)
        if elems.size:
            if elems.min() < 0 or elems.max() >= (1 << n):
                raise ValueError(f"element out of range for n={n}")
            bits[elems] = True
        return cls(n, bits)

    # queries ------------------------------------------------------------
    def elements(self) -> np.ndarray:
        """Members in ascending order."""
        return np.flatnonzero(self.bits)

    def __len__(self) -> int:
        return self.card

    def __contains__(self, x: int) -> bool:
        return member(self, x)

    def __iter__(self):
        return iter(int(x) for x in self.elements())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DenseSet):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.n, self.bits.tobytes()))

    def __repr__(self) -> str:
        return f"DenseSet(n={self.n}, card={self.card})"

    def issubset(self, other: DenseSet) -> bool:
        _same_dim(self, other)
        return not np.any(self.bits & ~other.bits)

    def is_full(self) -> bool:
        return self.card == (1 << self.n)

    def translate(self, t: int) -> DenseSet:
        """The set ``t + A``."""
        return DenseSet(self.n, _translated(self.bits, self.n, t))

    # set algebra as operators
    def __and__(self, other: DenseSet) -> DenseSet:
        return intersect(self, other)

    def __or__(self, other: DenseSet) -> DenseSet:
        return union(self, other)

    def __invert__(self) -> DenseSet:
        return complement(self)

    def __add__(self, other: DenseSet) -> DenseSet:
        return sumset(self, other)


def _same_dim(a: DenseSet, b: DenseSet) -> None:
    if a.n != b.n:
        raise DimensionMismatch(f"dimension mismatch: {a.n} vs {b.n}")


def _translated(bits: np.ndarray, n: int, t: int) -> np.ndarray:
    """``out[x] = bits[x ^ t]`` via axis flips of the (2,)*n view."""
    if t == 0 or n == 0:
        return bits
    axes = tuple(n - 1 - i for i in range(n) if (t >> i) & 1)
    return np.flip(bits.reshape((2,) * n), axis=axes).reshape(-1)


def complement(a: DenseSet) -> DenseSet:
    return DenseSet(a.n, ~a.bits)


def intersect(a: DenseSet, b: DenseSet) -> DenseSet:
    _same_dim(a, b)
    return DenseSet(a.n, a.bits & b.bits)


def union(a: DenseSet, b: DenseSet) -> DenseSet:
    _same_dim(a, b)
    return DenseSet(a.n, a.bits | b.bits)


def difference(a: DenseSet, b: DenseSet) -> DenseSet:
    _same_dim(a, b)
    return DenseSet(a.n, a.bits & ~b.bits)


def member(a: DenseSet, x: int) -> bool:
    x = int(x)
    return 0 <= x < len(a.bits) and bool(a.bits[x])


def density(a: DenseSet) -> Fraction:
    """Exact density ``|A| / 2**n``."""
    return Fraction(a.card, 1 << a.n)


def sumset(a: DenseSet, b: DenseSet) -> DenseSet:
    """``{x ^ y : x in A, y in B}``.

    Small summands are handled by OR-ing translates of the larger set; large
    ones by the support of the integer convolution.
    """
    _same_dim(a, b)
    n = a.n
    if a.card == 0 or b.card == 0:
        return DenseSet.empty(n)
    small, large = (a, b) if a.card <= b.card else (b, a)
    if small.card + large.card > (1 << n):
        # pigeonhole: x + B meets A for every x
        return DenseSet.full(n)
    if small.card <= _TRANSLATE_CUTOFF:
        acc = np.zeros(1 << n, dtype=bool)
        for t in small.elements():
            acc |= _translated(large.bits, n, int(t))
            if acc.all():
                break
        return DenseSet(n, acc)
    counts = _convolution_counts(a.bits.astype(np.int64), b.bits.astype(np.int64), n)
    return DenseSet(n, counts != 0)


def sumset_bruteforce(a: DenseSet, b: DenseSet) -> DenseSet:
    """Definition-level double loop; test oracle only."""
    _same_dim(a, b)
    out = set()
    for x in a.elements().tolist():
        for y in b.elements().tolist():
            out.add(x ^ y)
    return DenseSet.from_elements(a.n, out)


# ---------------------------------------------------------------------------
# Walsh-Hadamard transform

def _butterfly(values: np.ndarray) -> np.ndarray:
    a = values.copy()
    size = a.shape[0]
    h = 1
    while h < size:
        b = a.reshape(-1, 2, h)
        lo = b[:, 0, :].copy()
        hi = b[:, 1, :]
        b[:, 0, :] += hi
        lo -= hi
        b[:, 1, :] = lo
        h <<= 1
    return a


def _as_integer_array(f, m: int) -> np.ndarray:
    arr = np.asarray(f)
    if arr.shape != (1 << m,):
        raise ValueError(f"expected length {1 << m}, got shape {arr.shape}")
    if arr.dtype == bool:
        return arr.astype(np.int64)
    if arr.dtype == object:
        return arr
    if not np.issubdtype(arr.dtype, np.integer):
        raise TypeError("transform input must be integer valued")
    arr = arr.astype(np.int64)
    # partial sums are bounded by 2^m * max|f|; promote before int64 can overflow
    peak = int(np.abs(arr).max()) if arr.size else 0
    if peak and peak.bit_length() + m >= 63:
        return arr.astype(object)
    return arr


@dataclass(frozen=True)
class Spectrum:
    """Unnormalized spectrum: ``raw[g] = sum_x f(x) * (-1)**<g, x>``."""

    m: int
    raw: np.ndarray

    def coefficient(self, gamma: int) -> Fraction:
        """Normalized coefficient ``raw[gamma] / 2**m``."""
        return Fraction(int(self.raw[gamma]), 1 << self.m)

    def energy(self) -> int:
        return int(sum(int(v) * int(v) for v in self.raw.tolist()))


def wht(f, m: int | None = None) -> Spectrum:
    """Exact fast Walsh-Hadamard transform of an integer function on F_2^m.

    Accepts a :class:`DenseSet` (its indicator) or an integer array of length
    ``2**m``.  Runs the in-place butterfly in ``m * 2**m`` additions.
    """
    if isinstance(f, DenseSet):
        m, values = f.n, f.bits.astype(np.int64)
    else:
        values = np.asarray(f)
        if m is None:
            m = int(values.shape[0]).bit_length() - 1
        check_dim(m)
        values = _as_integer_array(values, m)
    return Spectrum(m, _butterfly(values))


def inverse_wht(raw: np.ndarray) -> np.ndarray:
    """Inverse of the unnormalized transform; exact, raises if not divisible."""
    size = raw.shape[0]
    twice = _butterfly(raw)
    if raw.dtype == object:
        if any(int(v) % size for v in twice.tolist()):
            raise ValueError("input is not the spectrum of an integer function")
        return np.array([int(v) // size for v in twice.tolist()], dtype=object)
    if np.any(twice % size):
        raise ValueError("input is not the spectrum of an integer function")
    return twice // size


def _convolution_counts(f: np.ndarray, g: np.ndarray, m: int) -> np.ndarray:
    """``counts[x] = sum_y f(y) g(x ^ y)`` via pointwise spectral product.

    For 0/1 inputs the true intermediate values stay below 2^(2m) <= 2^56, so
    int64 wrap-around in the product cannot corrupt the result.
    """
    fa = _as_integer_array(f, m)
    ga = _as_integer_array(g, m)
    if fa.dtype == object or ga.dtype == object:
        fa, ga = fa.astype(object), ga.astype(object)
    else:
        pf = int(np.abs(fa).max(initial=0))
        pg = int(np.abs(ga).max(initial=0))
        if pf and pg and pf.bit_length() + pg.bit_length() + 2 * m >= 63:
            fa, ga = fa.astype(object), ga.astype(object)
    prod = _butterfly(fa) * _butterfly(ga)
    return inverse_wht(prod)


@dataclass(frozen=True)
class DyadicFunction:
    """A function on F_2^m with values ``numerators[x] / 2**m``."""

    m: int
    numerators: np.ndarray

    def __getitem__(self, x: int) -> Fraction:
        return Fraction(int(self.numerators[x]), 1 << self.m)

    def support(self) -> DenseSet:
        return DenseSet(self.m, self.numerators != 0)

    def values(self) -> list[Fraction]:
        return [Fraction(int(v), 1 << self.m) for v in self.numerators.tolist()]


def convolve(f, g, m: int | None = None) -> DyadicFunction:
    """``(f * g)(x) = E_y f(y) g(x ^ y)`` with exact dyadic values."""
    if isinstance(f, DenseSet) and isinstance(g, DenseSet):
        _same_dim(f, g)
        m = f.n
        fa, ga = f.bits.astype(np.int64), g.bits.astype(np.int64)
    else:
        fa = f.bits if isinstance(f, DenseSet) else np.asarray(f)
        ga = g.bits if isinstance(g, DenseSet) else np.asarray(g)
        if fa.shape != ga.shape:
            raise DimensionMismatch("convolution operands differ in length")
        if m is None:
            m = int(fa.shape[0]).bit_length() - 1
        check_dim(m)
    return DyadicFunction(m, _convolution_counts(fa, ga, m))


# ---------------------------------------------------------------------------
# serialization

def set_to_dict(a: DenseSet) -> dict:
    return {"n": a.n, "elements": a.elements().tolist()}


def set_from_dict(doc: dict) -> DenseSet:
    try:
        n = int(doc["n"])
        elements = [int(x) for x in doc["elements"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed set document: {exc}") from exc
    if any(b <= a for a, b in zip(elements, elements[1:])):
        raise ValueError("set elements must be sorted and duplicate-free")
    return DenseSet.from_elements(n, elements)


def set_to_bytes(a: DenseSet) -> bytes:
    packed = np.packbits(a.bits, bitorder="little")
    return BINARY_MAGIC + bytes([a.n]) + packed.tobytes()


def set_from_bytes(data: bytes) -> DenseSet:
    if not data.startswith(BINARY_MAGIC) or len(data) < len(BINARY_MAGIC) + 1:
        raise ValueError("not an F2SET binary document")
    n = check_dim(data[len(BINARY_MAGIC)])
    body = np.frombuffer(data[len(BINARY_MAGIC) + 1:], dtype=np.uint8)
    if body.size != ((1 << n) + 7) // 8:
        raise ValueError(f"binary set body has {body.size} bytes, expected {((1 << n) + 7) // 8}")
    bits = np.unpackbits(body, bitorder="little")[: 1 << n].astype(bool)
    return DenseSet(n, bits)


def load_set(path: str | Path) -> DenseSet:
    path = Path(path)
    data = path.read_bytes()
    if data.startswith(BINARY_MAGIC):
        return set_from_bytes(data)
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ValueError(f"{path}: malformed set file: {exc}") from exc
    return set_from_dict(doc)


def save_set(a: DenseSet, path: str | Path, binary: bool = False) -> None:
    path = Path(path)
    if binary:
        path.write_bytes(set_to_bytes(a))
    else:
        path.write_text(json.dumps(set_to_dict(a)) + "\n")
