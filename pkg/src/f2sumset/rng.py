"""SplitMix64 streams and seeded random subsets.

SplitMix64 (Steele, Lea and Flood 2014) is tiny and fully specified by its
reference code, so any language can reproduce the same streams.  The state
advances by a fixed odd constant; output ``k`` depends only on
``seed + (k + 1) * GAMMA``, which lets us draw whole blocks with numpy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .f2core import DenseSet, check_dim

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def block(self, count: int) -> np.ndarray:
        """The next ``count`` outputs as a uint64 array (same values as repeated :meth:`next`)."""
        steps = np.arange(1, count + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + steps * np.uint64(GAMMA)
            out = _mix64_array(z)
        self.state = (self.state + count * GAMMA) & MASK64
        return out

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next()
            if x < limit:
                return x % bound

    def fraction(self) -> Fraction:
        """Uniform dyadic in ``[0, 1)`` with 53 bits."""
        return Fraction(self.next() >> 11, 1 << 53)

    def child(self, index: int) -> SplitMix64:
        """Independent stream for trial ``index``, fixed by the parent seed alone."""
        return SplitMix64(mix64((self.state + (index + 1) * GAMMA) & MASK64) ^ index)


def trial_rng(seed: int, trial: int) -> SplitMix64:
    return SplitMix64(seed).child(trial)


def random_set_exact(rng: SplitMix64, n: int, card: int) -> DenseSet:
    """Uniform subset of F_2^n with exactly ``card`` elements.

    Every element receives a 64-bit key from the stream; the ``card`` smallest
    keys (ties by element) are kept.
    """
    size = 1 << check_dim(n)
    if not 0 <= card <= size:
        raise ValueError(f"cardinality {card} out of range for n={n}")
    keys = rng.block(size)
    order = np.argsort(keys, kind="stable")
    bits = np.zeros(size, dtype=bool)
    bits[order[:card]] = True
    return DenseSet(n, bits)


def random_set_bernoulli(rng: SplitMix64, n: int, p: Fraction) -> DenseSet:
    """Each element kept independently with probability ``p`` (to 2^-64)."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    size = 1 << check_dim(n)
    keys = rng.block(size)
    if p == 1:
        return DenseSet.full(n)
    threshold = np.uint64(int(p * (1 << 64)))
    return DenseSet(n, keys < threshold)


@dataclass(frozen=True)
class RandomSetSpec:
    """How to draw a random set: ``mode`` is ``"exact-card"`` or ``"bernoulli"``."""

    mode: str
    n: int
    card: int | None = None
    p: Fraction | None = None

    def draw(self, rng: SplitMix64) -> DenseSet:
        if self.mode == "exact-card":
            return random_set_exact(rng, self.n, int(self.card))
        if self.mode == "bernoulli":
            return random_set_bernoulli(rng, self.n, Fraction(self.p))
        raise ValueError(f"unknown sampling mode {self.mode!r}")
