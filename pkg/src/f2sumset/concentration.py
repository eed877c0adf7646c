"""Hamming balls on the cube and their transport to F_2^n through a basis."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .f2core import DenseSet, _translated, density
from .subspace import rank

SLACK = 1e-12


@dataclass(frozen=True)
class BasisSet:
    """A basis ``e_1..e_n`` of F_2^n; ``with_zero`` is ``F = E ∪ {0}``."""

    n: int
    vectors: tuple[int, ...]

    def __post_init__(self):
        if len(self.vectors) != self.n or rank(self.vectors) != self.n:
            raise ValueError("vectors do not form a basis")

    @classmethod
    def standard(cls, n: int) -> BasisSet:
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def random(cls, rng, n: int) -> BasisSet:
        vecs: list[int] = []
        while len(vecs) < n:
            x = rng.below(1 << n)
            if rank(vecs + [x]) == len(vecs) + 1:
                vecs.append(x)
        return cls(n, tuple(vecs))

    @property
    def with_zero(self) -> tuple[int, ...]:
        return (0,) + self.vectors

    def phi_table(self) -> np.ndarray:
        """``table[x] = x_1 e_1 + ... + x_n e_n`` for every cube point ``x``."""
        arr = np.zeros(1, dtype=np.int64)
        for e in self.vectors:
            arr = np.concatenate([arr, arr ^ e])
        return arr

    def is_standard(self) -> bool:
        return self.vectors == tuple(1 << i for i in range(self.n))


def ham_ball(a: DenseSet, r: int) -> DenseSet:
    """Points of the cube within Hamming distance ``r`` of ``A``."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    n = a.n
    cur = a.bits
    for _ in range(min(r, n)):
        cube = cur.reshape((2,) * n) if n else cur
        nxt = cur.copy()
        for axis in range(n):
            nxt |= np.flip(cube, axis=axis).reshape(-1)
        if np.array_equal(nxt, cur):
            break
        cur = nxt
    return DenseSet(n, cur)


def basis_expand(a: DenseSet, basis: BasisSet, r: int) -> DenseSet:
    """``A + rF`` by ``r`` successive sumsets with ``F = E ∪ {0}``."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    if basis.n != a.n:
        raise ValueError("basis and set disagree on n")
    cur = a.bits
    for _ in range(min(r, a.n)):
        nxt = cur.copy()
        for e in basis.vectors:
            nxt |= _translated(cur, a.n, e)
        if np.array_equal(nxt, cur):
            break
        cur = nxt
    return DenseSet(a.n, cur)


def transported_ball(a: DenseSet, basis: BasisSet, r: int) -> DenseSet:
    """``phi_E(Ham_r(phi_E^{-1}(A)))``."""
    table = basis.phi_table()
    cube = DenseSet(a.n, a.bits[table])
    ball = ham_ball(cube, r)
    bits = np.zeros_like(a.bits)
    bits[table[ball.bits]] = True
    return DenseSet(a.n, bits)


def concentration_rhs(n: int, r: int, p: Fraction) -> float:
    return 1.0 - math.exp(-r * r / (2.0 * n)) / float(p)


@dataclass(frozen=True)
class ConcentrationCheck:
    lhs: Fraction
    rhs: float
    holds: bool


def _check(expanded: DenseSet, a: DenseSet, r: int) -> ConcentrationCheck:
    lhs = density(expanded)
    rhs = concentration_rhs(a.n, r, density(a))
    return ConcentrationCheck(lhs, rhs, lhs >= Fraction(rhs) - Fraction(SLACK))


def mcdiarmid_check(a: DenseSet, r: int) -> ConcentrationCheck:
    """``P(Ham_r(A)) >= 1 - exp(-r^2/2n) / P(A)`` with exact left side."""
    if a.card == 0:
        raise ValueError("A must be nonempty")
    return _check(ham_ball(a, r), a, r)


def basis_concentration_check(a: DenseSet, basis: BasisSet, r: int) -> ConcentrationCheck:
    """The same inequality for ``A + rF``."""
    if a.card == 0:
        raise ValueError("A must be nonempty")
    return _check(basis_expand(a, basis, r), a, r)
