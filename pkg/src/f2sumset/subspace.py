"""GF(2) linear algebra on integer bit masks.

A :class:`Subspace` keeps its basis in reduced row-echelon form: the pivot of
a row is its highest set bit, pivots strictly decrease down the list, and no
row has a bit set at another row's pivot.  The same normal form is used for
the annihilator (a basis of the characters vanishing on the subspace), so two
subspaces are equal exactly when their stored bases are equal.

Coordinates on a subspace ``V`` of dimension ``m`` map ``y`` in F_2^m to the
XOR of the basis rows selected by the bits of ``y``, where bit ``i`` selects
the row with the ``i``-th smallest pivot.  This map is increasing in ``y``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .f2core import DenseSet, DimensionMismatch, check_dim, popcount, popcounts


def rref(vectors: Iterable[int]) -> tuple[int, ...]:
    """Reduced row-echelon basis (pivots decreasing) of the span of ``vectors``."""
    rows: list[int] = []
    for v in vectors:
        v = int(v)
        for r in rows:
            if v ^ r < v:
                v ^= r
        if v:
            # clear the new pivot from existing rows, then insert in order
            p = 1 << (v.bit_length() - 1)
            rows = [r ^ v if r & p else r for r in rows]
            rows.append(v)
            rows.sort(reverse=True)
    return tuple(rows)


def rank(vectors: Iterable[int]) -> int:
    return len(rref(vectors))


def reduce(x: int, basis: Sequence[int]) -> int:
    """Reduce ``x`` against an echelon basis; the result is the minimum of ``x + span``."""
    for r in basis:
        if x ^ r < x:
            x ^= r
    return x


def _kernel(basis: Sequence[int], n: int) -> tuple[int, ...]:
    """Basis of ``{g : parity(g & b) = 0 for all b}`` given an RREF ``basis``."""
    pivots = {r.bit_length() - 1: r for r in basis}
    out = []
    for f in range(n):
        if f in pivots:
            continue
        g = 1 << f
        for p, r in pivots.items():
            if (r >> f) & 1:
                g |= 1 << p
        out.append(g)
    return rref(out)


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of F_2^n in canonical form."""

    n: int
    basis: tuple[int, ...]
    annihilator: tuple[int, ...]

    @classmethod
    def span(cls, vectors: Iterable[int], n: int) -> Subspace:
        n = check_dim(n)
        vectors = [int(v) for v in vectors]
        if any(v < 0 or v >> n for v in vectors):
            raise ValueError(f"vector out of range for n={n}")
        basis = rref(vectors)
        return cls(n, basis, _kernel(basis, n))

    @classmethod
    def whole(cls, n: int) -> Subspace:
        return cls.span((1 << i for i in range(n)), n)

    @classmethod
    def zero(cls, n: int) -> Subspace:
        return cls.span((), n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def codim(self) -> int:
        return self.n - len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(r.bit_length() - 1 for r in self.basis)

    @property
    def coordinate_basis(self) -> tuple[int, ...]:
        """Basis rows ordered by increasing pivot (row ``i`` is coordinate ``i``)."""
        return self.basis[::-1]

    def __contains__(self, x: int) -> bool:
        x = int(x)
        return 0 <= x < (1 << self.n) and reduce(x, self.basis) == 0

    def __len__(self) -> int:
        return 1 << self.dim

    def __le__(self, other: Subspace) -> bool:
        return self.n == other.n and all(b in other for b in self.basis)

    def embed(self, y: int) -> int:
        """The element of ``V`` with coordinates ``y``."""
        x = 0
        for i, b in enumerate(self.coordinate_basis):
            if (y >> i) & 1:
                x ^= b
        return x

    def coordinates(self, x: int) -> int:
        """Inverse of :meth:`embed`; raises if ``x`` is not in ``V``."""
        if x not in self:
            raise ValueError(f"{x} is not in the subspace")
        y = 0
        for i, p in enumerate(self.pivots[::-1]):
            if (x >> p) & 1:
                y |= 1 << i
        return y

    def elements(self) -> np.ndarray:
        """``out[y] = embed(y)``; ascending since the coordinate map is monotone."""
        arr = np.zeros(1, dtype=np.int64)
        for b in self.coordinate_basis:
            arr = np.concatenate([arr, arr ^ b])
        return arr

    def indicator(self) -> DenseSet:
        bits = np.zeros(1 << self.n, dtype=bool)
        bits[self.elements()] = True
        return DenseSet(self.n, bits)

    def coset_rep(self, x: int) -> int:
        return reduce(int(x), self.basis)

    def coset_reps(self) -> np.ndarray:
        """Minimum element of every coset, ascending.

        These are exactly the elements with zeros at every pivot position.
        """
        free = [f for f in range(self.n) if f not in set(self.pivots)]
        arr = np.zeros(1, dtype=np.int64)
        for f in free:
            arr = np.concatenate([arr, arr | (1 << f)])
        return np.sort(arr)

    def lift(self, gamma: int) -> int:
        """A character of F_2^n restricting to the coordinate character ``gamma`` on ``V``."""
        out = 0
        for i, p in enumerate(self.pivots[::-1]):
            if (gamma >> i) & 1:
                out |= 1 << p
        return out

    def cut(self, character: int) -> Subspace:
        """``V`` intersected with the kernel of ``character``."""
        return perp(self.annihilator + (int(character),), self.n)

    def issubset(self, t: DenseSet) -> bool:
        if t.n != self.n:
            raise DimensionMismatch(f"dimension mismatch: {self.n} vs {t.n}")
        return bool(t.bits[self.elements()].all())

    def to_dict(self) -> dict:
        width = max(1, (self.n + 3) // 4)
        return {
            "n": self.n,
            "basis": [f"0x{b:0{width}x}" for b in self.basis],
            "annihilator": [f"0x{g:0{width}x}" for g in self.annihilator],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> Subspace:
        n = int(doc["n"])
        v = cls.span((int(b, 16) for b in doc["basis"]), n)
        if "annihilator" in doc:
            ann = rref(int(g, 16) for g in doc["annihilator"])
            if ann != v.annihilator:
                raise ValueError("annihilator does not match basis")
        return v


def perp(gammas: Iterable[int], n: int) -> Subspace:
    """``{x : parity(g & x) = 0 for every g in gammas}``."""
    n = check_dim(n)
    ann = rref(gammas)
    if any(g >> n for g in ann):
        raise ValueError(f"character mask out of range for n={n}")
    basis = _kernel(ann, n)
    return Subspace(n, basis, ann)


@dataclass(frozen=True)
class CosetIndex:
    """The coset ``rep + V``; ``rep`` is its minimum element."""

    subspace: Subspace
    rep: int

    @classmethod
    def of(cls, subspace: Subspace, x: int) -> CosetIndex:
        return cls(subspace, subspace.coset_rep(x))


def cosets(v: Subspace) -> Iterator[CosetIndex]:
    for rep in v.coset_reps().tolist():
        yield CosetIndex(v, rep)


def pullback(t: DenseSet, v: Subspace) -> DenseSet:
    """``{y in F_2^m : embed(y) in T}``."""
    if t.n != v.n:
        raise DimensionMismatch(f"dimension mismatch: {t.n} vs {v.n}")
    return DenseSet(v.dim, t.bits[v.elements()])


def pushforward(s: DenseSet, v: Subspace) -> DenseSet:
    """Image of a subset of F_2^m under the coordinate map of ``V``."""
    if s.n != v.dim:
        raise DimensionMismatch(f"set lives in dimension {s.n}, subspace has dimension {v.dim}")
    bits = np.zeros(1 << v.n, dtype=bool)
    bits[v.elements()[s.bits]] = True
    return DenseSet(v.n, bits)


def coset_restrict(a: DenseSet, v: Subspace, w: CosetIndex) -> DenseSet:
    """``(A ∩ W) - rep`` read in the coordinates of ``V``."""
    if w.subspace != v or v.coset_rep(w.rep) != w.rep:
        raise ValueError("coset index does not belong to this subspace")
    if a.n != v.n:
        raise DimensionMismatch(f"dimension mismatch: {a.n} vs {v.n}")
    return DenseSet(v.dim, a.bits[v.elements() ^ w.rep])


# ---------------------------------------------------------------------------
# subspace search

_PEEL_LIMIT = 4096


def _peel(elems: np.ndarray, size: int, min_degree: int) -> np.ndarray:
    """Drop elements with fewer than ``min_degree`` partners ``y`` such that ``x ^ y`` is kept too."""
    if min_degree <= 0:
        return elems
    while elems.size and elems.size <= _PEEL_LIMIT:
        present = np.zeros(size, dtype=bool)
        present[elems] = True
        degree = present[elems[:, None] ^ elems[None, :]].sum(axis=1)
        keep = degree >= min_degree
        if keep.all():
            break
        elems = elems[keep]
    return elems


def _search(t: DenseSet, target: int | None, cap: int | None = None) -> tuple[int, ...]:
    """Depth-first basis extension inside ``T``.

    A basis ``v1 < v2 < ...`` is explored only when each ``v_k`` is the
    minimum of its coset modulo ``span(v1..v_{k-1})``; every subspace then has
    exactly one such basis (its greedy-minimum basis), and ascending order
    visits them lexicographically.

    At a node with span ``U`` of dimension ``k``, ``full`` marks the ``y`` with
    ``y + U ⊆ T`` and ``above`` lists those exceeding the last basis vector.
    A completion ``W`` of dimension ``D`` has its part outside ``U`` inside
    ``above``, so ``above`` needs ``2^D - 2^k`` elements, each of which pairs with at least
    ``2^D - 2^(k+1)`` others of ``above`` (the rest of ``W`` outside its own
    coset of ``U``).  Elements failing the pairing count are peeled away.

    With ``target`` the first subspace of that dimension is returned (or an
    empty tuple); without it, the first one of maximum dimension, where a
    known upper bound ``cap`` ends the search as soon as it is reached.
    """
    n = t.n
    size = 1 << n
    idx = np.arange(size, dtype=np.int64)
    best: list[int] = []
    best_dim = 0 if target is None else target - 1

    def dfs(basis: list[int], full: np.ndarray, above: np.ndarray, pivmask: int) -> bool:
        nonlocal best, best_dim
        k = len(basis)
        goal = 1 << (best_dim + 1)
        above = _peel(above, size, goal - (2 << k))
        if above.size < goal - (1 << k):
            return False
        for j, x in enumerate(above.tolist()):
            goal = 1 << (best_dim + 1)
            if above.size - j < goal - (1 << k):
                break
            if x & pivmask:
                continue
            rest = above[j + 1:]
            child_above = rest[full[rest ^ x]]
            basis.append(x)
            if k + 1 > best_dim:
                best, best_dim = list(basis), k + 1
                if target is not None or best_dim == cap:
                    return True
            if (k + 1 < n and child_above.size >= (1 << (best_dim + 1)) - (2 << k)
                    and dfs(basis, full & full[idx ^ x], child_above,
                            pivmask | (1 << (x.bit_length() - 1)))):
                return True
            basis.pop()
        return False

    if target == 0:
        return ()
    dfs([], t.bits.copy(), np.flatnonzero(t.bits[1:]) + 1, 0)
    if target is not None and best_dim < target:
        return ()
    return tuple(best)


# Dual side: a subspace of codimension c avoids S = G \ T exactly when some c
# characters are jointly nonzero on every element of S.  For small c this is a
# fast exact test, and it settles the maximum dimension when S is small.

_DUAL_BUDGET = 1 << 17


def _parity_rows(s: np.ndarray, n: int) -> np.ndarray:
    """Row ``g`` is the bitset over ``s`` of the elements with odd ``<g, s>``, as uint64 words."""
    idx = np.arange(1 << n, dtype=np.int64)
    odd = (popcounts(n)[idx[:, None] & s[None, :]] & 1).astype(bool)
    pad = (-s.size) % 64
    if pad:
        odd = np.concatenate([odd, np.zeros((1 << n, pad), dtype=bool)], axis=1)
    return np.packbits(odd, axis=1, bitorder="little").view(np.uint64)


def _covers_pair(rows: np.ndarray, full: np.ndarray, firsts: np.ndarray) -> bool:
    """Whether ``rows[a] | rows[b] == full`` for some ``a`` in ``firsts`` and any ``b``."""
    for a in firsts.tolist():
        need = full & ~rows[a]
        cand = None
        for j in np.flatnonzero(need).tolist():
            col = rows[:, j] if cand is None else rows[cand, j]
            hit = (col & need[j]) == need[j]
            cand = np.flatnonzero(hit) if cand is None else cand[hit]
            if cand.size == 0:
                break
        else:
            return True
    return False


def _dual_cost(n: int, c: int) -> int:
    """Rough count of vector operations spent by :func:`_codim_avoids`."""
    return 1 << sum(n - 1 - k for k in range(c - 1))


def _codim_avoids(s: np.ndarray, n: int, c: int, chosen: tuple[int, ...] = ()) -> bool:
    """Is there a codimension-``c`` subspace (containing ``chosen^⊥``) disjoint from ``s``?

    Some character still to be chosen must be odd on the smallest remaining
    element ``s0``; it can be taken reduced modulo the characters chosen so far.
    """
    if s.size == 0:
        return True
    if c == 0:
        return False
    s0 = int(s[0])
    pivmask = 0
    for g in chosen:
        pivmask |= 1 << (g.bit_length() - 1)
    idx = np.arange(1 << n, dtype=np.int64)
    firsts = idx[((popcounts(n)[idx & s0] & 1) == 1) & ((idx & pivmask) == 0)]
    if c <= 2:
        rows = _parity_rows(s, n)
        full = np.full(rows.shape[1], ~np.uint64(0))
        tail = s.size % 64
        if tail:
            full[-1] = np.uint64((1 << tail) - 1)
        if c == 1:
            return bool(((rows[firsts] & full) == full).all(axis=1).any())
        return _covers_pair(rows, full, firsts)
    par = popcounts(n)
    for g in firsts.tolist():
        rest = s[(par[s & g] & 1) == 0]
        if _codim_avoids(rest, n, c - 1, rref(chosen + (g,))):
            return True
    return False


def max_subspace_in(t: DenseSet) -> Subspace:
    """A subspace of maximum dimension contained in ``T``.

    Among maximal ones, the one whose greedy-minimum basis is lexicographically
    smallest is returned.  Exponential in the worst case; meant for n <= 14.
    The dimension is settled on the dual side when few characters suffice,
    otherwise the primal search runs to completion.
    """
    if not t.bits[0]:
        raise ValueError("T must contain 0 to contain a subspace")
    if t.is_full():
        return Subspace.whole(t.n)
    n = t.n
    s = np.flatnonzero(~t.bits).astype(np.int64)
    cap = t.card.bit_length() - 1          # 2^D elements are needed
    for c in range(max(1, n - cap), n + 1):
        if _dual_cost(n, c) > _DUAL_BUDGET:
            break
        if _codim_avoids(s, n, c):
            return Subspace.span(_search(t, n - c), n)
        cap = n - c - 1
    if cap <= 0:
        return Subspace.zero(n)
    return Subspace.span(_search(t, None, cap), n)


def subspace_of_dim_in(t: DenseSet, d: int) -> Subspace | None:
    """First subspace of dimension ``d`` inside ``T`` in the same order, or None."""
    if not t.bits[0]:
        raise ValueError("T must contain 0 to contain a subspace")
    if d < 0 or d > t.n:
        return None
    if d == 0:
        return Subspace.zero(t.n)
    found = _search(t, d)
    return Subspace.span(found, t.n) if found else None


def all_subspaces(n: int) -> list[Subspace]:
    """Every subspace of F_2^n by breadth-first extension (n <= 6)."""
    seen = {rref(())}
    frontier = [()]
    while frontier:
        nxt = []
        for basis in frontier:
            for x in range(1, 1 << n):
                if reduce(x, basis) == 0:
                    continue
                b = rref(basis + (x,))
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return sorted((Subspace.span(b, n) for b in seen), key=lambda s: (s.dim, s.basis))


# ---------------------------------------------------------------------------
# linear-algebra procedures

def low_zero_vector(v: Subspace) -> int:
    """A vector of ``V`` with at most ``codim(V)`` zero coordinates.

    Picks the leftmost ``dim(V)`` coordinate positions whose columns in the
    basis matrix are independent and solves for a combination equal to 1 at
    each of them.
    """
    m = v.dim
    if m == 0:
        raise ValueError("trivial subspace has no low-zero witness")
    rows = v.coordinate_basis
    chosen: list[tuple[int, int]] = []  # (column mask over rows, rhs)
    echelon: list[int] = []
    for j in range(v.n):
        col = 0
        for i, r in enumerate(rows):
            if (r >> j) & 1:
                col |= 1 << i
        red = col
        for e in echelon:
            if red ^ e < red:
                red ^= e
        if red:
            echelon.append(red)
            echelon.sort(reverse=True)
            chosen.append((col, 1))
            if len(chosen) == m:
                break
    # Gauss-Jordan on the m x m system over GF(2)
    eqs = [list(e) for e in chosen]
    for i in range(m):
        bit = 1 << i
        piv = next(k for k in range(i, m) if eqs[k][0] & bit)
        eqs[i], eqs[piv] = eqs[piv], eqs[i]
        for k in range(m):
            if k != i and eqs[k][0] & bit:
                eqs[k][0] ^= eqs[i][0]
                eqs[k][1] ^= eqs[i][1]
    lam = 0
    for i in range(m):
        if eqs[i][1]:
            lam |= 1 << i
    return v.embed(lam)


def zeros(x: int, n: int) -> int:
    return n - popcount(x)


def metsch_bound(n: int, d: int) -> int:
    """Minimum size of a set in F_2^n \\ {0} meeting every d-dimensional subspace."""
    if not 1 <= d <= n:
        raise ValueError(f"need 1 <= d <= n, got d={d}, n={n}")
    return (1 << (n + 1 - d)) - 1


def metsch_witness(s: DenseSet, d: int) -> Subspace | None:
    """A d-dimensional subspace disjoint from ``S``, or None if ``S`` blocks them all."""
    if s.bits[0]:
        raise ValueError("S must not contain 0")
    return subspace_of_dim_in(~s, d)


def random_subspace(rng, n: int, dim: int) -> Subspace:
    """Subspace spanned by random vectors until the requested dimension is hit."""
    if not 0 <= dim <= n:
        raise ValueError(f"dimension {dim} out of range for n={n}")
    basis: tuple[int, ...] = ()
    while len(basis) < dim:
        x = rng.below(1 << n)
        if reduce(x, basis):
            basis = rref(basis + (x,))
    return Subspace.span(basis, n)
