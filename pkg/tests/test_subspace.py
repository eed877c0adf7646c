import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from f2sumset.f2core import DenseSet, popcount, popcounts, sumset
from f2sumset.subspace import (
    CosetIndex,
    Subspace,
    all_subspaces,
    coset_restrict,
    cosets,
    low_zero_vector,
    max_subspace_in,
    metsch_bound,
    metsch_witness,
    perp,
    pullback,
    pushforward,
    random_subspace,
    rref,
    subspace_of_dim_in,
)

from conftest import random_set


def span_set(vectors):
    out = {0}
    for v in vectors:
        out |= {x ^ v for x in out}
    return out


vectors = st.integers(1, 8).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(0, (1 << n) - 1), max_size=n + 2)))


@settings(max_examples=150, deadline=None)
@given(vectors)
def test_canonical_form_invariants(data):
    n, vecs = data
    v = Subspace.span(vecs, n)
    pivots = v.pivots
    assert list(pivots) == sorted(set(pivots), reverse=True)
    for r in v.basis:
        assert r.bit_length() - 1 in pivots
        assert all(not (r >> p) & 1 for p in pivots if p != r.bit_length() - 1)
    for g in v.annihilator:
        for b in v.basis:
            assert popcount(g & b) % 2 == 0
    assert v.dim + len(v.annihilator) == n
    members = span_set(vecs)
    assert {x for x in range(1 << n) if x in v} == members
    assert set(v.elements().tolist()) == members
    assert v.elements().tolist() == sorted(members)


@settings(max_examples=100, deadline=None)
@given(vectors, vectors)
def test_equal_sets_iff_equal_bases(a, b):
    (n, va), (_, vb) = a, b
    vb = [x & ((1 << n) - 1) for x in vb]
    sa, sb = Subspace.span(va, n), Subspace.span(vb, n)
    assert (sa == sb) == (span_set(va) == span_set(vb))


def test_perp_examples():
    assert perp([], 5) == Subspace.whole(5)
    assert perp([0b1001], 5).dim == 4
    v = perp([3, 5], 4)
    assert v.dim == 2
    assert {x for x in range(16) if x in v} == {
        x for x in range(16) if popcount(x & 3) % 2 == 0 and popcount(x & 5) % 2 == 0}
    assert perp([3, 5, 6], 4) == v        # rank-deficient list


def test_perp_annihilator_round_trip(rng):
    for n in range(1, 11):
        for _ in range(5):
            v = random_subspace(rng, n, rng.below(n + 1))
            assert perp(v.annihilator, n) == v
            assert perp(v.basis, n).annihilator == v.basis


def test_coset_partition(rng):
    for n in (1, 5, 10):
        v = random_subspace(rng, n, rng.below(n + 1))
        owner = np.full(1 << n, -1)
        reps = v.coset_reps()
        assert len(reps) == 1 << v.codim
        for i, w in enumerate(cosets(v)):
            members = v.elements() ^ w.rep
            assert (owner[members] == -1).all()
            owner[members] = i
            assert w.rep == members.min()
        assert (owner >= 0).all()


def test_lift_and_coordinates(rng):
    for _ in range(20):
        n = 1 + rng.below(9)
        v = random_subspace(rng, n, rng.below(n + 1))
        for y in range(1 << v.dim):
            x = v.embed(y)
            assert v.coordinates(x) == y
        gamma = rng.below(1 << v.dim) if v.dim else 0
        lifted = v.lift(gamma)
        for y in range(1 << v.dim):
            assert popcount(lifted & v.embed(y)) % 2 == popcount(gamma & y) % 2


def test_pullback_examples(rng):
    v = random_subspace(rng, 8, 5)
    assert pullback(DenseSet.full(8), v).is_full()
    assert pullback(v.indicator(), v).is_full()
    for _ in range(10):
        t = random_set(rng, 8)
        assert pushforward(pullback(t, v), v) == t & v.indicator()


def test_coset_restrict_examples(rng):
    v = random_subspace(rng, 6, 3)
    assert coset_restrict(v.indicator(), v, CosetIndex.of(v, 0)).is_full()
    w = next(c for c in cosets(v) if c.rep != 0)
    assert coset_restrict(v.indicator(), v, w).card == 0
    with pytest.raises(ValueError):
        coset_restrict(v.indicator(), v, CosetIndex(Subspace.whole(6), 0))
    with pytest.raises(ValueError):
        coset_restrict(v.indicator(), v, CosetIndex(v, w.rep ^ v.basis[0]))


def test_coset_union_identity(rng):
    for n, codim in [(8, 2), (8, 0), (8, 5), (10, 3)]:
        for _ in range(4):
            a = random_set(rng, n)
            v = random_subspace(rng, n, n - codim)
            lhs = pullback(sumset(a, a), v)
            rhs = DenseSet.empty(v.dim)
            for w in cosets(v):
                aw = coset_restrict(a, v, w)
                rhs = rhs | sumset(aw, aw)
            assert lhs == rhs


def brute_max_dim(t):
    return max(s.dim for s in all_subspaces(t.n) if s.issubset(t))


def test_all_subspaces_counts():
    # Gaussian binomial totals: 1, 2, 5, 16, 67, 374
    assert [len(all_subspaces(n)) for n in range(0, 6)] == [1, 2, 5, 16, 67, 374]


def test_max_subspace_examples():
    assert max_subspace_in(DenseSet.full(6)) == Subspace.whole(6)
    h = Subspace.span([5, 6, 24], 6)
    assert max_subspace_in(h.indicator()) == h
    t = ~DenseSet.from_elements(4, [1])
    best = max_subspace_in(t)
    assert best.dim == 3 and best.issubset(t)
    with pytest.raises(ValueError):
        max_subspace_in(DenseSet.from_elements(3, [1, 2]))


def test_max_subspace_against_enumeration(rng):
    subs = {n: all_subspaces(n) for n in range(1, 6)}
    for n in range(1, 6):
        for _ in range(12):
            t = random_set(rng, n) | DenseSet.from_elements(n, [0])
            inside = [s for s in subs[n] if s.issubset(t)]
            top = max(s.dim for s in inside)
            best = max_subspace_in(t)
            assert best.issubset(t)
            assert best.dim == top
            # lexicographically smallest greedy-minimum basis among the maximal ones
            def greedy_basis(s):
                elems = s.elements().tolist()
                basis = []
                for x in elems:
                    if x and x not in span_set(basis):
                        basis.append(x)
                return basis
            assert greedy_basis(best) == min(greedy_basis(s) for s in inside if s.dim == top)


def test_dual_bound_agrees_with_primal_search(rng):
    from f2sumset.subspace import _search
    for n in (4, 6, 8):
        for w in range(n):
            a = DenseSet(n, popcounts(n) <= w // 2)
            t = sumset(a, a)
            expect = Subspace.whole(n) if t.is_full() else Subspace.span(_search(t, None), n)
            assert max_subspace_in(t) == expect
        for _ in range(6):
            a = random_set(rng, n, 0.1) | DenseSet.from_elements(n, [0])
            t = sumset(a, a)
            expect = Subspace.whole(n) if t.is_full() else Subspace.span(_search(t, None), n)
            assert max_subspace_in(t) == expect


def test_subspace_of_dim(rng):
    t = random_set(rng, 7) | DenseSet.from_elements(7, [0])
    top = max_subspace_in(t).dim
    for d in range(top + 1):
        s = subspace_of_dim_in(t, d)
        assert s is not None and s.dim == d and s.issubset(t)
    assert subspace_of_dim_in(t, top + 1) is None


def test_low_zero_vector_examples(rng):
    assert low_zero_vector(Subspace.whole(6)) == 0b111111
    assert low_zero_vector(Subspace.span([1], 4)) == 1
    with pytest.raises(ValueError):
        low_zero_vector(Subspace.zero(4))
    for _ in range(50):
        v = random_subspace(rng, 12, 9)
        x = low_zero_vector(v)
        assert x in v
        assert 12 - popcount(x) <= 3


@settings(max_examples=100, deadline=None)
@given(vectors)
def test_low_zero_vector_property(data):
    n, vecs = data
    v = Subspace.span(vecs, n)
    if v.dim == 0:
        return
    x = low_zero_vector(v)
    assert x in v
    assert n - popcount(x) <= v.codim


def test_metsch_bound_values():
    for n in range(1, 9):
        assert metsch_bound(n, 1) == 2 ** n - 1
    # tightness at d = 1: G \ {0} meets every line
    s = ~DenseSet.from_elements(4, [0])
    assert metsch_witness(s, 1) is None


def test_metsch_witness(rng):
    from f2sumset.experiments import random_nonzero_set
    assert metsch_witness(DenseSet.empty(5), 2).dim == 2
    for _ in range(10):
        s = random_nonzero_set(rng, 8, 100)
        w = metsch_witness(s, 2)
        assert w is not None and w.dim == 2
        assert not s.bits[w.elements()].any()
    with pytest.raises(ValueError):
        metsch_witness(DenseSet.from_elements(3, [0]), 1)


def test_metsch_blocking_subspace_is_extremal():
    # a (n+1-d)-dimensional subspace minus 0 meets every d-dimensional subspace
    n, d = 6, 3
    block = Subspace.span([1, 2, 4, 8], n).indicator() & ~DenseSet.from_elements(n, [0])
    assert block.card == metsch_bound(n, d)
    assert metsch_witness(block, d) is None


def test_serialization(rng):
    v = random_subspace(rng, 10, 4)
    doc = v.to_dict()
    assert Subspace.from_dict(doc) == v
    doc["annihilator"] = doc["annihilator"][:-1]
    with pytest.raises(ValueError):
        Subspace.from_dict(doc)
