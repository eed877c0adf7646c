import copy
import math
from fractions import Fraction

import pytest

from f2sumset.f2core import DenseSet, density, popcounts, sumset
from f2sumset.increment import (
    FinderError,
    FinderReport,
    Stopping,
    codim_bound,
    contraction_factor,
    find_subspace,
    iteration_step,
    metsch_step_bound,
    verify_report,
)
from f2sumset.rng import random_set_exact, trial_rng
from f2sumset.subspace import Subspace, max_subspace_in

from conftest import hyperplane, random_set


def float_bound(n, alpha):
    # ceil(n / log2((2 - 2a) / (1 - 2a))) away from integer boundaries
    x = n / math.log2((2 - 2 * alpha) / (1 - 2 * alpha))
    assert abs(x - round(x)) > 1e-9
    return math.ceil(x)


def ball(n, w):
    return DenseSet(n, popcounts(n) <= w)


def structured_sets(rng, n):
    """Sets whose sumsets miss a noticeable part of the group."""
    yield ball(n, n // 3)
    yield ball(n, (n - 1) // 2)
    h = hyperplane(n, (1 << n) - 1)
    yield h & random_set(rng, n, 0.7) | DenseSet.from_elements(n, [0])
    quarter = Subspace.span(range(1, 1 << (n - 2)), n).indicator()
    yield quarter | quarter.translate(1 << (n - 1)) & random_set(rng, n, 0.5)


def test_codim_bound_examples():
    assert codim_bound(16, Fraction(1, 4)) == 11
    assert codim_bound(12, Fraction(1, 4)) == 8
    assert codim_bound(5, Fraction(1, 2)) == 1
    assert codim_bound(5, Fraction(3, 4)) == 0
    assert codim_bound(9, Fraction(1, 8)) == float_bound(9, 1 / 8)
    with pytest.raises(ValueError):
        codim_bound(4, Fraction(0))


def test_codim_bound_matches_ceiling_formula():
    for n in range(1, 29):
        for k in range(1, 64):
            alpha = Fraction(k, 128)
            assert codim_bound(n, alpha) == float_bound(n, k / 128)
            assert codim_bound(n, alpha) <= n


def test_found_dimension_grows_linearly_in_alpha():
    for n in (8, 12, 16, 20, 28):
        for k in range(1, 64):
            alpha = Fraction(k, 128)
            assert n - codim_bound(n, alpha) >= float(alpha) * n / math.log(2) - 2


def test_metsch_step_bound():
    r = contraction_factor(Fraction(1, 4))
    assert metsch_step_bound(8, Fraction(1, 4), 3) is None
    for n, d in [(8, 1), (12, 2), (16, 3)]:
        i = metsch_step_bound(n, Fraction(1, 4), d)
        assert i is not None and i <= codim_bound(n, Fraction(1, 4))
        assert 2 ** (n - i) * r ** i < 2 ** (n - i + 1 - d) - 1
        if i:
            j = i - 1
            assert not 2 ** (n - j) * r ** j < 2 ** (n - j + 1 - d) - 1


def test_stopping_parse():
    assert Stopping.parse("plain").rule == "plain"
    assert Stopping.parse("metsch:3") == Stopping.parse("metsch(3)")
    assert str(Stopping.parse("metsch:2")) == "metsch(2)"
    for bad in ("metsch:0", "greedy", "metsch:x"):
        with pytest.raises(ValueError):
            Stopping.parse(bad)


def test_hyperplane_step():
    # A = H_gamma \ {0}, so A + A = H_gamma and S is the other coset
    n, gamma = 6, 0b100101
    a = hyperplane(n, gamma) & ~DenseSet.from_elements(n, [0])
    aa = sumset(a, a)
    step, v = iteration_step(aa, Subspace.whole(n), density(a))
    assert step.lifted_gamma == gamma
    assert step.density_s_before == Fraction(1, 2)
    assert step.density_s_after == 0
    assert v.indicator() == hyperplane(n, gamma)
    assert iteration_step(aa, v, density(a)) is None


def test_full_sumset_needs_no_steps(rng):
    a = random_set_exact(rng, 10, 600)
    report = find_subspace(a)
    assert report.steps == [] and report.achieved_codim == 0 and report.verified


def test_dense_set_short_circuits():
    a = DenseSet.full(5) & ~DenseSet.from_elements(5, [3])
    report = find_subspace(a)
    assert report.theorem_bound == 0 and report.final_subspace == Subspace.whole(5)


@pytest.mark.parametrize("n", [6, 8, 10, 12])
def test_structured_runs_are_verified(rng, n):
    for a in structured_sets(rng, n):
        report = find_subspace(a)
        assert report.verified, report.diagnostics
        assert report.achieved_codim <= codim_bound(n, density(a))
        assert len(report.steps) == report.achieved_codim
        r = contraction_factor(density(a))
        for step in report.steps:
            assert step.density_s_after <= r * step.density_s_before


def test_random_runs_are_verified():
    for t in range(40):
        rng = trial_rng(99, t)
        n = 8 + 2 * (t % 3)
        a = random_set_exact(rng, n, (1 << n) // 8 + t)
        report = find_subspace(a)
        assert report.verified
        assert report.achieved_codim <= codim_bound(n, density(a))


def test_oracle_dominates_finder(rng):
    for n in (6, 8, 10, 12):
        for i, a in enumerate(structured_sets(rng, n)):
            if n == 12 and i == 0:
                continue        # the ball at n = 12 is too slow for the oracle
            report = find_subspace(a)
            best = max_subspace_in(sumset(a, a))
            assert report.final_subspace.dim <= best.dim


def test_metsch_rule(rng):
    n = 10
    for a in structured_sets(rng, n):
        for d in (1, 2, 3):
            report = find_subspace(a, f"metsch:{d}")
            assert report.verified, report.diagnostics
            assert report.final_subspace.dim == d
            assert report.achieved_codim == n - d
            plain = find_subspace(a)
            assert len(report.steps) <= len(plain.steps)


def test_metsch_rule_target_out_of_range():
    with pytest.raises(ValueError):
        find_subspace(ball(6, 2), "metsch:7")


def test_tampered_reports_are_rejected(rng):
    a = ball(10, 4)
    report = find_subspace(a)
    assert report.verified and report.steps

    bigger = copy.deepcopy(report)
    v = bigger.final_subspace
    extra = next(x for x in range(1 << 10) if x not in v)
    bigger.final_subspace = Subspace.span(v.basis + (extra,), 10)
    bigger.achieved_codim -= 1
    assert not verify_report(a, bigger)

    skewed = copy.deepcopy(report)
    skewed.steps[0].density_s_after += Fraction(1, 1 << 10)
    assert not verify_report(a, skewed)
    assert any("density after" in msg for msg in skewed.diagnostics)

    wrong_bound = copy.deepcopy(report)
    wrong_bound.theorem_bound += 1
    assert not verify_report(a, wrong_bound)


def test_report_round_trip():
    a = ball(8, 3)
    report = find_subspace(a)
    doc = report.to_dict()
    back = FinderReport.from_dict(doc)
    assert back.to_dict() == doc
    assert verify_report(a, back)


def test_empty_set_rejected():
    with pytest.raises(ValueError):
        find_subspace(DenseSet.empty(4))
