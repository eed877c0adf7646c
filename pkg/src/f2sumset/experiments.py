"""Seeded experiments behind the command line.

Each ``run_*`` function takes an :class:`ExperimentConfig` and returns an
:class:`Outcome`: a JSON-ready summary, per-trial rows, and whether every
assertion the experiment makes held.  Trial ``t`` draws from
``trial_rng(seed, t)`` so results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import niveau as nv
from .concentration import (
    BasisSet,
    basis_concentration_check,
    mcdiarmid_check,
    transported_ball,
    basis_expand,
)
from .f2core import DenseSet, check_dim, density, dyadic_str, popcounts, sumset, wht
from .increment import Stopping, find_subspace
from .rng import SplitMix64, random_set_bernoulli, random_set_exact, trial_rng
from .subspace import (
    max_subspace_in,
    metsch_bound,
    metsch_witness,
    random_subspace,
)


@dataclass
class ExperimentConfig:
    command: str
    n: int | None = None
    alpha: Fraction | None = None
    epsilon: Fraction | None = None
    trials: int = 1
    seed: int = 0
    stopping: str = "plain"
    sampling: str = "exact-card"
    d: int | None = None
    size: int | None = None
    w_star: int | None = None
    max_codim: int | None = None
    bases: int = 20
    grid: tuple[Fraction, ...] = ()
    input_set: DenseSet | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            if k == "input_set":
                continue
            if isinstance(v, Fraction):
                v = str(v)
            elif isinstance(v, tuple):
                v = [str(x) for x in v]
            out[k] = v
        if self.input_set is not None:
            out["input"] = {"n": self.input_set.n, "card": self.input_set.card}
        return out


@dataclass
class Outcome:
    summary: dict
    rows: list[dict]
    passed: bool
    reports: list[dict] = field(default_factory=list)


class UsageError(ValueError):
    pass


def _need(value, name: str):
    if value is None:
        raise UsageError(f"--{name} is required for this command")
    return value


def sqrt_floor_below(q: Fraction) -> int:
    """Largest integer ``s >= 0`` with ``s*s < q`` (-1 when ``q <= 0``)."""
    if q <= 0:
        return -1
    s = math.isqrt(math.floor(q))
    while s * s >= q:
        s -= 1
    while (s + 1) * (s + 1) < q:
        s += 1
    return s


def card_above(n: int, deficit_sq: Fraction) -> int:
    """Smallest cardinality ``k`` with ``k / 2^n > 1/2 - delta`` where ``delta^2 = deficit_sq``.

    Works with the square so that irrational ``delta`` such as ``C/sqrt(n)``
    is handled exactly.
    """
    size = 1 << n
    # k > size/2 - size*delta  <=>  size/2 - k < size*delta
    s = sqrt_floor_below(deficit_sq * size * size)   # largest s with s < size*delta
    if s < 0:
        return size // 2 + 1
    return max(1, size // 2 - s)


def _draw(cfg: ExperimentConfig, rng: SplitMix64, n: int, alpha: Fraction) -> DenseSet:
    if cfg.sampling == "bernoulli":
        a = random_set_bernoulli(rng, n, alpha)
        if a.card == 0:
            a = DenseSet.from_elements(n, [0])
        return a
    card = math.floor(alpha * (1 << n))
    if card < 1:
        raise UsageError(f"alpha={alpha} gives an empty set at n={n}")
    return random_set_exact(rng, n, card)


# ---------------------------------------------------------------------------

def run_find(cfg: ExperimentConfig) -> Outcome:
    stopping = Stopping.parse(cfg.stopping)
    reports, rows = [], []
    trials = 1 if cfg.input_set is not None else cfg.trials
    for t in range(trials):
        if cfg.input_set is not None:
            a = cfg.input_set
        else:
            n = check_dim(_need(cfg.n, "n"))
            a = _draw(cfg, trial_rng(cfg.seed, t), n, _need(cfg.alpha, "alpha"))
        rep = find_subspace(a, stopping)
        reports.append(rep.to_dict())
        rows.append({
            "trial": t,
            "n": a.n,
            "alpha": dyadic_str(rep.alpha),
            "steps": len(rep.steps),
            "achieved_codim": rep.achieved_codim,
            "theorem_bound": rep.theorem_bound,
            "verified": rep.verified,
        })
    passed = all(r["verified"] for r in rows) and all(
        r["theorem_bound"] is None or stopping.rule != "plain" or r["achieved_codim"] <= r["theorem_bound"]
        for r in rows)
    summary = {
        "trials": trials,
        "verified": sum(r["verified"] for r in rows),
        "max_codim": max(r["achieved_codim"] for r in rows),
        "stopping_rule": str(stopping),
    }
    return Outcome(summary, rows, passed, reports)


def in_hyperplane_regime(n: int, epsilon: Fraction) -> bool:
    """``epsilon <= 1 / (2^9 sqrt(n))``."""
    return epsilon > 0 and epsilon * epsilon * n * (1 << 18) <= 1


def hyperplane_scan(a: DenseSet) -> tuple[int | None, int | None]:
    """Smallest nonzero ``g`` with ``g^perp ⊆ A+A`` and with some coset of ``g^perp`` inside ``A+A``."""
    aa = sumset(a, a)
    if aa.is_full():
        return (1, 1) if a.n else (None, None)
    s = ~aa
    raw = wht(s).raw
    raw[0] = 0                      # only nonzero characters count
    hyper = np.flatnonzero(raw == -s.card)
    coset = np.flatnonzero(np.abs(raw) == s.card)
    return (int(hyper[0]) if hyper.size else None,
            int(coset[0]) if coset.size else None)


def run_hyperplane(cfg: ExperimentConfig) -> Outcome:
    rows = []
    if cfg.input_set is not None:
        n, sets = cfg.input_set.n, [cfg.input_set]
        epsilon = cfg.epsilon
    else:
        n = check_dim(_need(cfg.n, "n"))
        epsilon = cfg.epsilon
        if cfg.alpha is not None:
            card = math.floor(cfg.alpha * (1 << n))
        else:
            _need(epsilon, "epsilon")
            card = card_above(n, epsilon * epsilon)
        sets = (random_set_exact(trial_rng(cfg.seed, t), n, card) for t in range(cfg.trials))
    if n > 24:
        raise UsageError("hyperplane scan is limited to n <= 24")
    regime = epsilon is not None and in_hyperplane_regime(n, epsilon)
    for t, a in enumerate(sets):
        hyper, coset = hyperplane_scan(a)
        # the guarantee needs density > 1/2 - epsilon as well as the regime
        covered = regime and a.card >= card_above(n, epsilon * epsilon)
        rows.append({
            "trial": t,
            "n": n,
            "card": a.card,
            "alpha": dyadic_str(density(a)),
            "hyperplane_gamma": hyper,
            "coset_gamma": coset,
            "hyperplane": hyper is not None,
            "coset": coset is not None,
            "covered": covered,
        })
    successes = sum(r["hyperplane"] for r in rows)
    coset_successes = sum(r["coset"] for r in rows)
    summary = {
        "trials": len(rows),
        "in_regime": regime,
        "covered": sum(r["covered"] for r in rows),
        "hyperplane_successes": successes,
        "coset_successes": coset_successes,
    }
    passed = all(r["hyperplane"] and r["coset"] for r in rows if r["covered"])
    return Outcome(summary, rows, passed)


def _niveau_params(cfg: ExperimentConfig) -> nv.NiveauParams:
    n = _need(cfg.n, "n")
    if cfg.w_star is not None:
        return nv.NiveauParams.from_threshold(n, cfg.w_star)
    return nv.NiveauParams.from_epsilon(n, _need(cfg.epsilon, "epsilon"))


def run_niveau(cfg: ExperimentConfig) -> Outcome:
    params = _niveau_params(cfg)
    n = params.n
    bounds = nv.density_bounds_check(params)
    summary = {"params": params.to_dict(), "density": bounds.to_dict()}
    passed = True
    if bounds.in_regime and not bounds.holds:
        passed = False

    rows = []
    if n <= 20:
        a = nv.niveau_set(params)
        aa = sumset(a, a)
        min_zeros = int(n - popcounts(n)[aa.bits].max())
        weight_ok = min_zeros >= params.min_zeros
        summary["sumset_min_zeros"] = min_zeros
        summary["sumset_weight_bound"] = weight_ok
        passed &= weight_ok

        max_codim = params.d if cfg.max_codim is None else cfg.max_codim
        max_codim = min(max_codim, n - 1)
        found = inconclusive = unsound = 0
        for t in range(cfg.trials):
            rng = trial_rng(cfg.seed, t)
            codim = rng.below(max_codim + 1)
            v = random_subspace(rng, n, n - codim)
            x = nv.low_zero_witness(params, v)
            sound = x is None or (x in v and not aa.bits[x])
            found += x is not None
            inconclusive += x is None
            unsound += not sound
            rows.append({"trial": t, "codim": codim, "witness": x, "sound": sound})
        summary["witnesses"] = {"found": found, "inconclusive": inconclusive,
                                "unsound": unsound, "trials": cfg.trials}
        passed &= unsound == 0
    return Outcome(summary, rows, passed)


def _concentration_set(rng: SplitMix64, n: int) -> DenseSet:
    kind = rng.below(3)
    if kind == 0:
        k = rng.below(n + 1)
        card = min(1 + rng.below(1 << k), 1 << n)
        return random_set_exact(rng, n, card)
    if kind == 1:
        # Hamming ball around a random centre: near the extremal case
        radius = rng.below(n // 2 + 1)
        centre = rng.below(1 << n)
        return DenseSet(n, popcounts(n)[np.arange(1 << n) ^ centre] <= radius)
    # subcube: fix a random set of coordinates
    fixed = rng.below(1 << n)
    values = rng.below(1 << n) & fixed
    return DenseSet(n, (np.arange(1 << n) & fixed) == values)


def run_concentration(cfg: ExperimentConfig) -> Outcome:
    n = check_dim(_need(cfg.n, "n"))
    base = SplitMix64(cfg.seed ^ 0x5EED)
    bases = [BasisSet.random(base.child(i), n) for i in range(cfg.bases)]
    standard = BasisSet.standard(n)
    rows = []
    for t in range(cfg.trials):
        rng = trial_rng(cfg.seed, t)
        a = _concentration_set(rng, n)
        r = rng.below(n + 1)
        cube = mcdiarmid_check(a, r)
        basis = bases[t % len(bases)] if bases else standard
        std = basis_concentration_check(a, standard, r)
        rnd = basis_concentration_check(a, basis, r)
        contained = transported_ball(a, basis, r).issubset(basis_expand(a, basis, r))
        rows.append({
            "trial": t,
            "card": a.card,
            "r": r,
            "lhs": dyadic_str(cube.lhs),
            "rhs": cube.rhs,
            "cube_holds": cube.holds,
            "standard_basis_holds": std.holds,
            "random_basis_holds": rnd.holds,
            "containment": contained,
        })
    keys = ("cube_holds", "standard_basis_holds", "random_basis_holds", "containment")
    summary = {k: sum(r[k] for r in rows) for k in keys}
    summary["trials"] = len(rows)
    passed = all(all(r[k] for k in keys) for r in rows)
    return Outcome(summary, rows, passed)


def random_nonzero_set(rng: SplitMix64, n: int, size: int) -> DenseSet:
    """Uniform ``size``-subset of F_2^n \\ {0}."""
    if not 0 <= size < (1 << n):
        raise UsageError(f"size {size} out of range for n={n}")
    keys = rng.block(1 << n)
    keys[0] = np.iinfo(np.uint64).max
    order = np.argsort(keys, kind="stable")
    bits = np.zeros(1 << n, dtype=bool)
    bits[order[:size]] = True
    return DenseSet(n, bits)


def run_metsch(cfg: ExperimentConfig) -> Outcome:
    n = check_dim(_need(cfg.n, "n"))
    d = _need(cfg.d, "d")
    bound = metsch_bound(n, d)
    size = bound - 1 if cfg.size is None else cfg.size
    rows = []
    for t in range(cfg.trials):
        s = random_nonzero_set(trial_rng(cfg.seed, t), n, size)
        w = metsch_witness(s, d)
        ok = w is not None and w.dim == d and not np.any(s.bits[w.elements()])
        rows.append({"trial": t, "size": size, "found": w is not None, "sound": ok or w is None,
                     "witness": None if w is None else [f"0x{b:x}" for b in w.basis]})
    found = sum(r["found"] for r in rows)
    guaranteed = size < bound
    summary = {"n": n, "d": d, "size": size, "metsch_bound": bound,
               "guaranteed": guaranteed, "found": found, "trials": len(rows)}
    passed = all(r["sound"] for r in rows) and (not guaranteed or found == len(rows))
    return Outcome(summary, rows, passed)


DEFAULT_GRID = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4))
SWEEP_COLUMNS = ("n", "C", "trial", "card", "achieved_codim", "finder_codim")


def run_sweep(cfg: ExperimentConfig) -> Outcome:
    n = check_dim(_need(cfg.n, "n"))
    if n > 14:
        raise UsageError("the subspace oracle limits the sweep to n <= 14")
    grid = cfg.grid or DEFAULT_GRID
    rows = []
    for ci, c in enumerate(grid):
        card = card_above(n, c * c / n)
        for t in range(cfg.trials):
            a = random_set_exact(trial_rng(cfg.seed, ci * cfg.trials + t), n, card)
            aa = sumset(a, a)
            best = max_subspace_in(aa)
            rep = find_subspace(a, aa=aa)
            rows.append({"n": n, "C": str(c), "trial": t, "card": card,
                         "achieved_codim": best.codim, "finder_codim": rep.achieved_codim})
    summary = {"rows": len(rows), "grid": [str(c) for c in grid]}
    return Outcome(summary, rows, True)


COMMANDS = {
    "find": run_find,
    "hyperplane": run_hyperplane,
    "niveau": run_niveau,
    "concentration": run_concentration,
    "metsch": run_metsch,
    "sweep": run_sweep,
}
