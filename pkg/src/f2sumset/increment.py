"""Density-increment search for a large subspace inside A + A.

Starting from ``V = F_2^n`` each step looks at ``S = V \\ (A+A)``, takes the
character of ``V`` on which the spectrum of ``1_S`` is most negative, and
passes to its kernel.  With ``alpha`` the density of ``A`` the relative
density of ``S`` shrinks by at least ``(1 - 2 alpha) / (1 - alpha)`` per step,
so after at most :func:`codim_bound` steps ``S`` is empty.

The optional Metsch stopping rule halts once ``|S|`` is small enough that some
``d``-dimensional subspace of ``V`` must avoid it, then finds one by search.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .f2core import DenseSet, density, dyadic_str, parse_dyadic, sumset, wht
from .subspace import Subspace, pullback, pushforward, subspace_of_dim_in


class FinderError(RuntimeError):
    """An internal guarantee failed or the requested target is unreachable."""


def contraction_factor(alpha: Fraction) -> Fraction:
    alpha = Fraction(alpha)
    return (1 - 2 * alpha) / (1 - alpha)


def codim_bound(n: int, alpha: Fraction) -> int:
    """Smallest ``i`` with ``2**(n-i) * r**i < 1``, ``r = (1-2a)/(1-a)``.

    Equal to ``ceil(n / log2((2-2a)/(1-2a)))``; evaluated with exact rational
    powers.  Density 1/2 gives 1 and density above 1/2 gives 0.
    """
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ValueError("density must be positive")
    if alpha > Fraction(1, 2):
        return 0
    if alpha == Fraction(1, 2):
        return 1 if n > 0 else 0
    r = contraction_factor(alpha)
    for i in range(n + 1):
        if Fraction(1 << (n - i)) * r ** i < 1:
            return i
    raise AssertionError("unreachable: r < 1 forces i <= n")


def metsch_step_bound(n: int, alpha: Fraction, d: int) -> int | None:
    """Smallest ``i <= n - d`` with ``2**(n-i) * r**i < 2**(n-i+1-d) - 1``.

    Past that many steps the Metsch rule is guaranteed to have fired.  None
    when no such ``i`` exists.
    """
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ValueError("density must be positive")
    if alpha > Fraction(1, 2):
        return 0
    r = contraction_factor(alpha)
    for i in range(n - d + 1):
        if Fraction(1 << (n - i)) * r ** i < (1 << (n - i + 1 - d)) - 1:
            return i
    return None


@dataclass(frozen=True)
class Stopping:
    """``plain`` (run until V ⊆ A+A) or ``metsch`` with target dimension ``d``."""

    rule: str = "plain"
    d: int | None = None

    @classmethod
    def parse(cls, text: str) -> Stopping:
        text = text.strip()
        if text == "plain":
            return cls()
        if text.startswith("metsch:") or text.startswith("metsch(") :
            d = int(text[7:].rstrip(")"))
            if d < 1:
                raise ValueError("metsch target dimension must be at least 1")
            return cls("metsch", d)
        raise ValueError(f"unknown stopping rule {text!r}")

    def __str__(self) -> str:
        return "plain" if self.rule == "plain" else f"metsch({self.d})"


@dataclass
class IterationStep:
    step_index: int
    codim_before: int
    chosen_gamma: int           # character in the coordinates of V_{i-1}
    lifted_gamma: int           # the same character as a mask on F_2^n
    density_s_before: Fraction
    density_s_after: Fraction
    contraction_bound: Fraction

    @property
    def ratio(self) -> Fraction | None:
        if self.density_s_before == 0:
            return None
        return self.density_s_after / self.density_s_before

    def holds(self) -> bool:
        return self.density_s_after <= self.contraction_bound * self.density_s_before

    def to_dict(self) -> dict:
        return {
            "step_index": self.step_index,
            "codim_before": self.codim_before,
            "chosen_gamma": self.chosen_gamma,
            "lifted_gamma": self.lifted_gamma,
            "density_s_before": dyadic_str(self.density_s_before),
            "density_s_after": dyadic_str(self.density_s_after),
            "contraction_bound": str(self.contraction_bound),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> IterationStep:
        return cls(
            step_index=int(doc["step_index"]),
            codim_before=int(doc["codim_before"]),
            chosen_gamma=int(doc["chosen_gamma"]),
            lifted_gamma=int(doc["lifted_gamma"]),
            density_s_before=parse_dyadic(doc["density_s_before"]),
            density_s_after=parse_dyadic(doc["density_s_after"]),
            contraction_bound=Fraction(doc["contraction_bound"]),
        )


@dataclass
class FinderReport:
    n: int
    alpha: Fraction
    steps: list[IterationStep]
    final_subspace: Subspace
    achieved_codim: int
    theorem_bound: int | None
    stopping_rule: str
    verified: bool = False
    diagnostics: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": dyadic_str(self.alpha),
            "stopping_rule": self.stopping_rule,
            "theorem_bound": self.theorem_bound,
            "achieved_codim": self.achieved_codim,
            "verified": self.verified,
            "steps": [s.to_dict() for s in self.steps],
            "final_subspace": self.final_subspace.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> FinderReport:
        return cls(
            n=int(doc["n"]),
            alpha=parse_dyadic(doc["alpha"]),
            steps=[IterationStep.from_dict(s) for s in doc["steps"]],
            final_subspace=Subspace.from_dict(doc["final_subspace"]),
            achieved_codim=int(doc["achieved_codim"]),
            theorem_bound=doc["theorem_bound"],
            stopping_rule=doc["stopping_rule"],
            verified=bool(doc.get("verified", False)),
        )


def _bad_set(aa: DenseSet, v: Subspace) -> DenseSet:
    """``V \\ (A+A)`` in the coordinates of ``V``."""
    inside = pullback(aa, v)
    return DenseSet(inside.n, ~inside.bits)


def iteration_step(aa: DenseSet, v: Subspace, alpha: Fraction,
                   step_index: int = 1) -> tuple[IterationStep, Subspace] | None:
    """One density-increment step from ``V``; None when ``V ⊆ A+A`` already.

    ``aa`` must be the sumset ``A + A`` and ``alpha`` the exact density of ``A``.
    """
    alpha = Fraction(alpha)
    s = _bad_set(aa, v)
    if s.card == 0:
        return None
    raw = wht(s).raw
    gamma = int(np.argmin(raw))          # argmin returns the first, i.e. smallest mask
    if raw[gamma] >= 0:
        raise FinderError(
            f"no negative Fourier coefficient although S has {s.card} elements, "
            "which the contraction argument rules out")
    lifted = v.lift(gamma)
    v_next = v.cut(lifted)
    s_next = _bad_set(aa, v_next)
    step = IterationStep(
        step_index=step_index,
        codim_before=v.codim,
        chosen_gamma=gamma,
        lifted_gamma=lifted,
        density_s_before=Fraction(s.card, 1 << s.n),
        density_s_after=Fraction(s_next.card, 1 << s_next.n),
        contraction_bound=contraction_factor(alpha),
    )
    return step, v_next


def find_subspace(a: DenseSet, stopping: Stopping | str = "plain",
                  aa: DenseSet | None = None) -> FinderReport:
    """Run the density-increment iteration on ``A`` and return a verified report."""
    if isinstance(stopping, str):
        stopping = Stopping.parse(stopping)
    if a.card == 0:
        raise ValueError("A must be nonempty")
    n = a.n
    alpha = density(a)
    if aa is None:
        aa = sumset(a, a)

    if stopping.rule == "plain":
        bound = codim_bound(n, alpha)
    else:
        if not 1 <= stopping.d <= n:
            raise ValueError(f"metsch target dimension {stopping.d} out of range for n={n}")
        bound = metsch_step_bound(n, alpha, stopping.d)

    v = Subspace.whole(n)
    steps: list[IterationStep] = []
    if alpha > Fraction(1, 2):
        # A + A = G; no iteration needed
        if stopping.rule == "metsch":
            v = subspace_of_dim_in(aa, stopping.d)
    else:
        while True:
            if stopping.rule == "metsch":
                s_count = _bad_set(aa, v).card
                if v.dim >= stopping.d and s_count < (1 << (v.dim + 1 - stopping.d)) - 1:
                    break
                if v.dim <= stopping.d:
                    raise FinderError(
                        f"iteration reached dimension {v.dim} without room for a "
                        f"{stopping.d}-dimensional subspace")
            res = iteration_step(aa, v, alpha, len(steps) + 1)
            if res is None:
                break
            step, v = res
            if not step.holds():
                raise FinderError(f"contraction violated at step {step.step_index}")
            steps.append(step)
        if stopping.rule == "metsch":
            local = subspace_of_dim_in(pullback(aa, v), stopping.d)
            if local is None:
                raise FinderError("Metsch bound promised a subspace but none was found")
            v = Subspace.span(pushforward(local.indicator(), v).elements().tolist(), n)

    report = FinderReport(
        n=n,
        alpha=alpha,
        steps=steps,
        final_subspace=v,
        achieved_codim=v.codim,
        theorem_bound=bound,
        stopping_rule=str(stopping),
    )
    verify_report(a, report, aa=aa)
    return report


def report_diagnostics(a: DenseSet, report: FinderReport,
                       aa: DenseSet | None = None) -> list[str]:
    """Recompute everything the report claims; returns the list of mismatches."""
    problems: list[str] = []
    n = a.n
    if report.n != n:
        return [f"report is for n={report.n}, set has n={n}"]
    if aa is None:
        aa = sumset(a, a)
    alpha = density(a)
    if report.alpha != alpha:
        problems.append(f"alpha {report.alpha} != density {alpha}")
    try:
        stopping = Stopping.parse(report.stopping_rule)
    except ValueError as exc:
        return problems + [str(exc)]

    final = report.final_subspace
    if final.n != n:
        return problems + ["final subspace has the wrong ambient dimension"]
    if not final.issubset(aa):
        problems.append("final subspace is not contained in A+A")
    if report.achieved_codim != final.codim:
        problems.append(f"achieved_codim {report.achieved_codim} != codim {final.codim}")

    if stopping.rule == "plain":
        expected_bound = codim_bound(n, alpha) if alpha > 0 else None
    else:
        expected_bound = metsch_step_bound(n, alpha, stopping.d) if alpha > 0 else None
    if report.theorem_bound != expected_bound:
        problems.append(f"theorem_bound {report.theorem_bound} != {expected_bound}")

    # replay the chain of subspaces
    v = Subspace.whole(n)
    r = contraction_factor(alpha) if alpha < 1 else None
    for i, step in enumerate(report.steps, start=1):
        if step.step_index != i:
            problems.append(f"step {i} has index {step.step_index}")
        if step.codim_before != v.codim:
            problems.append(f"step {i}: codim_before {step.codim_before} != {v.codim}")
        if step.contraction_bound != r:
            problems.append(f"step {i}: contraction bound {step.contraction_bound} != {r}")
        s = _bad_set(aa, v)
        if step.density_s_before != Fraction(s.card, 1 << s.n):
            problems.append(f"step {i}: density before does not match recomputation")
        if not 0 <= step.chosen_gamma < (1 << v.dim) or v.lift(step.chosen_gamma) != step.lifted_gamma:
            problems.append(f"step {i}: lifted character does not match chosen character")
            break
        v_next = v.cut(step.lifted_gamma)
        if v_next.codim != v.codim + 1:
            problems.append(f"step {i}: character does not cut V to a hyperplane")
            break
        s_next = _bad_set(aa, v_next)
        if step.density_s_after != Fraction(s_next.card, 1 << s_next.n):
            problems.append(f"step {i}: density after does not match recomputation")
        if r is not None and not Fraction(s_next.card, 1 << s_next.n) <= r * Fraction(s.card, 1 << s.n):
            problems.append(f"step {i}: contraction inequality fails")
        v = v_next

    if stopping.rule == "plain":
        if final != v:
            problems.append("final subspace is not the last subspace of the chain")
        if expected_bound is not None and final.codim > expected_bound:
            problems.append(f"codim {final.codim} exceeds bound {expected_bound}")
        if len(report.steps) != final.codim:
            problems.append("number of steps differs from achieved codimension")
    else:
        if final.dim != stopping.d:
            problems.append(f"final subspace has dimension {final.dim}, wanted {stopping.d}")
        if not final <= v:
            problems.append("final subspace is not inside the last iterate")
        if expected_bound is not None and len(report.steps) > expected_bound:
            problems.append(f"{len(report.steps)} steps exceed the Metsch step bound {expected_bound}")
    return problems


def verify_report(a: DenseSet, report: FinderReport, aa: DenseSet | None = None) -> bool:
    """Check a report against ``A``; sets ``report.verified`` and ``report.diagnostics``."""
    report.diagnostics = report_diagnostics(a, report, aa)
    report.verified = not report.diagnostics
    return report.verified
