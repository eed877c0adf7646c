"""Low-weight "Niveau" sets and the witnesses that keep subspaces out of their sumsets.

``A = {x : weight(x) <= w_star}`` with ``w_star = floor(n/2 - eta*sqrt(2 pi n)/2)``
has density close to 1/2, yet every element of ``A + A`` has at least
``n - 2*w_star`` zero coordinates, while every subspace of codimension at most
``d = floor(eta*sqrt(2 pi n))`` contains a vector with at most ``d`` zeros.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .f2core import MAX_DIM, CapacityError, DenseSet, dyadic_str, popcount, popcounts
from .subspace import Subspace, low_zero_vector

# pi to 40 digits; the floors below are decided by rational comparison against
# this bracket and raise if a value falls inside it
_PI_DIGITS = "3.1415926535897932384626433832795028841971"
PI_LO = Fraction(_PI_DIGITS)
PI_HI = PI_LO + Fraction(1, 10 ** 40)

BERRY_ESSEEN_CONSTANT = Fraction(32, 10)


def _le_x_squared(k2: Fraction, coeff: Fraction) -> bool:
    """Decide ``k2 <= coeff * pi`` exactly (``coeff >= 0``)."""
    if k2 <= coeff * PI_LO:
        return True
    if k2 > coeff * PI_HI:
        return False
    raise ArithmeticError("comparison with pi is within the precision bracket")


def _x_squared_le(k2: Fraction, coeff: Fraction) -> bool:
    """Decide ``coeff * pi <= k2`` exactly (``coeff >= 0``)."""
    if coeff * PI_HI <= k2:
        return True
    if coeff * PI_LO > k2:
        return False
    raise ArithmeticError("comparison with pi is within the precision bracket")


def _floor_scaled_root(eta: Fraction, n: int) -> int:
    """``floor(eta * sqrt(2 pi n))`` for rational ``eta >= 0``."""
    coeff = 2 * eta * eta * n          # x^2 = coeff * pi
    k = math.isqrt(math.floor(coeff * PI_HI)) + 1
    while k > 0 and not _le_x_squared(Fraction(k * k), coeff):
        k -= 1
    return k


def _weight_threshold(eta: Fraction, n: int) -> int:
    """``floor((n - eta*sqrt(2 pi n)) / 2)``."""
    coeff = 2 * eta * eta * n
    w = n // 2
    # largest w with n - 2w >= 0 and x^2 <= (n - 2w)^2
    while w >= 0 and not _x_squared_le(Fraction((n - 2 * w) ** 2), coeff):
        w -= 1
    if w < 0:
        raise ValueError(f"eta={eta} pushes the weight threshold below zero at n={n}")
    return w


@dataclass(frozen=True)
class NiveauParams:
    n: int
    epsilon: Fraction | None
    eta: Fraction | None
    w_star: int
    d: int

    def __post_init__(self):
        if not 0 <= self.w_star <= self.n:
            raise ValueError(f"w_star={self.w_star} outside [0, {self.n}]")
        if self.d < 0:
            raise ValueError("zero bound must be non-negative")

    @classmethod
    def from_eta(cls, n: int, eta: Fraction, epsilon: Fraction | None = None) -> NiveauParams:
        eta = Fraction(eta)
        if eta < 0:
            raise ValueError("eta must be non-negative")
        return cls(n, epsilon, eta, _weight_threshold(eta, n), _floor_scaled_root(eta, n))

    @classmethod
    def from_epsilon(cls, n: int, epsilon: Fraction) -> NiveauParams:
        """The standard choice ``eta = 0.8 * epsilon``."""
        epsilon = Fraction(epsilon)
        if not 0 < epsilon <= Fraction(1, 2):
            raise ValueError("epsilon must lie in (0, 1/2]")
        return cls.from_eta(n, Fraction(4, 5) * epsilon, epsilon)

    @classmethod
    def from_threshold(cls, n: int, w_star: int) -> NiveauParams:
        """Explicit threshold; the zero bound is taken as ``n - 2*w_star``."""
        return cls(n, None, None, w_star, max(n - 2 * w_star, 0))

    @property
    def min_zeros(self) -> int:
        """Every element of A + A has at least this many zero coordinates."""
        return self.n - 2 * self.w_star

    @property
    def in_regime(self) -> bool:
        """``epsilon * sqrt(n) >= 4``, decided exactly."""
        return self.epsilon is not None and self.epsilon ** 2 * self.n >= 16

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "epsilon": None if self.epsilon is None else str(self.epsilon),
            "eta": None if self.eta is None else str(self.eta),
            "w_star": self.w_star,
            "d": self.d,
        }


def in_niveau(params: NiveauParams, x: int) -> bool:
    return popcount(x) <= params.w_star


def niveau_set(params: NiveauParams) -> DenseSet:
    if params.n > MAX_DIM:
        raise CapacityError(f"n={params.n} is beyond dense capacity; use in_niveau")
    return DenseSet(params.n, popcounts(params.n) <= params.w_star)


def exact_density(n: int, w_star: int) -> Fraction:
    """``sum_{k <= w_star} C(n, k) / 2**n``."""
    if not 0 <= w_star <= n:
        raise ValueError(f"w_star={w_star} outside [0, {n}]")
    return Fraction(sum(math.comb(n, k) for k in range(w_star + 1)), 1 << n)


def normal_cdf(x: float) -> float:
    """Standard normal CDF through the complementary error function (relative error ~1e-16)."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


@dataclass(frozen=True)
class DensityBounds:
    exact: Fraction
    berry_esseen_lower: float
    linearized_lower: float
    target: Fraction | None
    in_regime: bool
    holds: bool | None

    def to_dict(self) -> dict:
        return {
            "exact": dyadic_str(self.exact),
            "exact_float": float(self.exact),
            "berry_esseen_lower": self.berry_esseen_lower,
            "linearized_lower": self.linearized_lower,
            "target": None if self.target is None else str(self.target),
            "in_regime": self.in_regime,
            "holds": self.holds,
        }


def density_bounds_check(params: NiveauParams) -> DensityBounds:
    """Exact density next to the normal-approximation lower bounds.

    ``berry_esseen_lower = Phi(-eta*sqrt(2 pi)) - 3.2/sqrt(n)`` and
    ``linearized_lower = 1/2 - eta - 3.2/sqrt(n)``.  ``holds`` compares the
    exact density with ``1/2 - epsilon``.
    """
    n = params.n
    eta = float(params.eta) if params.eta is not None else 0.0
    exact = exact_density(n, params.w_star)
    slack = float(BERRY_ESSEEN_CONSTANT) / math.sqrt(n)
    target = None if params.epsilon is None else Fraction(1, 2) - params.epsilon
    return DensityBounds(
        exact=exact,
        berry_esseen_lower=normal_cdf(-eta * math.sqrt(2 * math.pi)) - slack,
        linearized_lower=0.5 - eta - slack,
        target=target,
        in_regime=params.in_regime,
        holds=None if target is None else exact > target,
    )


def sumset_weight_bound_check(params: NiveauParams, x: int) -> bool:
    return params.n - popcount(x) >= params.min_zeros


def low_zero_witness(params: NiveauParams, v: Subspace) -> int | None:
    """The low-zero vector of ``V`` if it has too few zeros to lie in ``A + A``.

    No precondition on the codimension; :func:`codim_witness` adds it.
    """
    if v.n != params.n:
        raise ValueError("subspace and parameters disagree on n")
    if v.dim == 0:
        return None
    x = low_zero_vector(v)
    if params.n - popcount(x) < params.min_zeros:
        return x
    return None


def codim_witness(params: NiveauParams, v: Subspace) -> int | None:
    """An element of ``V`` outside ``A + A``, or None when the floors leave it undecided."""
    if v.codim > params.d:
        raise ValueError(f"codimension {v.codim} exceeds the zero bound d={params.d}")
    return low_zero_witness(params, v)
