"""Sumsets, exact Walsh-Hadamard spectra and subspace search in F_2^n."""

from .f2core import (
    CapacityError,
    DenseSet,
    DimensionMismatch,
    DyadicFunction,
    Spectrum,
    complement,
    convolve,
    density,
    intersect,
    inverse_wht,
    load_set,
    member,
    save_set,
    sumset,
    union,
    wht,
)
from .increment import (
    FinderError,
    FinderReport,
    IterationStep,
    Stopping,
    codim_bound,
    find_subspace,
    iteration_step,
    verify_report,
)
from .subspace import (
    CosetIndex,
    Subspace,
    coset_restrict,
    low_zero_vector,
    max_subspace_in,
    metsch_bound,
    metsch_witness,
    perp,
    pullback,
    pushforward,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError", "CosetIndex", "DenseSet", "DimensionMismatch", "DyadicFunction",
    "FinderError", "FinderReport", "IterationStep", "Spectrum", "Stopping", "Subspace",
    "codim_bound", "complement", "convolve", "coset_restrict", "density", "find_subspace",
    "intersect", "inverse_wht", "iteration_step", "load_set", "low_zero_vector",
    "max_subspace_in", "member", "metsch_bound", "metsch_witness", "perp", "pullback",
    "pushforward", "save_set", "sumset", "union", "verify_report", "wht",
]
