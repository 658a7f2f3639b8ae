"""Seeded Monte Carlo sampling of measurement outcomes.

Generator contract
------------------
``numpy.random.Generator(numpy.random.PCG64(seed))`` (PCG-XSL-RR 128/64,
multiplier 0x2360ed051fc65da44385df649fccf645, SeedSequence seeding).
For ``shots`` draws the generator emits ``shots`` doubles ``u`` in [0, 1)
via ``Generator.random``; outcome ``k`` is the first index with
``u < cdf[k]`` where ``cdf`` is the cumulative sum of the probability
vector flattened in row-major order. Counts are then tallied. The mapping
seed -> counts is therefore fixed by numpy's documented PCG64 stream.
"""

from typing import NamedTuple, Tuple

import numpy as np
import scipy.stats

from .exceptions import DimensionError, QmeasError
from .linalg import as_density

TOL_NEG = 1e-12
TOL_DRIFT = 1e-9
TOL_CHI2_CELL = 1e-12


class NumericError(QmeasError):
    """Outcome probabilities are not a valid distribution."""


def outcome_probabilities(rho, povm):
    """``Tr(rho R_i)`` shaped like the POVM (flat, or K x L for a bivariate grid).

    Values in ``[-1e-12, 0)`` are clamped to zero and the vector is
    renormalized if its total is within ``1e-9`` of one.
    """
    rho = as_density(rho)
    p = np.asarray(povm.probabilities(rho), dtype=float)
    if p.min() < -TOL_NEG:
        raise NumericError(f"negative outcome probability {p.min():.3e}")
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if abs(total - 1.0) > TOL_DRIFT:
        raise NumericError(f"outcome probabilities sum to {total!r}")
    return p / total


class OutcomeCounts(NamedTuple):
    counts: np.ndarray
    shots: int

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.counts.shape

    @property
    def frequencies(self):
        return self.counts / self.shots

    def row_counts(self):
        return self.counts.sum(axis=1)

    def col_counts(self):
        return self.counts.sum(axis=0)


def sample_indices(p, shots, seed):
    """Flat outcome index of every shot, by inverse CDF over the row-major probabilities."""
    flat = np.asarray(p, dtype=float).ravel()
    cdf = np.cumsum(flat)
    cdf[np.flatnonzero(flat)[-1]:] = 1.0
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(shots)
    # side="right" skips zero-probability cells, whose cdf equals the previous one
    return np.searchsorted(cdf, u, side="right")


def sample_outcomes(rho, povm, shots, seed):
    """Multinomial counts for `shots` measurements of `rho` with `povm`.

    Returns
    -------
    OutcomeCounts
        ``counts`` has shape ``(K,)`` for a `Povm` and ``(K, L)`` for a
        `BivariatePovm`.
    """
    if int(shots) != shots or shots < 0:
        raise ValueError(f"shots must be a non-negative integer, got {shots!r}")
    p = outcome_probabilities(rho, povm)
    idx = sample_indices(p, int(shots), seed)
    counts = np.bincount(idx, minlength=p.size).reshape(p.shape)
    return OutcomeCounts(counts, int(shots))


class EmpiricalReport(NamedTuple):
    max_abs_dev: float
    chi_square: float
    dof: int
    excluded_counts: int
    p_value: float


def empirical_report(counts, analytic):
    """Compare sampled counts with analytic probabilities.

    Cells with analytic probability below ``1e-12`` are left out of the
    Pearson statistic; their total count is reported as
    ``excluded_counts`` (nonzero there signals a sampling bug).
    """
    c = np.asarray(counts.counts, dtype=float)
    p = np.asarray(analytic, dtype=float)
    if c.shape != p.shape:
        raise DimensionError(f"counts shape {c.shape} does not match analytic shape {p.shape}")
    if counts.shots <= 0:
        raise ValueError("empirical report needs at least one shot")
    n = counts.shots
    c = c.ravel()
    p = p.ravel()
    dev = float(np.max(np.abs(c / n - p)))
    keep = p >= TOL_CHI2_CELL
    expected = n * p[keep]
    chi2 = float(np.sum((c[keep] - expected) ** 2 / expected))
    dof = int(keep.sum()) - 1
    pval = float(scipy.stats.chi2.sf(chi2, dof)) if dof > 0 else 1.0
    return EmpiricalReport(dev, chi2, dof, int(c[~keep].sum()), pval)


def standard_errors(p, shots):
    """Binomial standard error of each frequency."""
    p = np.asarray(p, dtype=float)
    return np.sqrt(p * (1 - p) / shots)


__all__ = [
    "NumericError",
    "OutcomeCounts",
    "EmpiricalReport",
    "outcome_probabilities",
    "sample_indices",
    "sample_outcomes",
    "empirical_report",
    "standard_errors",
]
