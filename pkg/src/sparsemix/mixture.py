"""Sparse normal mixture models, the (beta, r) calibration and sampling."""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtri

from . import normal_dist as nd
from .empirical import SortedSample, make_rng, sorted_uniforms

__all__ = [
    "TwoPointMixture",
    "DiscreteOneSidedMixture",
    "SparseCalibration",
    "calibrate",
    "mixture_cdf",
    "mixture_sf",
    "detection_boundary",
    "is_detectable",
    "mr_consistent",
    "cjl_threshold_exponent",
    "informative_threshold_cjl",
    "informative_threshold_mr",
    "sample",
]

SAMPLING_MODES = ("binomial", "fixed")
# points within this distance of a region boundary count as on the boundary,
# so grids built with linspace classify boundary cells consistently
BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class TwoPointMixture:
    """``(1 - epsilon) N(0, 1) + epsilon N(mu, 1)``."""

    epsilon: float
    mu: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ValueError(f"mu must be positive and finite, got {self.mu}")

    @property
    def atoms(self):
        return ((self.mu, 1.0),)

    def cdf(self, t):
        return mixture_cdf(self, t)

    def sf(self, t):
        return mixture_sf(self, t)


@dataclass(frozen=True)
class DiscreteOneSidedMixture:
    """``(1 - epsilon) N(0, 1) + epsilon sum_k w_k N(mu_k, 1)`` with every ``mu_k > 0``."""

    epsilon: float
    atoms: tuple

    def __init__(self, epsilon: float, atoms: Sequence[tuple[float, float]]):
        atoms = tuple((float(m), float(w)) for m, w in atoms)
        object.__setattr__(self, "epsilon", float(epsilon))
        object.__setattr__(self, "atoms", atoms)
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
        if not atoms:
            raise ValueError("at least one atom is required")
        if any(not (math.isfinite(m) and m > 0) for m, _ in atoms):
            raise ValueError("atom locations must be positive and finite")
        if any(w <= 0 for _, w in atoms):
            raise ValueError("atom weights must be positive")
        if abs(math.fsum(w for _, w in atoms) - 1.0) > 1e-12:
            raise ValueError("atom weights must sum to 1")

    def cdf(self, t):
        return mixture_cdf(self, t)

    def sf(self, t):
        return mixture_sf(self, t)


@dataclass(frozen=True)
class SparseCalibration:
    """Calibration ``epsilon = n**-beta``, ``mu = sqrt(2 r log n)``.

    ``n`` may be any real number above 1 so that the formulas can be
    evaluated at non-integer sizes; ``1/2 < beta < 1`` and ``0 < r < 1``.
    """

    n: float
    beta: float
    r: float

    def __post_init__(self):
        if not self.n > 1:
            raise ValueError(f"n must exceed 1, got {self.n}")
        if not 0.5 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (1/2, 1), got {self.beta}")
        if not 0.0 < self.r < 1.0:
            raise ValueError(f"r must lie in (0, 1), got {self.r}")

    @property
    def log_n(self):
        return math.log(self.n)

    @property
    def epsilon(self):
        return self.n ** (-self.beta)

    @property
    def mu(self):
        return math.sqrt(2.0 * self.r * self.log_n)


def calibrate(cal: SparseCalibration) -> TwoPointMixture:
    return TwoPointMixture(cal.epsilon, cal.mu)


def mixture_cdf(model, t):
    """Exact CDF of a two-point or discrete one-sided mixture at ``t``."""
    t = np.asarray(t, dtype=float)
    alt = sum(w * nd.cdf(t - m) for m, w in model.atoms)
    out = (1.0 - model.epsilon) * nd.cdf(t) + model.epsilon * alt
    return float(out) if np.ndim(out) == 0 else out


def mixture_sf(model, t):
    """Survival function ``1 - F(t)``, accurate in the upper tail."""
    t = np.asarray(t, dtype=float)
    alt = sum(w * nd.sf(t - m) for m, w in model.atoms)
    out = (1.0 - model.epsilon) * nd.sf(t) + model.epsilon * alt
    return float(out) if np.ndim(out) == 0 else out


def detection_boundary(beta: float) -> float:
    """The detection boundary ``rho*(beta)`` on ``1/2 < beta < 1``."""
    if not 0.5 < beta < 1.0:
        raise ValueError(f"beta must lie in (1/2, 1), got {beta}")
    if beta <= 0.75:
        return beta - 0.5
    return (1.0 - math.sqrt(1.0 - beta)) ** 2


def is_detectable(cal: SparseCalibration) -> bool:
    return cal.r > detection_boundary(cal.beta) + BOUNDARY_TOL


def mr_consistent(cal: SparseCalibration) -> bool:
    """Whether (beta, r) lies strictly above the line ``r = 2 beta - 1``."""
    return cal.r > 2.0 * cal.beta - 1.0 + BOUNDARY_TOL


def cjl_threshold_exponent(beta: float, r: float) -> float:
    """``q`` such that the most informative threshold is ``sqrt(2 q log n)``.

    Ties at ``beta == 3 r`` go to the ``beta >= 3 r`` branch.
    """
    if beta >= 3.0 * r:
        return 4.0 * r
    if beta > r:
        return (beta + r) ** 2 / (4.0 * r)
    return r


def informative_threshold_cjl(cal: SparseCalibration) -> float:
    if not is_detectable(cal):
        raise ValueError(f"(beta={cal.beta}, r={cal.r}) is not detectable")
    return math.sqrt(2.0 * cjl_threshold_exponent(cal.beta, cal.r) * cal.log_n)


def informative_threshold_mr(cal: SparseCalibration):
    """Most informative threshold of the Meinshausen-Rice bound.

    Returns ``None`` (not of interest) when ``r <= 2 beta - 1``, where that
    bound is inconsistent.
    """
    if not mr_consistent(cal):
        return None
    factor = 2.0 - math.sqrt(2.0 - (2.0 * cal.beta - 1.0) / cal.r)
    return factor * cal.mu


def _largest_remainder(total, weights):
    raw = np.asarray(weights, dtype=float) * total
    counts = np.floor(raw).astype(np.int64)
    short = int(total - counts.sum())
    if short > 0:
        order = np.argsort(-(raw - counts), kind="stable")
        counts[order[:short]] += 1
    return counts


def _sorted_normals(rng, count, loc=0.0):
    if count == 0:
        return np.empty(0)
    u, v = sorted_uniforms(rng, count)
    # lower half from u, upper half from 1 - u, so both tails keep precision
    z = np.where(u < 0.5, ndtri(np.minimum(u, 0.5)), -ndtri(np.minimum(v, 0.5)))
    return loc + z


def sample(model, n: int, seed=None, mode: str = "binomial", rng=None) -> SortedSample:
    """Draw ``n`` observations from ``model`` and return them sorted.

    ``mode="binomial"`` draws the number of non-null observations from
    ``Binomial(n, epsilon)``; ``mode="fixed"`` uses ``round(n * epsilon)`` of
    them. Non-null counts are split across atoms multinomially (binomial
    mode) or by largest remainder (fixed mode). Each component is generated
    already sorted from exponential spacings, so no full sort is needed.

    Pass either ``seed`` (an integer or ``numpy.random.SeedSequence``) or a
    ready ``rng``.
    """
    if mode not in SAMPLING_MODES:
        raise ValueError(f"mode must be one of {SAMPLING_MODES}, got {mode!r}")
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    if rng is None:
        rng = make_rng(seed)
    weights = [w for _, w in model.atoms]
    if mode == "binomial":
        n_alt = int(rng.binomial(n, model.epsilon))
        per_atom = rng.multinomial(n_alt, weights) if n_alt else np.zeros(len(weights), int)
    else:
        n_alt = min(n, int(round(n * model.epsilon)))
        per_atom = _largest_remainder(n_alt, weights)
    parts = [_sorted_normals(rng, n - n_alt)]
    parts += [_sorted_normals(rng, int(c), m) for (m, _), c in zip(model.atoms, per_atom)]
    values = np.sort(np.concatenate(parts), kind="stable")
    return SortedSample(values, assume_sorted=True)
