"""Lower bounds for the non-null fraction of a one-sided normal mixture.

The grid estimator works pair by pair on adjacent thresholds ``t_j < t_{j+1}``:
it pushes the CDF up at ``t_j`` and down at ``t_{j+1}`` to the edges of the
weighted confidence envelope, fits the unique two-point mixture through the
two shifted values, and keeps the largest fitted fraction. The
Meinshausen-Rice bound and its variant without the ``1 - t`` denominator are
included for comparison; they operate on one-sided p-values ``1 - Phi(X)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import normal_dist as nd
from .empirical import SortedSample, envelope_bounds

__all__ = [
    "Grid",
    "PairEstimate",
    "EstimateResult",
    "d_ratio",
    "d_ratio_range",
    "d_ratio_excess",
    "solve_mu",
    "two_point_through",
    "two_point_from_deficits",
    "build_grid",
    "cjl_estimate",
    "PAIRINGS",
    "to_pvalues",
    "mr_lower_bound",
    "mr_plus_lower_bound",
    "oracle_cjl_approx",
    "oracle_mr_approx",
]

MU_LO = 1e-8
MU_START = 1.0
MAX_DOUBLINGS = 6
MAX_BISECTIONS = 200


def _check_pair(tau, tau_prime):
    if not np.all(np.asarray(tau) < np.asarray(tau_prime)):
        raise ValueError(f"need tau < tau_prime, got {tau} and {tau_prime}")


def _d(mu, tau, tau_prime):
    return nd.interval_mass(tau - mu, tau) / nd.interval_mass(tau_prime - mu, tau_prime)


def d_ratio(mu, tau, tau_prime):
    """``[Phi(tau) - Phi(tau - mu)] / [Phi(tau') - Phi(tau' - mu)]``, strictly decreasing in ``mu``."""
    _check_pair(tau, tau_prime)
    if np.any(np.asarray(mu) <= 0):
        raise ValueError("mu must be positive")
    return _d(np.asarray(mu, dtype=float), tau, tau_prime)


def d_ratio_excess(mu, tau, tau_prime):
    """``d_ratio(mu) - Phi(tau)/Phi(tau')`` without cancellation.

    For large ``mu`` the ratio sits within an ulp of its infimum, so
    differences of :func:`d_ratio` lose all precision; this form keeps the
    strict decrease visible in floating point.
    """
    _check_pair(tau, tau_prime)
    mu = np.asarray(mu, dtype=float)
    if np.any(mu <= 0):
        raise ValueError("mu must be positive")
    lo, lo_p = tau - mu, tau_prime - mu
    top = (nd.cdf(tau) * nd.interval_mass(lo, lo_p)
           - nd.cdf(lo) * nd.interval_mass(tau, tau_prime))
    out = top / (nd.cdf(tau_prime) * nd.interval_mass(lo_p, tau_prime))
    return float(out) if np.ndim(out) == 0 else out


def d_ratio_range(tau, tau_prime):
    """Open range ``(Phi(tau)/Phi(tau'), phi(tau)/phi(tau'))`` of ``d_ratio`` over ``mu > 0``.

    The infimum is the ``mu -> inf`` limit, the supremum the ``mu -> 0`` limit.
    """
    tau = np.asarray(tau, dtype=float)
    tau_prime = np.asarray(tau_prime, dtype=float)
    inf = nd.cdf(tau) / nd.cdf(tau_prime)
    sup = np.exp(0.5 * (tau_prime - tau) * (tau_prime + tau))
    return inf, sup


def _solve_mu_vec(target, tau, tau_prime):
    """Vectorized bisection for ``d_ratio(mu) = target``; ``nan`` where unsolvable."""
    target, tau, tau_prime = np.broadcast_arrays(
        np.asarray(target, float), np.asarray(tau, float), np.asarray(tau_prime, float))
    inf, sup = d_ratio_range(tau, tau_prime)
    ok = (target > inf) & (target < sup)
    mu = np.full(target.shape, np.nan)
    if not np.any(ok):
        return mu
    tg, ta, tp = target[ok], tau[ok], tau_prime[ok]

    lo = np.full(tg.shape, MU_LO)
    hi = np.full(tg.shape, MU_START)
    # grow the bracket until D(hi) <= target
    for _ in range(MAX_DOUBLINGS):
        grow = _d(hi, ta, tp) > tg
        if not np.any(grow):
            break
        lo = np.where(grow, hi, lo)
        hi = np.where(grow, 2.0 * hi, hi)
    # target numerically above D(MU_LO): the root sits at the bottom of the bracket
    at_floor = _d(np.full(tg.shape, MU_LO), ta, tp) <= tg

    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        active = (mid > lo) & (mid < hi)
        if not np.any(active):
            break
        above = _d(mid, ta, tp) > tg
        lo = np.where(active & above, mid, lo)
        hi = np.where(active & ~above, mid, hi)
    root = np.where(at_floor, MU_LO, 0.5 * (lo + hi))
    mu[ok] = root
    return mu


def solve_mu(target, tau, tau_prime):
    """Unique ``mu > 0`` with ``d_ratio(mu, tau, tau') == target``, or ``None``.

    ``None`` is returned when ``target`` lies outside the open range given by
    :func:`d_ratio_range`. Array arguments are solved elementwise and give an
    array with ``nan`` where there is no solution. Bisection brackets the root in ``[1e-8, mu_hi]``
    with ``mu_hi`` doubled from 1 (at most six times) and then halves the
    bracket until it stops shrinking in floating point.
    """
    _check_pair(tau, tau_prime)
    mu = _solve_mu_vec(target, tau, tau_prime)
    if mu.ndim:
        return mu
    mu = float(mu)
    return None if math.isnan(mu) else mu


def two_point_from_deficits(tau, deficit, tau_prime, deficit_prime):
    """Two-point mixture with ``Phi - F`` equal to the given deficits at ``tau < tau'``.

    Returns ``(epsilon, mu)`` or ``None`` when the deficit ratio is outside
    the range of ``d_ratio``.
    """
    _check_pair(tau, tau_prime)
    if not (deficit > 0 and deficit_prime > 0):
        raise ValueError("deficits Phi(t) - F(t) must be positive")
    mu = solve_mu(deficit / deficit_prime, tau, tau_prime)
    if mu is None:
        return None
    return deficit / nd.interval_mass(tau - mu, tau), mu


def two_point_through(tau, a, tau_prime, b):
    """Sparsest one-sided mixture through ``(tau, a)`` and ``(tau', b)``.

    The result ``(epsilon*, mu*)`` is the two-point mixture
    ``(1 - epsilon*) Phi + epsilon* Phi(. - mu*)`` with ``F(tau) = a`` and
    ``F(tau') = b``; any one-sided mixture through the same points has at
    least this much non-null mass. ``None`` if no such mixture exists.
    """
    _check_pair(tau, tau_prime)
    phi_t, phi_tp = nd.cdf(tau), nd.cdf(tau_prime)
    if not (0 < a < phi_t and 0 < b < phi_tp):
        raise ValueError("need 0 < a < Phi(tau) and 0 < b < Phi(tau_prime)")
    return two_point_from_deficits(tau, phi_t - a, tau_prime, phi_tp - b)


@dataclass(frozen=True)
class Grid:
    n: float
    points: np.ndarray

    @property
    def spacing(self):
        return 1.0 / math.sqrt(2.0 * math.log(self.n))

    def __len__(self):
        return self.points.size


def build_grid(n) -> Grid:
    """``floor(2 log n) + 1`` points ``0, h, 2h, ...`` with ``h = 1/sqrt(2 log n)``."""
    if not n >= 2:
        raise ValueError(f"the grid needs n >= 2, got {n}")
    two_log_n = 2.0 * math.log(n)
    count = math.floor(two_log_n + 1e-12) + 1
    points = np.arange(count) / math.sqrt(two_log_n)
    points.setflags(write=False)
    return Grid(n, points)


@dataclass(frozen=True)
class PairEstimate:
    """Fit of the pair ``(t_j, t_k)``; indices are 1-based."""

    j: int
    mu_hat: float | None
    eps_hat: float
    k: int | None = None


@dataclass(frozen=True)
class EstimateResult:
    """Grid estimate plus per-pair diagnostics.

    ``winner`` is the 1-based index ``j`` of the first pair attaining the
    maximum, or ``None`` when every pair gives 0. ``clamped`` flags that the
    raw maximum exceeded 1.
    """

    eps_hat: float
    winner: int | None
    pairs: tuple
    a_n: float
    clamped: bool = False

    @property
    def mu_hat(self):
        if self.winner is None:
            return None
        return self.pairs[self.winner - 1].mu_hat

    @property
    def winner_pair(self):
        """1-based ``(j, k)`` of the winning pair, or ``None``."""
        if self.winner is None:
            return None
        return self.winner, self.pairs[self.winner - 1].k


PAIRINGS = ("adjacent", "all")


def cjl_estimate(sample: SortedSample, a_n: float, grid: Grid | None = None,
                 pairing: str = "adjacent") -> EstimateResult:
    """Maximum over grid pairs of the envelope-shifted two-point fit.

    For the pair ``tau = t_j < tau' = t_k`` the target ratio is
    ``(Phi(tau) - F^+(tau)) / (Phi(tau') - F^-(tau'))``; a pair contributes
    0 unless both parts are positive and the ratio is in the range of
    ``d_ratio``. Everything is computed from empirical survival counts so
    upper grid points keep their precision.

    ``pairing="adjacent"`` uses ``k = j + 1`` only. ``pairing="all"`` uses
    every ``j < k``; each pair is still a valid lower bound, and at moderate
    ``n`` wider pairs are often the only solvable ones because the envelope
    is wider than the change in deficit between neighbouring points. With
    ``"all"``, ``pairs`` keeps the best partner of each ``j``.
    """
    if pairing not in PAIRINGS:
        raise ValueError(f"pairing must be one of {PAIRINGS}, got {pairing!r}")
    if not isinstance(sample, SortedSample):
        sample = SortedSample(sample)
    if a_n < 0:
        raise ValueError("a_n must be nonnegative")
    n = sample.n
    if grid is None:
        grid = build_grid(n)
    t = grid.points
    surv = sample.esf(t)
    null_surv = nd.sf(t)
    # envelope of the survival function: S^- = 1 - F^+, S^+ = 1 - F^-
    s_lo, s_hi = envelope_bounds(surv, a_n, n)
    num_all = s_lo - null_surv
    den_all = s_hi - null_surv
    m = t.size
    if pairing == "adjacent":
        jj, kk = np.arange(m - 1), np.arange(1, m)
    else:
        jj, kk = np.triu_indices(m, k=1)
    num, den = num_all[jj], den_all[kk]
    tau, tau_p = t[jj], t[kk]

    usable = (num > 0) & (den > 0)
    mu = np.full(num.shape, np.nan)
    if np.any(usable):
        mu[usable] = _solve_mu_vec(num[usable] / den[usable], tau[usable], tau_p[usable])
    eps = np.zeros(num.shape)
    solved = ~np.isnan(mu)
    if np.any(solved):
        eps[solved] = num[solved] / nd.interval_mass(tau[solved] - mu[solved], tau[solved])

    # best pair for each left point j
    best_eps = np.zeros(max(m - 1, 0))
    best_mu = np.full(max(m - 1, 0), np.nan)
    best_k = np.arange(1, m)
    for j in range(best_eps.size):
        idx = np.flatnonzero(jj == j)
        top = idx[np.argmax(eps[idx])]
        best_eps[j], best_mu[j] = eps[top], mu[top]
        if eps[top] > 0:
            best_k[j] = kk[top]

    raw = float(best_eps.max()) if best_eps.size else 0.0
    pairs = tuple(
        PairEstimate(j + 1, None if np.isnan(best_mu[j]) else float(best_mu[j]),
                     float(min(best_eps[j], 1.0)), int(best_k[j]) + 1)
        for j in range(best_eps.size)
    )
    winner = int(np.argmax(best_eps)) + 1 if raw > 0 else None
    return EstimateResult(min(max(raw, 0.0), 1.0), winner, pairs, float(a_n), raw > 1.0)


def to_pvalues(sample: SortedSample):
    """One-sided p-values ``1 - Phi(X)`` in ascending order, with their complements."""
    if not isinstance(sample, SortedSample):
        sample = SortedSample(sample)
    x = sample.values[::-1]
    return nd.sf(x), nd.cdf(x)


def _mr_numerators(p, q, a_star):
    """Numerators ``V_n(t) - t - (a*/sqrt n) sqrt(t (1 - t))`` at each jump.

    Returns values just after and just before every sorted p-value, with
    ``q = 1 - p`` used near 1.
    """
    n = p.size
    i = np.arange(1, n + 1, dtype=float)
    after = np.where(p < 0.5, i / n - p, q - (n - i) / n)
    before = after - 1.0 / n
    slack = a_star / math.sqrt(n) * np.sqrt(p * q)
    return after - slack, before - slack


def _prepare_uniform(pvalues, complement):
    p = np.asarray(pvalues, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("need at least one p-value")
    q = 1.0 - p if complement is None else np.asarray(complement, dtype=float).ravel()
    if np.any(p[1:] < p[:-1]):
        order = np.argsort(p, kind="stable")
        p, q = p[order], q[order]
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    return p, q


def mr_lower_bound(pvalues, a_star, complement=None):
    """Meinshausen-Rice lower bound
    ``sup_t [V_n(t) - t - (a*/sqrt n) sqrt(t(1-t))] / (1 - t)`` clamped to [0, 1].

    ``pvalues`` are on the uniform scale; ``complement`` optionally supplies
    ``1 - p`` computed without cancellation (see :func:`to_pvalues`).
    """
    p, q = _prepare_uniform(pvalues, complement)
    after, before = _mr_numerators(p, q, a_star)
    keep = q > 0
    if not np.any(keep):
        return 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.maximum(after[keep], before[keep]) / q[keep]
    return float(min(max(np.max(vals), 0.0), 1.0))


def mr_plus_lower_bound(pvalues, a_star, complement=None):
    """Same supremum as :func:`mr_lower_bound` without the ``1 - t`` denominator."""
    p, q = _prepare_uniform(pvalues, complement)
    after, before = _mr_numerators(p, q, a_star)
    best = max(float(np.max(after)), float(np.max(before)))
    return min(max(best, 0.0), 1.0)


def _deficit(true_cdf, t):
    # Phi(t) - F(t), as F_bar(t) - Phi_bar(t) when a survival function exists
    sf = getattr(true_cdf, "sf", None)
    if sf is not None:
        return sf(t) - nd.sf(t), getattr(true_cdf, "cdf")(t), sf(t)
    f = true_cdf(t)
    return nd.cdf(t) - f, f, 1.0 - f


def oracle_cjl_approx(t, true_cdf, mu, a_n, n):
    """Noise-free proxy of the grid estimator at a single threshold ``t``:
    ``[Phi(t) - F(t) - (a_n/sqrt n) sqrt(F(1-F))] / [Phi(t) - Phi(t - mu)]``.
    """
    if not mu > 0:
        raise ValueError("mu must be positive (the denominator vanishes otherwise)")
    deficit, f, s = _deficit(true_cdf, t)
    return (deficit - a_n / math.sqrt(n) * math.sqrt(f * s)) / nd.interval_mass(t - mu, t)


def oracle_mr_approx(t, true_cdf, a_star, n):
    """Noise-free proxy of the Meinshausen-Rice bound at threshold ``t``:
    ``[Phi(t) - F(t) - (a*/sqrt n) sqrt(Phi(1-Phi))] / Phi(t)``.
    """
    phi = nd.cdf(t)
    if not phi > 0:
        raise ValueError("Phi(t) must be positive")
    deficit, _, _ = _deficit(true_cdf, t)
    return (deficit - a_star / math.sqrt(n) * math.sqrt(phi * nd.sf(t))) / phi
