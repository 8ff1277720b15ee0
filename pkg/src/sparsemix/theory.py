"""Closed-form rates for the grid estimator in the ``(beta, r)`` calibration.

Each rate is ``n**exponent * (log n)**log_power * (log log n)**loglog_power``
up to a constant that depends on ``(beta, r)`` only and is not modelled.
Three regimes split the detectable region: ``beta >= 3 r``, ``r < beta < 3 r``
and ``beta <= r``. The exponents are continuous across the regime boundaries,
so ties only change the log power; ``beta == 3 r`` goes to the first regime
and ``beta == r`` to the last.
"""

import math
from dataclasses import dataclass

from . import normal_dist as nd
from .mixture import (
    SparseCalibration,
    calibrate,
    cjl_threshold_exponent,
    is_detectable,
    mixture_cdf,
    mixture_sf,
)

__all__ = [
    "REGIMES",
    "RateRegime",
    "regime_of",
    "mse_upper_rate",
    "mse_lower_rate",
    "ci_deficit_rates",
    "lemma81_ratio",
    "ratio_numeric",
    "informative_ratio_numeric",
]

REGIMES = ("BetaGe3r", "Middle", "BetaLeR")


@dataclass(frozen=True)
class RateRegime:
    regime: str
    exponent: float
    log_power: float
    loglog_power: float = 0.0

    def value(self, n):
        """Evaluate the rate at ``n`` (constant taken as 1)."""
        log_n = math.log(n)
        out = n ** self.exponent * log_n ** self.log_power
        if self.loglog_power:
            out *= math.log(log_n) ** self.loglog_power
        return out


def regime_of(beta: float, r: float) -> str:
    if beta >= 3.0 * r:
        return "BetaGe3r"
    if beta > r:
        return "Middle"
    return "BetaLeR"


def _mse_exponent(beta, r, regime):
    if regime == "BetaGe3r":
        return -1.0 - 2.0 * r + 2.0 * beta
    if regime == "Middle":
        return -1.0 + (beta + r) ** 2 / (4.0 * r)
    return -1.0 + beta


def _require_detectable(cal: SparseCalibration):
    if not is_detectable(cal):
        raise ValueError(f"(beta={cal.beta}, r={cal.r}) is not detectable")
    return regime_of(cal.beta, cal.r)


def _rate(cal, log_powers, scale=1.0, loglog_power=0.0):
    regime = _require_detectable(cal)
    exponent = scale * _mse_exponent(cal.beta, cal.r, regime)
    return RateRegime(regime, exponent, log_powers[REGIMES.index(regime)], loglog_power)


def mse_upper_rate(cal: SparseCalibration) -> RateRegime:
    """Upper bound on ``E(eps_hat/eps - 1)**2`` at ``a_n = 4 sqrt(2 pi) (log n)**1.5``."""
    return _rate(cal, (5.5, 5.5, 4.0))


def mse_lower_rate(cal: SparseCalibration) -> RateRegime:
    """Minimax lower bound on the relative mean squared error."""
    return _rate(cal, (1.0, 2.5, 0.0))


def ci_deficit_rates(cal: SparseCalibration):
    """Rates for ``E(1 - eps_hat/eps)_+`` of a lower confidence limit.

    Returns ``(lower, upper)``: the minimax lower bound over all limits with
    the nominal coverage, and the upper bound achieved by the grid estimator.
    Both exponents are half the mean squared error exponent.
    """
    lower = _rate(cal, (0.5, 1.25, 0.0), scale=0.5)
    upper = _rate(cal, (1.25, 1.25, 0.0), scale=0.5, loglog_power=0.5)
    return lower, upper


def lemma81_ratio(cal: SparseCalibration) -> float:
    """Leading term of ``F(1 - F) / (Phi - F)**2`` at the informative threshold.

    The threshold is ``sqrt(2 q log n)`` with ``q`` from
    :func:`~sparsemix.mixture.cjl_threshold_exponent`. In the middle regime
    the Mills-ratio expansion gives the coefficient
    ``beta (beta - r) / (beta + r) * sqrt(4 pi log n / r)``. Convergence is
    slow there: at ``n = 1e7`` the exact ratio is still several times larger.
    """
    regime = _require_detectable(cal)
    beta, r, n, log_n = cal.beta, cal.r, cal.n, cal.log_n
    if regime == "BetaGe3r":
        return math.sqrt(math.pi * r * log_n) * n ** (2.0 * beta - 2.0 * r)
    if regime == "Middle":
        coef = beta * (beta - r) / (beta + r)
        return coef * math.sqrt(4.0 * math.pi * log_n / r) * n ** ((beta + r) ** 2 / (4.0 * r))
    return 2.0 * n ** beta


def ratio_numeric(model, t: float) -> float:
    """``F(t)(1 - F(t)) / (Phi(t) - F(t))**2`` evaluated exactly.

    ``model`` is a mixture with ``epsilon`` and ``atoms``, a
    :class:`~sparsemix.mixture.SparseCalibration`, or a plain CDF callable.
    """
    if isinstance(model, SparseCalibration):
        model = calibrate(model)
    if hasattr(model, "atoms"):
        f, s = mixture_cdf(model, t), mixture_sf(model, t)
        # Phi(t) - F(t) = eps sum_k w_k [Phi(t) - Phi(t - mu_k)], free of cancellation
        deficit = model.epsilon * sum(w * nd.interval_mass(t - m, t) for m, w in model.atoms)
    else:
        f = float(model(t))
        s = 1.0 - f
        deficit = nd.cdf(t) - f
    if not deficit > 0:
        raise ValueError("need Phi(t) > F(t); the ratio is undefined otherwise")
    return f * s / deficit ** 2


def informative_ratio_numeric(cal: SparseCalibration) -> float:
    """:func:`ratio_numeric` at the informative threshold of ``cal``."""
    _require_detectable(cal)
    q = cjl_threshold_exponent(cal.beta, cal.r)
    return ratio_numeric(cal, math.sqrt(2.0 * q * cal.log_n))
