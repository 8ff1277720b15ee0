"""Empirical CDF tools, the weighted confidence envelope and sup-statistics.

All suprema of the normalized uniform empirical process
``sqrt(n) |V_n(t) - t| / sqrt(t (1 - t))`` are evaluated exactly on a finite
candidate set: the window endpoints plus, for every order statistic inside
the window, the value just after the jump (``i/n``) and the left limit
(``(i-1)/n``). Between jumps ``V_n`` is flat and the weighted distance is
monotone on each side of the flat level, so nothing else can attain the sup.
"""

import functools
import json
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import normal_dist as nd
from ._parallel import run_indexed

log = logging.getLogger(__name__)

__all__ = [
    "STAT_KINDS",
    "SortedSample",
    "EnvelopeBound",
    "CriticalValueTable",
    "make_rng",
    "cycle_rng",
    "sorted_uniforms",
    "ecdf_at",
    "envelope",
    "envelope_bounds",
    "weighted_sup",
    "y_n_statistic",
    "sup_statistic",
    "simulate_sup_statistic",
    "critical_value",
]

STAT_KINDS = ("wn_plus", "wn_plus_plus", "wn_star")
DEFAULT_C0 = 3.0
MIN_PERSIST_REPS = 1000


def make_rng(seed=None):
    """``numpy`` Generator (PCG64) from an int, a SeedSequence or ``None``."""
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.PCG64(seed))


def cycle_rng(seed: int, index: int):
    """Independent stream for replicate ``index`` under master ``seed``.

    The stream is ``PCG64(SeedSequence(seed, spawn_key=(index,)))``: it
    depends only on the pair, never on execution order or worker count.
    """
    return make_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def sorted_uniforms(rng, n):
    """Sorted ``U(0, 1)`` sample of size ``n`` and its complement ``1 - u``.

    Uses normalized partial sums of ``n + 1`` standard exponentials; the
    complement is accumulated from the other end so both tails are accurate.
    """
    e = rng.standard_exponential(n + 1)
    head = np.cumsum(e)
    tail = np.cumsum(e[::-1])[::-1]
    total = head[-1]
    return head[:-1] / total, tail[1:] / total


class SortedSample:
    """``n >= 1`` finite observations held in nondecreasing order."""

    __slots__ = ("values",)

    def __init__(self, values, assume_sorted=False):
        arr = np.asarray(values, dtype=float).ravel()
        if arr.size == 0:
            raise ValueError("a sample needs at least one observation")
        if not np.all(np.isfinite(arr)):
            raise ValueError("sample values must be finite")
        if not assume_sorted and np.any(arr[1:] < arr[:-1]):
            arr = np.sort(arr)
        arr.setflags(write=False)
        self.values = arr

    @property
    def n(self):
        return self.values.size

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return f"SortedSample(n={self.n})"

    def count_le(self, t):
        return np.searchsorted(self.values, t, side="right")

    def count_lt(self, t):
        return np.searchsorted(self.values, t, side="left")

    def ecdf(self, t):
        return self.count_le(t) / self.n

    def esf(self, t):
        """Empirical survival ``#{X_i > t} / n`` (exact, no subtraction)."""
        return (self.n - self.count_le(t)) / self.n


def ecdf_at(sample: SortedSample, t):
    """Right-continuous empirical CDF ``#{X_i <= t} / n``."""
    out = sample.ecdf(t)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class EnvelopeBound:
    """``lower <= F(t) <= upper``; ``lower_c`` and ``upper_c`` are ``1 - lower``
    and ``1 - upper`` computed without cancellation."""

    lower: float
    upper: float
    lower_c: float = None
    upper_c: float = None

    def __post_init__(self):
        if self.lower_c is None:
            object.__setattr__(self, "lower_c", 1.0 - self.lower)
        if self.upper_c is None:
            object.__setattr__(self, "upper_c", 1.0 - self.upper)


def envelope_bounds(fn, a_n, n, complements=False):
    """Vectorized roots of ``n (F_n - F)**2 = a_n**2 F (1 - F)`` in ``F``.

    Returns ``(lower, upper)``, or ``(lower, upper, 1 - lower, 1 - upper)``
    with ``complements=True``. The larger root of the quadratic comes from
    the quadratic formula and the smaller from the product of roots, which
    avoids cancellation when ``F_n`` is small. The relation is symmetric
    under ``F -> 1 - F``, so for ``F_n > 1/2`` both roots are solved for the
    complement ``1 - F_n`` and reflected; the returned complements then carry
    full relative precision for roots close to 1.
    """
    fn = np.asarray(fn, dtype=float)
    a_n = np.asarray(a_n, dtype=float)
    if np.any(a_n < 0):
        raise ValueError("a_n must be nonnegative")
    if np.any((fn < 0) | (fn > 1)):
        raise ValueError("fn_t must lie in [0, 1]")
    big_a = a_n * a_n / n

    def roots(p):
        disc = np.sqrt(big_a) * np.sqrt(big_a + 4.0 * p * (1.0 - p))
        hi = (2.0 * p + big_a + disc) / (2.0 * (1.0 + big_a))
        with np.errstate(divide="ignore", invalid="ignore"):
            lo = np.where(hi > 0, p * p / ((1.0 + big_a) * hi), 0.0)
        return np.minimum(lo, p), np.clip(np.maximum(hi, p), 0.0, 1.0)

    fn_c = 1.0 - fn
    lower, upper = roots(fn)
    lo_c, hi_c = roots(fn_c)
    high = fn > 0.5
    lower_c = np.where(high, hi_c, 1.0 - lower)
    upper_c = np.where(high, lo_c, 1.0 - upper)
    lower = np.where(high, 1.0 - hi_c, lower)
    upper = np.where(high, 1.0 - lo_c, upper)
    lower, upper = np.minimum(lower, fn), np.maximum(upper, fn)
    if complements:
        return lower, upper, np.maximum(lower_c, fn_c), np.minimum(upper_c, fn_c)
    return lower, upper


def envelope(fn_t: float, a_n: float, n: int) -> EnvelopeBound:
    """Confidence envelope ``F^-_{a_n}(t) <= F(t) <= F^+_{a_n}(t)`` at one point."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    lo, hi, lo_c, hi_c = envelope_bounds(fn_t, a_n, n, complements=True)
    return EnvelopeBound(float(lo), float(hi), float(lo_c), float(hi_c))


def weighted_sup(u, v, lo=None, hi=None, lo_c=None, hi_c=None):
    """``sqrt(n) sup |V_n(t) - t| / sqrt(t (1 - t))`` over a window.

    ``u`` holds sorted uniforms and ``v = 1 - u`` (supplied separately so
    points near 1 keep precision). The window is ``[lo, hi]``; pass
    ``lo_c = 1 - lo`` / ``hi_c = 1 - hi`` for extra precision near 1. A
    missing endpoint means the open end at 0 or 1, where only jump points
    are evaluated. Returns ``nan`` when the window contains no candidate.
    """
    n = u.size
    if lo is not None and lo_c is None:
        lo_c = 1.0 - lo
    if hi is not None and hi_c is None:
        hi_c = 1.0 - hi
    if lo is not None and hi is not None and lo > hi:
        raise ValueError(f"empty window [{lo}, {hi}]")

    start = 0 if lo is None else int(np.searchsorted(u, lo, side="left"))
    # u <= hi  <=>  v >= hi_c; v is nonincreasing
    stop = n if hi is None else int(np.searchsorted(-v, -hi_c, side="right"))
    stop = max(stop, start)
    uu = u[start:stop]
    vv = v[start:stop]
    i = np.arange(start + 1, stop + 1, dtype=float)
    # i/n - u, written as (1 - u) - (n - i)/n in the upper half
    right = np.where(uu < 0.5, i / n - uu, vv - (n - i) / n)
    left = right - 1.0 / n
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.sqrt(uu * vv)
        vals = np.maximum(np.abs(right), np.abs(left)) / scale
    best = float(np.max(vals)) if vals.size else -np.inf

    for t, t_c in ((lo, lo_c), (hi, hi_c)):
        if t is None or not (0.0 < t < 1.0):
            continue
        k = np.searchsorted(u, t, side="right")
        dev = k / n - t if t < 0.5 else t_c - (n - k) / n
        best = max(best, abs(dev) / math.sqrt(t * t_c))
    if best == -np.inf:
        return float("nan")
    return math.sqrt(n) * best


def _as_cdf_pair(true_cdf):
    cdf = getattr(true_cdf, "cdf", true_cdf)
    sf = getattr(true_cdf, "sf", None)
    if sf is None:
        sf = lambda t: 1.0 - np.asarray(cdf(t), dtype=float)  # noqa: E731
    return cdf, sf


def y_n_statistic(sample: SortedSample, true_cdf) -> float:
    """Weighted discrepancy sup over ``0 <= t <= sqrt(2 log n)`` for a known ``F``.

    ``true_cdf`` is either a callable CDF or a mixture model exposing
    ``cdf``/``sf`` (preferred: keeps ``1 - F`` accurate in the upper tail).
    """
    if not isinstance(sample, SortedSample):
        sample = SortedSample(sample)
    cdf, sf = _as_cdf_pair(true_cdf)
    n = sample.n
    top = math.sqrt(2.0 * math.log(n))
    x = sample.values
    f_ends = np.asarray(cdf(np.array([0.0, top])), dtype=float)
    s_ends = np.asarray(sf(np.array([0.0, top])), dtype=float)
    if np.any(f_ends <= 0) or np.any(s_ends <= 0):
        raise ValueError("true_cdf must lie strictly inside (0, 1) on the window")

    start = int(np.searchsorted(x, 0.0, side="left"))
    stop = int(np.searchsorted(x, top, side="right"))
    pts = np.concatenate(([0.0, top], x[start:stop]))
    f = np.asarray(cdf(pts), dtype=float)
    s = np.asarray(sf(pts), dtype=float)
    n_le = sample.count_le(pts).astype(float)
    n_lt = np.concatenate(([n_le[0], n_le[1]], sample.count_lt(pts[2:]).astype(float)))
    scale = np.sqrt(f * s)

    def dev(count):
        # F_n - F, evaluated on the survival side where F is close to 1
        return np.where(f < 0.5, count / n - f, s - (n - count) / n)

    vals = np.maximum(np.abs(dev(n_le)), np.abs(dev(n_lt))) / scale
    return math.sqrt(n) * float(np.max(vals))


_PLUS_TOP_CACHE = {}


def _plus_window_top(n):
    if n not in _PLUS_TOP_CACHE:
        z = math.sqrt(2.0 * math.log(n))
        _PLUS_TOP_CACHE[n] = (nd.cdf(z), nd.sf(z))
    return _PLUS_TOP_CACHE[n]


def sup_statistic(kind, u, v, c0=DEFAULT_C0):
    """One realization of ``kind`` from sorted uniforms ``u`` (``v = 1 - u``).

    ``wn_plus``: window ``[1/2, Phi(sqrt(2 log n))]``.
    ``wn_plus_plus``: window ``[V_n(1/2) - sqrt(c0 log n / n), Phi(sqrt(2 log n))]``,
    the lower end clipped to ``1/(2n)``.
    ``wn_star``: the whole of ``(0, 1)``.
    """
    n = u.size
    if kind == "wn_star":
        return weighted_sup(u, v)
    if n < 2:
        raise ValueError(f"{kind} needs n >= 2")
    hi, hi_c = _plus_window_top(n)
    if kind == "wn_plus":
        return weighted_sup(u, v, 0.5, hi, 0.5, hi_c)
    if kind == "wn_plus_plus":
        v_half = np.searchsorted(u, 0.5, side="right") / n
        lo = v_half - math.sqrt(c0 * math.log(n) / n)
        if lo <= 0:
            lo = 0.5 / n
        if lo > hi:
            raise ValueError(f"empty wn_plus_plus window at n={n}")
        return weighted_sup(u, v, lo, hi)
    raise ValueError(f"unknown statistic kind {kind!r}; expected one of {STAT_KINDS}")


def _one_replicate(index, kind, n, c0, seed):
    u, v = sorted_uniforms(cycle_rng(seed, index), n)
    return sup_statistic(kind, u, v, c0)


def simulate_sup_statistic(kind, n, c0=DEFAULT_C0, reps=1000, seed=0, workers=1):
    """``reps`` independent realizations of a sup-statistic from ``n`` uniforms.

    Replicate ``k`` uses :func:`cycle_rng(seed, k) <cycle_rng>`, so the
    returned array is identical for any ``workers``.
    """
    if kind not in STAT_KINDS:
        raise ValueError(f"unknown statistic kind {kind!r}; expected one of {STAT_KINDS}")
    if reps < 1:
        raise ValueError("reps must be at least 1")
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    job = functools.partial(_one_replicate, kind=kind, n=n, c0=c0, seed=seed)
    return np.asarray(run_indexed(job, range(reps), workers), dtype=float)


def _upper_index(alpha, reps):
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    # round away float noise such as (1 - 0.05) * 100 = 95.00000000000001
    k = math.ceil(round((1.0 - alpha) * reps, 9))
    return min(max(k, 1), reps)


@dataclass
class CriticalValueTable:
    """Monte Carlo upper quantiles of one sup-statistic at a fixed ``n``."""

    statistic: str
    n: int
    reps: int
    seed: int
    entries: dict = field(default_factory=dict)
    c0: float | None = None

    def __post_init__(self):
        if self.statistic not in STAT_KINDS:
            raise ValueError(f"unknown statistic {self.statistic!r}")
        if self.statistic == "wn_plus_plus" and self.c0 is None:
            self.c0 = DEFAULT_C0
        if self.statistic != "wn_plus_plus":
            self.c0 = None
        self.entries = {float(a): float(v) for a, v in sorted(self.entries.items())}
        vals = list(self.entries.values())
        if any(b > a for a, b in zip(vals, vals[1:])):
            raise ValueError("critical values must be nonincreasing in alpha")

    @classmethod
    def from_draws(cls, statistic, n, draws, alphas, seed, c0=None):
        draws = np.sort(np.asarray(draws, dtype=float))
        entries = {a: float(draws[_upper_index(a, draws.size) - 1]) for a in alphas}
        return cls(statistic, int(n), int(draws.size), int(seed), entries, c0)

    def value(self, alpha):
        for a, v in self.entries.items():
            if abs(a - alpha) <= 1e-12:
                return v
        raise KeyError(
            f"alpha={alpha} not in {self.statistic} table for n={self.n} "
            f"(available: {sorted(self.entries)})"
        )

    def to_dict(self):
        return {
            "statistic": self.statistic,
            "n": self.n,
            "c0": self.c0,
            "reps": self.reps,
            "seed": self.seed,
            "quantiles": [{"alpha": a, "a": v} for a, v in self.entries.items()],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc):
        entries = {q["alpha"]: q["a"] for q in doc["quantiles"]}
        return cls(doc["statistic"], int(doc["n"]), int(doc["reps"]), int(doc["seed"]),
                   entries, doc.get("c0"))

    def save(self, path):
        if self.reps < MIN_PERSIST_REPS:
            log.warning("persisting a %s table with only %d reps (< %d)",
                        self.statistic, self.reps, MIN_PERSIST_REPS)
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(self.to_json())
        except OSError as exc:
            raise OSError(f"cannot write critical-value table to {path}: {exc}") from exc

    @classmethod
    def load(cls, path, n=None, statistic=None):
        """Read a table; reject it if ``n`` or ``statistic`` do not match."""
        if not os.path.exists(path):
            raise FileNotFoundError(f"critical-value table not found: {path}")
        with open(path, encoding="utf-8") as fh:
            table = cls.from_dict(json.load(fh))
        if n is not None and table.n != int(n):
            raise ValueError(f"table {path} is for n={table.n}, requested n={n}")
        if statistic is not None and table.statistic != statistic:
            raise ValueError(f"table {path} holds {table.statistic}, requested {statistic}")
        return table


def critical_value(table, alpha):
    """Upper ``alpha`` critical value.

    For raw draws this is the ``ceil((1 - alpha) R)``-th order statistic of
    the ``R`` values; for a :class:`CriticalValueTable` the stored entry.
    """
    if isinstance(table, CriticalValueTable):
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
        return table.value(alpha)
    draws = np.sort(np.asarray(table, dtype=float).ravel())
    if draws.size == 0:
        raise ValueError("need at least one simulated value")
    return float(draws[_upper_index(alpha, draws.size) - 1])
