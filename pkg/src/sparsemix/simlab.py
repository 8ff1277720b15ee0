"""Seeded, parallel experiment runner.

Replication studies draw one sample per cycle and evaluate every requested
(estimator, level) pair on it, so comparisons are paired. Cycle ``k`` draws
from ``PCG64(SeedSequence(seed, spawn_key=(k,)))``; results are collected in
cycle order, so every output file is byte-identical for any worker count.

Files written by :func:`run_replication_study`:

``summary.csv``
    one row per (estimator, alpha) with the aggregates of ``eps_hat/eps``.
``cycles.csv``
    every cycle's raw ``eps_hat`` and ratio, from which the summary can be
    recomputed.
``histogram.csv``
    50 equal-width bins of ``eps_hat/eps`` over ``[0, max(3, observed max)]``,
    an overflow bin and ``log10(1 + count)``.
``report.json``
    the configuration, its hash, the summary rows and the histograms.

CSV files start with a ``#`` line naming the columns and the config hash;
floats are written with 12 significant digits.
"""

import dataclasses
import functools
import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import estimator as est
from .empirical import (
    DEFAULT_C0,
    STAT_KINDS,
    CriticalValueTable,
    SortedSample,
    cycle_rng,
    make_rng,
    simulate_sup_statistic,
)
from ._parallel import run_indexed
from .mixture import (
    SAMPLING_MODES,
    SparseCalibration,
    TwoPointMixture,
    detection_boundary,
    is_detectable,
    mr_consistent,
    sample,
)

log = logging.getLogger(__name__)

__all__ = [
    "ESTIMATORS",
    "ExperimentConfig",
    "SummaryRow",
    "ReplicationReport",
    "mse_regime_a_n",
    "table_path",
    "load_config",
    "parse_config_text",
    "run_calibration",
    "ensure_tables",
    "run_replication_study",
    "run_boundary_map",
    "estimate_from_file",
    "EstimateReport",
    "format_float",
]

ESTIMATORS = ("cjl", "mr", "mr_plus")
TABLE2_ALPHAS = (0.005, 0.01, 0.025, 0.05, 0.075, 0.1, 0.25, 0.5)
HIST_BINS = 50
HIST_MIN_TOP = 3.0
SIG_DIGITS = 12


def format_float(x):
    """12 significant digits; ``nan``/``inf`` spelled out."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{SIG_DIGITS}g}"


def mse_regime_a_n(n):
    """``4 sqrt(2 pi) (log n)**1.5``, the envelope width used for the MSE rate."""
    return 4.0 * math.sqrt(2.0 * math.pi) * math.log(n) ** 1.5


def table_path(table_dir, statistic, n):
    return os.path.join(table_dir, f"{statistic}_n{int(n)}.json")


@dataclass(frozen=True)
class ExperimentConfig:
    """All inputs of a replication study.

    The truth is either ``(beta, r)`` (``epsilon = n**-beta``,
    ``mu = sqrt(2 r log n)``) or an explicit ``(epsilon, mu)``; ``epsilon = 0``
    gives a pure null sample. ``a_n`` overrides the envelope width of the grid
    estimator at every level; the string ``"mse"`` selects
    :func:`mse_regime_a_n`. Critical values come from tables under
    ``table_dir`` (see :func:`table_path`); missing tables are an error
    unless ``calibrate_missing`` is set, in which case they are simulated
    with ``calibration_reps`` replicates and stored there.
    """

    n: int
    beta: float | None = None
    r: float | None = None
    epsilon: float | None = None
    mu: float | None = None
    sampling: str = "binomial"
    estimators: tuple = ("cjl", "mr")
    alphas: tuple = (0.05,)
    reps: int = 100
    calibration_reps: int = 1000
    seed: int = 0
    a_n: float | str | None = None
    cjl_stat: str = "wn_plus"
    mr_stat: str = "wn_star"
    c0: float = DEFAULT_C0
    pairing: str = "adjacent"
    table_dir: str = "tables"
    calibrate_missing: bool = False
    workers: int = 1

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "n", int(self.n))
        set_(self, "estimators", tuple(self.estimators))
        set_(self, "alphas", tuple(float(a) for a in self.alphas))
        if self.n < 2:
            raise ValueError("n must be at least 2")
        has_br = self.beta is not None or self.r is not None
        has_em = self.epsilon is not None or self.mu is not None
        if has_br == has_em:
            raise ValueError("give either (beta, r) or (epsilon, mu), not both or neither")
        if has_br:
            SparseCalibration(self.n, self.beta, self.r)
        else:
            if self.epsilon is None or not 0.0 <= self.epsilon <= 1.0:
                raise ValueError("epsilon must lie in [0, 1]")
            if self.epsilon > 0 and (self.mu is None or not self.mu > 0):
                raise ValueError("mu must be positive when epsilon > 0")
        if self.sampling not in SAMPLING_MODES:
            raise ValueError(f"sampling must be one of {SAMPLING_MODES}")
        if not self.estimators or any(e not in ESTIMATORS for e in self.estimators):
            raise ValueError(f"estimators must be a nonempty subset of {ESTIMATORS}")
        if len(set(self.estimators)) != len(self.estimators):
            raise ValueError("estimators must not repeat")
        if not self.alphas or any(not 0.0 < a < 1.0 for a in self.alphas):
            raise ValueError("alphas must lie in (0, 1)")
        if any(b <= a for a, b in zip(self.alphas, self.alphas[1:])):
            raise ValueError("alphas must be strictly increasing")
        if self.reps < 1 or self.calibration_reps < 1:
            raise ValueError("reps and calibration_reps must be at least 1")
        if self.cjl_stat not in STAT_KINDS or self.mr_stat not in STAT_KINDS:
            raise ValueError(f"statistics must be among {STAT_KINDS}")
        if self.pairing not in est.PAIRINGS:
            raise ValueError(f"pairing must be one of {est.PAIRINGS}")
        if isinstance(self.a_n, str):
            if self.a_n != "mse":
                raise ValueError("a_n must be a number or 'mse'")
        elif self.a_n is not None and not self.a_n >= 0:
            raise ValueError("a_n must be nonnegative")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    @property
    def model(self) -> TwoPointMixture | None:
        """The true mixture, or ``None`` for a null (``epsilon = 0``) truth."""
        if self.beta is not None:
            cal = SparseCalibration(self.n, self.beta, self.r)
            return TwoPointMixture(cal.epsilon, cal.mu)
        if self.epsilon == 0:
            return None
        return TwoPointMixture(self.epsilon, self.mu)

    @property
    def true_epsilon(self):
        model = self.model
        return 0.0 if model is None else model.epsilon

    def cjl_a_n(self):
        if self.a_n == "mse":
            return mse_regime_a_n(self.n)
        return self.a_n

    def to_dict(self):
        return dataclasses.asdict(self)

    def config_hash(self):
        """Hash of every field that affects results (``workers`` excluded)."""
        doc = self.to_dict()
        doc.pop("workers")
        doc.pop("table_dir")
        doc.pop("calibrate_missing")
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


_INT_KEYS = {"n", "reps", "calibration_reps", "seed", "workers"}
_FLOAT_KEYS = {"beta", "r", "epsilon", "mu", "c0"}
_BOOL_KEYS = {"calibrate_missing"}


def _coerce(key, value):
    if key in _INT_KEYS:
        return int(float(value)) if "e" in value.lower() else int(value)
    if key in _FLOAT_KEYS:
        return float(value)
    if key in _BOOL_KEYS:
        low = value.lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise ValueError(f"expected a boolean, got {value!r}")
        return low in ("true", "1", "yes")
    if key == "alphas":
        return tuple(float(v) for v in value.split(",") if v.strip())
    if key == "estimators":
        return tuple(v.strip() for v in value.split(",") if v.strip())
    if key == "a_n":
        return value if value == "mse" else float(value)
    return value


def parse_config_text(text, source="<config>"):
    """Parse flat ``key = value`` lines (``#`` starts a comment) into a dict."""
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ValueError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _coerce(key, value)
        except ValueError as exc:
            raise ValueError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
    return out


def load_config(path, **overrides) -> ExperimentConfig:
    """Read a config file; keyword overrides (e.g. from the CLI) win."""
    try:
        with open(path, encoding="utf-8") as fh:
            values = parse_config_text(fh.read(), source=path)
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    values.update({k: v for k, v in overrides.items() if v is not None})
    if "n" not in values:
        raise ValueError(f"{path}: n is required")
    return ExperimentConfig(**values)


# ---------------------------------------------------------------- calibration

def run_calibration(n, statistic, reps, alphas, seed=0, out=None, c0=DEFAULT_C0, workers=1):
    """Simulate ``statistic`` and return (and optionally save) its quantile table."""
    if statistic not in STAT_KINDS:
        raise ValueError(f"unknown statistic {statistic!r}; expected one of {STAT_KINDS}")
    alphas = tuple(float(a) for a in alphas)
    if not alphas or any(not 0.0 < a < 1.0 for a in alphas):
        raise ValueError("alphas must lie in (0, 1)")
    if out is not None:
        parent = os.path.dirname(os.path.abspath(out))
        if not os.path.isdir(parent):
            raise OSError(f"cannot write critical-value table to {out}: no such directory")
    draws = simulate_sup_statistic(statistic, n, c0=c0, reps=reps, seed=seed, workers=workers)
    table = CriticalValueTable.from_draws(
        statistic, n, draws, alphas, seed, c0 if statistic == "wn_plus_plus" else None)
    if out is not None:
        table.save(out)
    return table


def _needed_stats(config):
    stats = []
    if "cjl" in config.estimators and config.a_n is None:
        stats.append(config.cjl_stat)
    if {"mr", "mr_plus"} & set(config.estimators) and config.mr_stat not in stats:
        stats.append(config.mr_stat)
    return stats


def ensure_tables(config: ExperimentConfig):
    """Load (or, if allowed, create) every table the study needs."""
    tables = {}
    for stat in _needed_stats(config):
        path = table_path(config.table_dir, stat, config.n)
        ok = os.path.exists(path)
        if ok:
            table = CriticalValueTable.load(path, n=config.n, statistic=stat)
            ok = all(any(abs(a - b) <= 1e-12 for b in table.entries) for a in config.alphas)
            if not ok and not config.calibrate_missing:
                raise KeyError(f"table ({stat}, n={config.n}) at {path} lacks alphas "
                               f"{list(config.alphas)}")
        if not ok:
            if not config.calibrate_missing:
                raise KeyError(f"missing critical-value table ({stat}, n={config.n}): {path}")
            os.makedirs(config.table_dir, exist_ok=True)
            # distinct seed streams per statistic so tables are independent
            stat_seed = int(np.random.SeedSequence(
                [config.seed, STAT_KINDS.index(stat)]).generate_state(1)[0])
            table = run_calibration(config.n, stat, config.calibration_reps, config.alphas,
                                    seed=stat_seed, out=path, c0=config.c0,
                                    workers=config.workers)
        tables[stat] = table
    return tables


# ---------------------------------------------------------------- replication

def _levels(config, tables):
    """``{(estimator, alpha): a}`` for every requested pair."""
    out = {}
    for name in config.estimators:
        for alpha in config.alphas:
            if name == "cjl":
                a = config.cjl_a_n()
                if a is None:
                    a = tables[config.cjl_stat].value(alpha)
            else:
                a = tables[config.mr_stat].value(alpha)
            out[(name, alpha)] = float(a)
    return out


def _draw(config, rng):
    model = config.model
    if model is None:
        return SortedSample(np.sort(rng.standard_normal(config.n)), assume_sorted=True)
    return sample(model, config.n, mode=config.sampling, rng=rng)


def _run_cycle(index, config, levels):
    x = _draw(config, cycle_rng(config.seed, index))
    grid = est.build_grid(config.n)
    pvals = None
    out = []
    for (name, alpha), a in levels.items():
        if name == "cjl":
            res = est.cjl_estimate(x, a, grid=grid, pairing=config.pairing)
            out.append((res.eps_hat, res.mu_hat, res.winner))
            continue
        if pvals is None:
            pvals = est.to_pvalues(x)
        fn = est.mr_lower_bound if name == "mr" else est.mr_plus_lower_bound
        out.append((fn(pvals[0], a, complement=pvals[1]), None, None))
    return out


@dataclass(frozen=True)
class SummaryRow:
    estimator: str
    alpha: float
    statistic: str | None
    a: float
    a_normalized: float
    overest_freq: float
    maximum: float
    mean: float
    median: float
    deviation: float
    rel_mse: float
    plus_risk: float


@dataclass
class ReplicationReport:
    config: ExperimentConfig
    rows: list
    histograms: dict
    eps_hat: dict = field(repr=False)

    def row(self, estimator, alpha):
        for r in self.rows:
            if r.estimator == estimator and abs(r.alpha - alpha) <= 1e-12:
                return r
        raise KeyError((estimator, alpha))

    def ratios(self, estimator, alpha):
        eps = self.config.true_epsilon
        if eps == 0:
            raise ValueError("ratios are undefined for a null truth")
        return self.eps_hat[(estimator, alpha)] / eps

    def to_dict(self):
        config = self.config.to_dict()
        config.pop("workers")  # outputs must not depend on the worker count
        return {
            "config": config,
            "config_hash": self.config.config_hash(),
            "true_epsilon": self.config.true_epsilon,
            "rows": [dataclasses.asdict(r) for r in self.rows],
            "histograms": [
                {"estimator": k[0], "alpha": k[1], **h} for k, h in self.histograms.items()
            ],
        }


def _summarize(name, alpha, statistic, a, eps_hat, eps_true, n):
    norm = a / math.sqrt(2.0 * math.log(math.log(n))) if n > math.e else float("nan")
    over = float(np.mean(eps_hat > eps_true))
    if eps_true == 0:
        nan = float("nan")
        return SummaryRow(name, alpha, statistic, a, norm, over, nan, nan, nan, nan, nan, nan)
    ratio = eps_hat / eps_true
    dev = float(np.std(ratio, ddof=1)) if ratio.size > 1 else 0.0
    return SummaryRow(
        name, alpha, statistic, a, norm, over,
        float(ratio.max()), float(ratio.mean()), float(np.median(ratio)), dev,
        float(np.mean((ratio - 1.0) ** 2)), float(np.mean(np.maximum(1.0 - ratio, 0.0))),
    )


def _histogram(ratio):
    top = max(HIST_MIN_TOP, float(ratio.max()) if ratio.size else 0.0)
    edges = np.linspace(0.0, top, HIST_BINS + 1)
    counts, _ = np.histogram(ratio, bins=edges)
    overflow = int(np.sum(ratio > top))
    return {
        "edges": edges.tolist(),
        "counts": counts.astype(int).tolist(),
        "overflow": overflow,
        "log_counts": np.log10(1.0 + counts).tolist(),
    }


def _write_csv(path, columns, rows, config_hash):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# columns={','.join(columns)} config_hash={config_hash}\n")
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_cell(v) for v in row) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def _json_safe(obj):
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return float(format_float(obj))
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


SUMMARY_COLUMNS = [f.name for f in dataclasses.fields(SummaryRow)]
CYCLE_COLUMNS = ["cycle", "estimator", "alpha", "eps_hat", "ratio", "mu_hat", "winner"]
HIST_COLUMNS = ["estimator", "alpha", "bin_lo", "bin_hi", "count", "log_count"]


def run_replication_study(config: ExperimentConfig, out_dir=None, tables=None):
    """Run ``config.reps`` paired cycles and aggregate per (estimator, alpha).

    ``tables`` maps statistic names to :class:`CriticalValueTable`; when
    omitted they are taken from ``config.table_dir`` via :func:`ensure_tables`.
    With ``out_dir`` the CSV and JSON files listed in the module docstring
    are written there.
    """
    if tables is None:
        tables = ensure_tables(config)
    else:
        for stat in _needed_stats(config):
            if stat not in tables:
                raise KeyError(f"missing critical-value table ({stat}, n={config.n})")
    levels = _levels(config, tables)
    job = functools.partial(_run_cycle, config=config, levels=levels)
    cycles = run_indexed(job, range(config.reps), config.workers)

    keys = list(levels)
    eps_true = config.true_epsilon
    eps_hat = {k: np.array([c[i][0] for c in cycles]) for i, k in enumerate(keys)}
    stat_of = {"cjl": None if config.a_n is not None else config.cjl_stat,
               "mr": config.mr_stat, "mr_plus": config.mr_stat}
    rows = [
        _summarize(name, alpha, stat_of[name], levels[(name, alpha)], eps_hat[(name, alpha)],
                   eps_true, config.n)
        for name, alpha in keys
    ]
    hists = {}
    if eps_true > 0:
        hists = {k: _histogram(eps_hat[k] / eps_true) for k in keys}
    report = ReplicationReport(config, rows, hists, eps_hat)

    if out_dir is not None:
        _write_outputs(report, cycles, keys, out_dir)
    return report


def _write_outputs(report, cycles, keys, out_dir):
    config = report.config
    h = config.config_hash()
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc}") from exc
    eps_true = config.true_epsilon
    _write_csv(os.path.join(out_dir, "summary.csv"), SUMMARY_COLUMNS,
               [dataclasses.astuple(r) for r in report.rows], h)
    cycle_rows = []
    for idx, cyc in enumerate(cycles):
        for (name, alpha), (e, mu, win) in zip(keys, cyc):
            ratio = e / eps_true if eps_true > 0 else None
            cycle_rows.append((idx, name, alpha, e, ratio, mu, win))
    _write_csv(os.path.join(out_dir, "cycles.csv"), CYCLE_COLUMNS, cycle_rows, h)
    hist_rows = []
    for (name, alpha), hist in report.histograms.items():
        edges = hist["edges"]
        for lo, hi, c, lc in zip(edges[:-1], edges[1:], hist["counts"], hist["log_counts"]):
            hist_rows.append((name, alpha, lo, hi, c, lc))
        hist_rows.append((name, alpha, edges[-1], float("inf"), hist["overflow"],
                          math.log10(1.0 + hist["overflow"])))
    _write_csv(os.path.join(out_dir, "histogram.csv"), HIST_COLUMNS, hist_rows, h)
    path = os.path.join(out_dir, "report.json")
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(_json_safe(report.to_dict()), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------- boundary map

def parse_range(spec):
    """``"LO:HI:STEPS"`` to ``STEPS`` evenly spaced values (``STEPS >= 2``)."""
    try:
        lo, hi, steps = spec.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise ValueError(f"expected LO:HI:STEPS, got {spec!r}") from None
    if steps < 2:
        raise ValueError(f"grid counts must be at least 2, got {steps}")
    if not lo < hi:
        raise ValueError(f"need LO < HI in {spec!r}")
    return np.linspace(lo, hi, steps)


def _boundary_cell(index, cells, n, reps, a, seed, pairing):
    beta, r = cells[index // reps]
    cal = SparseCalibration(n, beta, r)
    rng = make_rng(np.random.SeedSequence(int(seed), spawn_key=(index // reps, index % reps)))
    x = sample(TwoPointMixture(cal.epsilon, cal.mu), n, mode="fixed", rng=rng)
    return est.cjl_estimate(x, a, pairing=pairing).eps_hat / cal.epsilon


BOUNDARY_COLUMNS = ["beta", "r", "rho_star", "detectable", "mr_consistent", "median_ratio",
                    "mean_ratio", "reps"]


def run_boundary_map(betas, rs, n, reps, a, seed=0, out=None, workers=1,
                     pairing="adjacent", table_note=""):
    """Median ``eps_hat/eps`` of the grid estimator over a ``(beta, r)`` grid.

    ``a`` is the envelope width used in every cell. Returns a list of dicts
    with the columns of ``BOUNDARY_COLUMNS``; writes them as CSV when ``out``
    is given.
    """
    betas, rs = np.asarray(betas, float), np.asarray(rs, float)
    if betas.size < 2 or rs.size < 2:
        raise ValueError("grid counts must be at least 2")
    if reps < 1:
        raise ValueError("reps must be at least 1")
    cells = [(float(b), float(r)) for b in betas for r in rs]
    for b, r in cells:
        SparseCalibration(n, b, r)
    job = functools.partial(_boundary_cell, cells=cells, n=int(n), reps=int(reps), a=float(a),
                            seed=seed, pairing=pairing)
    ratios = np.asarray(run_indexed(job, range(len(cells) * reps), workers)).reshape(len(cells), reps)
    rows = []
    for (b, r), vals in zip(cells, ratios):
        cal = SparseCalibration(n, b, r)
        rows.append({
            "beta": b, "r": r, "rho_star": detection_boundary(b),
            "detectable": is_detectable(cal), "mr_consistent": mr_consistent(cal),
            "median_ratio": float(np.median(vals)), "mean_ratio": float(np.mean(vals)),
            "reps": int(reps),
        })
    if out is not None:
        blob = json.dumps({"betas": betas.tolist(), "rs": rs.tolist(), "n": int(n),
                           "reps": int(reps), "a": float(a), "seed": int(seed),
                           "pairing": pairing, "table": table_note}, sort_keys=True)
        h = hashlib.sha256(blob.encode()).hexdigest()[:16]
        _write_csv(out, BOUNDARY_COLUMNS, [[row[c] for c in BOUNDARY_COLUMNS] for row in rows], h)
    return rows


# ---------------------------------------------------------------- user data

@dataclass(frozen=True)
class EstimateReport:
    estimator: str
    n: int
    alpha: float
    statistic: str
    table_n: int
    a: float
    eps_hat: float
    winner: int | None = None
    grid_pair: tuple | None = None
    mu_hat: float | None = None
    warnings: tuple = ()

    def to_dict(self):
        return dataclasses.asdict(self)

    def to_text(self):
        lines = [
            f"estimator      {self.estimator}",
            f"n              {self.n}",
            f"alpha          {format_float(self.alpha)}",
            f"statistic      {self.statistic} (table n={self.table_n})",
            f"a              {format_float(self.a)}",
            f"lower bound    {format_float(self.eps_hat)}",
        ]
        if self.estimator == "cjl":
            if self.winner is None:
                lines.append("winning pair   none (every pair gave 0)")
            else:
                t0, t1 = self.grid_pair
                lines.append(f"winning pair   j={self.winner} "
                             f"(t={format_float(t0)}, {format_float(t1)})")
                lines.append(f"mu_hat         {format_float(self.mu_hat)}")
        lines.extend(f"warning        {w}" for w in self.warnings)
        return "\n".join(lines)


def read_zscores(path):
    """Newline-delimited decimal z-scores; blank lines are skipped."""
    values = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    x = float(line)
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: not a number: {line!r}") from None
                if not math.isfinite(x):
                    raise ValueError(f"{path}:{lineno}: value must be finite: {line!r}")
                values.append(x)
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    if not values:
        raise ValueError(f"{path}: no observations")
    return np.asarray(values)


def estimate_from_file(path, alpha, table_path, estimator="cjl", pairing="adjacent"):
    """Lower confidence bound for the non-null fraction of the z-scores in ``path``.

    The critical value comes from the table at ``table_path``. If its ``n``
    differs from the data size by at most a factor of 2 a warning is
    recorded; a larger mismatch is refused.
    """
    if estimator not in ESTIMATORS:
        raise ValueError(f"estimator must be one of {ESTIMATORS}")
    x = SortedSample(read_zscores(path))
    table = CriticalValueTable.load(table_path)
    n = x.n
    warnings = []
    if table.n != n:
        ratio = max(table.n / n, n / table.n)
        if ratio > 2.0:
            raise ValueError(f"table {table_path} is for n={table.n} but the data have n={n}; "
                             "recalibrate at the data size")
        msg = f"table n={table.n} differs from data n={n}"
        log.warning(msg)
        warnings.append(msg)
    a = table.value(alpha)
    if estimator == "cjl":
        if n < 2:
            raise ValueError("the grid estimator needs at least 2 observations")
        grid = est.build_grid(n)
        res = est.cjl_estimate(x, a, grid=grid, pairing=pairing)
        pair = None
        if res.winner is not None:
            j, k = res.winner_pair
            pair = (float(grid.points[j - 1]), float(grid.points[k - 1]))
        return EstimateReport(estimator, n, alpha, table.statistic, table.n, a, res.eps_hat,
                              res.winner, pair, res.mu_hat, tuple(warnings))
    p, q = est.to_pvalues(x)
    fn = est.mr_lower_bound if estimator == "mr" else est.mr_plus_lower_bound
    return EstimateReport(estimator, n, alpha, table.statistic, table.n, a,
                          fn(p, a, complement=q), warnings=tuple(warnings))
