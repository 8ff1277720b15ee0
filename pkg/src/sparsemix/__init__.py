"""Lower confidence bounds and estimators for the non-null fraction of a sparse normal mixture."""

from . import empirical, estimator, mixture, normal_dist, simlab, theory
from .empirical import (
    CriticalValueTable,
    SortedSample,
    critical_value,
    envelope,
    envelope_bounds,
    simulate_sup_statistic,
    sup_statistic,
    y_n_statistic,
)
from .estimator import (
    build_grid,
    cjl_estimate,
    d_ratio,
    mr_lower_bound,
    mr_plus_lower_bound,
    solve_mu,
    to_pvalues,
    two_point_through,
)
from .mixture import (
    DiscreteOneSidedMixture,
    SparseCalibration,
    TwoPointMixture,
    calibrate,
    detection_boundary,
    sample,
)
from .simlab import ExperimentConfig, run_replication_study

__version__ = "0.1.0"
