"""The grid estimator next to the Meinshausen-Rice bound on simulated data.

One sample in the sparse calibration eps = n^-beta, mu = sqrt(2 r log n),
three lower bounds at the same level. The grid estimator is shown with
adjacent grid pairs and with every pair j < k.
"""

import math

from sparsemix import estimator as est
from sparsemix import mixture as mix
from sparsemix import simlab

n, beta, r, alpha = 100_000, 4 / 7, 0.5, 0.1
cal = mix.SparseCalibration(n, beta, r)
truth = mix.calibrate(cal)
print(f"n={n}  beta={beta:.4f}  r={r}  eps={truth.epsilon:.3e}  mu={truth.mu:.4f}")
print(f"detectable={mix.is_detectable(cal)}  above r = 2 beta - 1: {mix.mr_consistent(cal)}")

a = simlab.run_calibration(n, "wn_plus_plus", 400, (alpha,), seed=3).value(alpha)
a_star = simlab.run_calibration(n, "wn_star", 400, (alpha,), seed=4).value(alpha)
print(f"a_n={a:.4f}  a*_n={a_star:.4f}  (alpha={alpha})")

for seed in range(5):
    x = mix.sample(truth, n, seed=seed, mode="fixed")
    adjacent = est.cjl_estimate(x, a).eps_hat
    every = est.cjl_estimate(x, a, pairing="all")
    p, q = est.to_pvalues(x)
    mr = est.mr_lower_bound(p, a_star, q)
    mr_plus = est.mr_plus_lower_bound(p, a_star, q)
    print(f"  seed {seed}: eps_hat/eps  grid(adjacent)={adjacent / cal.epsilon:.3f}  "
          f"grid(all)={every.eps_hat / cal.epsilon:.3f} pair={every.winner_pair}  "
          f"MR={mr / cal.epsilon:.3f}  MR+={mr_plus / cal.epsilon:.3f}")

print(f"\ninformative thresholds: grid {mix.informative_threshold_cjl(cal):.3f}, "
      f"MR {mix.informative_threshold_mr(cal):.3f}, sqrt(2 log n) = {math.sqrt(2 * math.log(n)):.3f}")
