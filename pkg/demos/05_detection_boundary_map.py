"""Median eps_hat/eps across the (beta, r) plane.

Cells below the detection boundary rho*(beta) carry almost no usable
signal; between rho*(beta) and the line r = 2 beta - 1 only the grid
estimator is consistent.
"""

import numpy as np

from sparsemix import simlab

n, reps = 20_000, 20
a = simlab.run_calibration(n, "wn_plus", 300, (0.25,), seed=0).value(0.25)
betas = np.linspace(0.55, 0.85, 4)
rs = np.linspace(0.1, 0.7, 4)
rows = simlab.run_boundary_map(betas, rs, n, reps, a, seed=1, pairing="all")

print(f"n={n}, {reps} reps per cell, a={a:.3f}; median eps_hat/eps "
      "(* detectable, + above r = 2 beta - 1)")
print("  r \\ beta " + "".join(f"{b:>11.3f}" for b in betas))
for r in rs[::-1]:
    cells = [row for row in rows if abs(row["r"] - r) < 1e-12]
    line = ""
    for row in sorted(cells, key=lambda c: c["beta"]):
        mark = ("*" if row["detectable"] else " ") + ("+" if row["mr_consistent"] else " ")
        line += f"{row['median_ratio']:>9.3f}{mark}"
    print(f"  {r:8.3f} " + line)
