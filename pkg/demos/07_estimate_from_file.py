"""Command-line workflow on a file of z-scores.

Calibrates a table at the data size, then asks for a 95% lower bound with
the grid estimator and with the Meinshausen-Rice bound.
"""

import os
import tempfile

import numpy as np

from sparsemix.cli import main

work = tempfile.mkdtemp(prefix="sparsemix_cli_")
rng = np.random.default_rng(5)
n = 50_000
z = rng.standard_normal(n)
z[:500] += 3.0  # 1% signals
data = os.path.join(work, "z.txt")
np.savetxt(data, z, fmt="%.10f")

for stat in ("wn_plus_plus", "wn_star"):
    main(["calibrate", "--n", str(n), "--stat", stat, "--reps", "400", "--alphas", "0.05",
          "--seed", "1", "--out", os.path.join(work, f"{stat}.json")])

print()
main(["estimate", "--input", data, "--alpha", "0.05", "--pairing", "all",
      "--table", os.path.join(work, "wn_plus_plus.json")])
print()
main(["estimate", "--input", data, "--alpha", "0.05", "--estimator", "mr",
      "--table", os.path.join(work, "wn_star.json")])
