"""Closed-form rates, informative thresholds and the variance ratio.

Prints the three rate regimes and compares the exact ratio
F(1 - F)/(Phi - F)^2 at the informative threshold with its leading-order
closed form as n grows.
"""

from sparsemix import mixture as mix
from sparsemix import theory

points = [(0.6, 0.15), (4 / 7, 0.5), (0.55, 0.6)]
print("regime     beta    r     MSE exponent  upper log  lower log  CI exponent")
for beta, r in points:
    cal = mix.SparseCalibration(1e6, beta, r)
    up, lo = theory.mse_upper_rate(cal), theory.mse_lower_rate(cal)
    ci_lo, _ = theory.ci_deficit_rates(cal)
    print(f"{up.regime:<10} {beta:.3f}  {r:.2f}  {up.exponent:12.4f}  {up.log_power:9.1f}  "
          f"{lo.log_power:9.1f}  {ci_lo.exponent:11.4f}")

print("\nexact / leading-order variance ratio at the informative threshold")
print("  n       " + "".join(f"({b:.3f},{r:.2f})".rjust(16) for b, r in points))
for n in (1e4, 1e7, 1e20, 1e60, 1e140):
    vals = []
    for beta, r in points:
        cal = mix.SparseCalibration(n, beta, r)
        vals.append(theory.informative_ratio_numeric(cal) / theory.lemma81_ratio(cal))
    print(f"  {n:<7.0e} " + "".join(f"{v:16.4f}" for v in vals))
