"""
No singular orbit, no curvature homogeneity
===========================================

With every orbit principal the lengths are sums of exponentials.  A random
sweep over those ansatzes, including the strata with tied rates, never finds
a curvature homogeneous metric.  Near a zero of one length the Laurent
expansion of a component shows the same obstruction as a pole.
"""

import numpy as np

from cohomcurv.classifier import MIXED_FAMILY, laurent_boundary, mixed_leading_k23, run_sweep

report = run_sweep(draws=10_000, seed=0)
print(f"{report.ch_count} CH verdicts out of {report.draws}, smallest deviation {report.min_deviation:.3f}")
worst = sorted(report.per_stratum.items(), key=lambda kv: kv[1]["min_deviation"])[:5]
for name, s in worst:
    print(f"  {name:35s} draws={s['draws']:4d} min deviation={s['min_deviation']:.3f}")

# the mixed family: linear, trigonometric and hyperbolic lengths
params = (1, 0.3, 0.5, 1, 0.4, 0.2, 1)
prof = laurent_boundary(MIXED_FAMILY, params)
print("k23 Laurent coefficients from order -4:", np.round(prof.coeffs, 6))
a1, _, b2, _, a3, b3, _ = params
print("order -2 closed form:", mixed_leading_k23(a1, b2, a3, b3))

# on b2 = a3 + b3 the pole disappears
tied = laurent_boundary(MIXED_FAMILY, (1, 0.3, 0.6, 1, 0.4, 0.2, 1))
print("tied stratum order -2:", tied.coefficient(-2))
