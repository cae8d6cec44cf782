"""
Smoothness at the singular orbit
================================

Multiplying Example 5 by a constant keeps it curvature homogeneous, but the
collapse speed at the singular orbit no longer matches the slice speed.
Integer mismatches give orbifolds, everything else is singular.
"""

from cohomcurv.metrics import catalog_get, example5
from cohomcurv.smoothness import check_entry, check_smooth

for b in (1.0, 2.0, 2.5, 3.0, 4.0, 6.0):
    r = check_smooth(example5(b))
    print(f"b={b:3.1f}  {r.verdict.value:10s} order={r.orbifold_order}  speed ratio={r.speed_ratio:.3f}")

# the catalog passes at every listed end
for id in ("ex1", "ex2", "tsukada", "ex4", "ex6", "ex9"):
    print(id, [f"{r.end}:{r.verdict.value}" for r in check_entry(catalog_get(id))])

# one length multiplied by 1.01 breaks the Taylor conditions
m = catalog_get("tsukada").metric
r = check_smooth(m.multiplied((1.0, 1.01, 1.0)))
print("perturbed Tsukada:", r.verdict.value, [(c.id, f"{c.measured:.2e}") for c in r.failures])
