"""
Curvature homogeneous but not homogeneous
=========================================

The Tsukada metric has constant frame curvature along the whole normal
geodesic, yet the norm of the covariant derivative of its Ricci tensor
changes.  Homogeneous spaces cannot do that.
"""

import numpy as np

from cohomcurv.connection import nabla_R_norm, nabla_ricci_norm
from cohomcurv.curvature import curvature_components, is_curvature_homogeneous, ricci
from cohomcurv.metrics import catalog_get

m = catalog_get("tsukada").metric
print("metric functions:", [str(f) for f in m.functions])

# the nine frame components at a few times: identical columns
ts = np.array([0.3, 1.0, 2.5, 4.0])
cd = curvature_components(m, ts)
for name, row in zip(cd.NAMES, cd.as_vector()):
    print(f"  {name:>4}: " + "  ".join(f"{x:+.6f}" for x in row))

print("CH check:", is_curvature_homogeneous(m))

# Ricci has two distinct eigenvalues, so the metric is not Einstein
print("Ricci:", ricci(m, 1.0))

# the discriminator: |nabla Ric| moves along the geodesic
for t in (0.3, 0.8, 1.5, 3.0):
    print(f"t={t:3.1f}  |nabla Ric|={nabla_ricci_norm(m, t):8.3f}  |nabla R|={nabla_R_norm(m, t):8.3f}")

# compare with a symmetric space from the catalog
cp2 = catalog_get("ex2").metric
print("CP^2 |nabla R| at t=0.4:", nabla_R_norm(cp2, 0.4))
