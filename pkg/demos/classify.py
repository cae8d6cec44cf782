"""
Matching metrics against the catalog
====================================

A curvature homogeneous input is matched to a catalog entry up to homothety,
relabelling of the lengths and reversal of the geodesic.
"""

import math

from cohomcurv import analytic as an
from cohomcurv.classifier import classify_metric
from cohomcurv.metrics import DiagonalMetric, catalog_get, scale_metric

cases = {
    "3 sin, 3 cos, 3": DiagonalMetric(an.sin(1, 3.0), an.cos(1, 3.0), an.const(3.0), (0.0, math.pi / 2)),
    "Tsukada scaled by 2": scale_metric(catalog_get("tsukada").metric, 2.0),
    "CP^2 lengths reordered": DiagonalMetric(*reversed(catalog_get("ex2").metric.functions),
                                             catalog_get("ex2").metric.domain),
    "line x Berger sphere": DiagonalMetric(an.const(1), an.const(1), an.const(2), (-math.inf, math.inf)),
    "sin, cos, 1.1": DiagonalMetric(an.sin(1), an.cos(1), an.const(1.1), (0.0, math.pi / 2)),
}
for label, m in cases.items():
    c = classify_metric(m)
    if c.match is None:
        print(f"{label:24s} {c.outcome}  (deviation {c.ch.max_deviation:.2e})")
    else:
        mt = c.match
        print(f"{label:24s} {c.outcome} {mt.id}  scale={mt.scale:.6g} perm={mt.permutation} "
              f"reflected={mt.reflected} multiplier={mt.multiplier}")
