"""
Enumerating the constraint systems
==================================

Each ansatz family reduces curvature homogeneity to a polynomial system in
its parameters.  ``find_roots`` seeds a grid, polishes with Newton steps in
squared variables and keeps the roots whose metric really is curvature
homogeneous.
"""

import time

from cohomcurv.classifier import compare_with_known, find_roots
from cohomcurv.classifier.systems import SYSTEM_IDS, SYSTEMS

for sid in SYSTEM_IDS:
    start = time.perf_counter()
    report = find_roots(sid)
    cmp = compare_with_known(report)
    pts = [tuple(round(x, 6) for x in p) for p in report.points]
    print(f"{sid:15s} {SYSTEMS[sid].params}  roots={pts}  "
          f"missing={cmp['missing']} extra={cmp['extra']}  ({time.perf_counter() - start:.1f} s)")
    for r in report.rejected:
        print(f"{'':15s} rejected {tuple(round(x, 6) for x in r.root.values)}: {r.reason}")

# codim4-trig is homogeneous of degree four: solutions come in rays
for fam in find_roots("codim4-trig").families:
    print("family direction", fam.direction, "scales", fam.scales)

# narrowing the box loses the known roots, and the comparison says so
system = SYSTEMS["5.2.1"]
narrow = find_roots(system, box=((0.1, 1.5),) + system.box[1:])
print("5.2.1 with b <= 1.5:", compare_with_known(narrow))
