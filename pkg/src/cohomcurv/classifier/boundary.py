"""Laurent expansion of curvature components at a zero of one of the lengths.

If a metric is curvature homogeneous on ``(t0, t0 + eps)`` then every component
is constant there, so its Laurent expansion at ``t0`` can only have an order
zero term.  The profile below exposes the coefficients from order ``-4`` up,
which turns that observation into polynomial conditions on the parameters.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .. import analytic as an
from ..curvature import EPS_POS, CurvatureData, component_series
from ..metrics import DiagonalMetric
from .systems import AnsatzFamily, _metric

LOWEST = -4
DEFAULT_TOP = 6
ORDER_MARGIN = 10


class PoleOrderError(ValueError):
    pass


@dataclass(frozen=True)
class LaurentProfile:
    component: str
    orders: tuple[int, int]
    coeffs: np.ndarray

    def coefficient(self, k: int) -> float:
        lo, hi = self.orders
        if not lo <= k <= hi:
            raise ValueError(f"order {k} outside the profile range {self.orders}")
        return float(self.coeffs[k - lo])

    @property
    def singular_part(self) -> np.ndarray:
        return self.coeffs[: -self.orders[0]]

    def nonconstant_size(self) -> float:
        """Largest coefficient at a nonzero order; zero for a curvature homogeneous end."""
        lo = self.orders[0]
        mask = np.arange(lo, self.orders[1] + 1) != 0
        return float(np.max(np.abs(self.coeffs[mask])))

    def to_dict(self) -> dict:
        return {"component": self.component, "orders": list(self.orders),
                "coeffs": [float(x) for x in self.coeffs]}


def _check_simple_zeros(m: DiagonalMetric, t0: float) -> None:
    for n, f in enumerate(m.functions, start=1):
        c = an.taylor_at(f, t0, 2).coeffs
        if abs(c[0]) <= EPS_POS and abs(c[1]) <= EPS_POS:
            raise PoleOrderError(f"v{n} has a zero of order >= 2 at t0={t0}")


def laurent_boundary(m: DiagonalMetric | AnsatzFamily, params: Sequence[float] | None = None,
                     component: str = "k23", t0: float = 0.0, top: int = DEFAULT_TOP) -> LaurentProfile:
    """Coefficients of ``component`` at orders ``-4 .. top`` around ``t0``."""
    if isinstance(m, AnsatzFamily):
        m = m(*params)
    if component not in CurvatureData.NAMES:
        raise ValueError(f"unknown component {component!r}; expected one of {CurvatureData.NAMES}")
    _check_simple_zeros(m, t0)
    series = component_series(m, t0, order=top + ORDER_MARGIN, boundary=True)
    s = series.components()[CurvatureData.NAMES.index(component)]
    if s.top < top:
        raise ValueError(f"series precision reaches order {s.top} only; lower `top`")
    return LaurentProfile(component, (LOWEST, top), s.coefficients(LOWEST, top))


# -- the mixed family with a linear, a trigonometric and a hyperbolic length --------

def _mixed_metric(a1, a2, b2, d2, a3, b3, d3) -> DiagonalMetric:
    v1 = an.tpow(1, a1)
    v2 = an.sin(d2, a2) + an.cos(d2, b2)
    v3 = an.exp(d3, a3) + an.exp(-d3, b3)
    return _metric((v1, v2, v3))


MIXED_FAMILY = AnsatzFamily("6a-mixed", ("a1", "a2", "b2", "d2", "a3", "b3", "d3"), _mixed_metric)


def mixed_leading_k23(a1: float, b2: float, a3: float, b3: float) -> float:
    """Closed form of the order ``-2`` coefficient of ``k23`` in the mixed family."""
    return (a3 + b2 + b3) ** 2 * (a3 - b2 + b3) ** 2 / ((a3 + b3) ** 2 * a1**2 * b2**2)
