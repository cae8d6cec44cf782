"""Smoothness of invariant metrics across a singular orbit.

A metric is checked at one end of its domain, moved to ``t = 0`` by a shift
(left end) or a reflection ``t -> t_hi - t`` (right end).  All conditions are
statements about exact Taylor coefficients of ``f_i = v_i^2`` and ``d_ij``:

* codimension 2 with slice speed ``a``: ``f_1 = a^2 t^2 + t^4 phi(t^2)``,
  ``f_2 + f_3`` even, ``f_2 - f_3 = t^{4/a} phi(t^2)``,
  ``d_12, d_13 = t^{2+2/a} phi(t^2)``, ``d_23 = t^{4/a} phi(t^2)``;
* codimension 4: ``f_i = t^2 + t^4 phi(t^2)`` and ``d_ij = t^4 phi(t^2)``.

Orbifold rule (codimension 2 collapse only).  With collapse speed
``s = |v_1'(0)|`` and ``rho = s/a``, an end whose parity conditions all hold
but whose speed differs from ``a`` is an orbifold when ``s`` or ``a/s`` is an
integer; the recorded order is ``s`` if ``s >= 2`` and ``a/s`` otherwise.  This
covers ``rho`` or ``1/rho`` integral as well as the rescaled families
``(b sin t, b cos t, b)`` and ``(cos t, a sin t)`` for integer ``b`` and ``a``.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import analytic as an
from .metrics import ConfigError, DiagonalMetric, FullMetricEndo, GroupDiagram, ProductMetric

DEFAULT_ORDER = 10
COEFF_TOL = 1e-10
SPEED_TOL = 1e-9


class Verdict(enum.Enum):
    SMOOTH = "SMOOTH"
    ORBIFOLD = "ORBIFOLD"
    NOT_SMOOTH = "NOT_SMOOTH"


@dataclass(frozen=True)
class Condition:
    id: str
    measured: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class SmoothnessReport:
    verdict: Verdict
    orbifold_order: int | None = None
    failures: tuple[Condition, ...] = ()
    conditions: tuple[Condition, ...] = ()
    speed_ratio: float | None = None
    end: str = "lo"
    collapsing: str | None = None

    def __post_init__(self):
        if self.verdict is Verdict.ORBIFOLD and (self.orbifold_order is None or self.orbifold_order < 2):
            raise ValueError("an orbifold verdict needs an order >= 2")

    @property
    def ok(self) -> bool:
        return self.verdict is not Verdict.NOT_SMOOTH

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict.value
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# -- coefficient tests --------------------------------------------------------------

def _at_end(fn: an.ScalarFunction, m, end: str) -> an.ScalarFunction:
    lo, hi = m.domain
    if end == "lo":
        if not math.isfinite(lo):
            raise ConfigError("left end is not finite")
        return fn.shift(lo)
    if end == "hi":
        if not math.isfinite(hi):
            raise ConfigError("right end is not finite")
        return fn.reflect(hi)
    raise ConfigError(f"end must be 'lo' or 'hi', got {end!r}")


def _series(fn: an.ScalarFunction, order: int) -> np.ndarray:
    return an.taylor_at(fn, 0.0, order).coeffs


def _square(c: np.ndarray) -> np.ndarray:
    return np.convolve(c, c)[: len(c)]


def admissible_orders(p: float, order: int) -> set[int]:
    """Orders where ``t^p phi(t^2)`` may have nonzero coefficients; empty for non-integer ``p``."""
    if abs(p - round(p)) > 1e-12:
        return set()
    return set(range(int(round(p)), order + 1, 2))


def pattern_condition(cid: str, c: np.ndarray, p: float, tol: float) -> Condition:
    """``c`` are the coefficients of a function claimed to be ``t^p phi(t^2)``."""
    allowed = admissible_orders(p, len(c) - 1)
    bad = [abs(x) for k, x in enumerate(c) if k not in allowed]
    measured = float(max(bad)) if bad else 0.0
    return Condition(cid, measured, tol, bool(measured <= tol))


def _value_condition(cid: str, measured: float, expected: float, tol: float) -> Condition:
    return Condition(cid, float(measured), tol, bool(abs(measured - expected) <= tol))


def _integral(x: float) -> int | None:
    n = round(x)
    return n if n >= 1 and abs(x - n) <= SPEED_TOL else None


def _orbifold_order(s: float, a: float) -> int | None:
    if s <= SPEED_TOL:
        return None
    for n in (_integral(s), _integral(a / s)):
        if n is not None and n >= 2:
            return n
    return None


def _decide(conds: list[Condition], speed_id: str, s: float, a: float, end: str, collapsing: str,
            allow_orbifold: bool = True) -> SmoothnessReport:
    failures = tuple(c for c in conds if not c.passed)
    rho = s / a
    if not failures:
        return SmoothnessReport(Verdict.SMOOTH, None, (), tuple(conds), rho, end, collapsing)
    if allow_orbifold and all(c.id == speed_id for c in failures):
        n = _orbifold_order(s, a)
        if n is not None:
            return SmoothnessReport(Verdict.ORBIFOLD, n, failures, tuple(conds), rho, end, collapsing)
    return SmoothnessReport(Verdict.NOT_SMOOTH, None, failures, tuple(conds), rho, end, collapsing)


def _collapse_index(values: list[float], tol: float) -> list[int]:
    return [i for i, x in enumerate(values) if abs(x) <= tol]


# -- codimension two --------------------------------------------------------------------

def check_smooth_codim2(m, diagram: GroupDiagram | None = None, order: int = DEFAULT_ORDER,
                        end: str = "lo", tol: float = COEFF_TOL) -> SmoothnessReport:
    """Smoothness at a codimension two singular orbit.

    For a diagonal metric the collapsing length is located automatically
    and moved to the first slot; a ``FullMetricEndo`` must collapse ``f_1``.
    """
    diagram = diagram if diagram is not None else getattr(m, "diagram", None)
    if diagram is None:
        raise ConfigError("a group diagram is needed for the slice speed")
    if diagram.singular_codim != 2:
        raise ConfigError(f"diagram has codimension {diagram.singular_codim}, expected 2")
    a = float(diagram.slice_speed_a)
    conds: list[Condition] = []
    if isinstance(m, FullMetricEndo):
        f1, f2, f3, d12, d13, d23 = (_series(_at_end(x, m, end), order)
                                     for x in (m.f1, m.f2, m.f3, m.d12, m.d13, m.d23))
        collapsing = "f1"
        conds += [pattern_condition("d12.pattern", d12, 2 + 2 / a, tol),
                  pattern_condition("d13.pattern", d13, 2 + 2 / a, tol),
                  pattern_condition("d23.pattern", d23, 4 / a, tol)]
    elif isinstance(m, DiagonalMetric):
        v = [_series(_at_end(x, m, end), order) for x in m.functions]
        zero = _collapse_index([c[0] for c in v], tol)
        if len(zero) != 1:
            return SmoothnessReport(Verdict.NOT_SMOOTH, failures=(Condition("collapse.count", float(len(zero)), 1, False),),
                                    end=end)
        i = zero[0]
        rest = [j for j in range(3) if j != i]
        f1, f2, f3 = (_square(v[j]) for j in (i, *rest))
        collapsing = f"v{i + 1}"
    else:
        raise ConfigError(f"unsupported metric type {type(m).__name__}")
    s = math.sqrt(max(f1[2], 0.0)) if len(f1) > 2 else 0.0
    conds = [
        _value_condition("f1.order0", f1[0], 0.0, tol),
        pattern_condition("f1.even", f1, 0, tol),
        _value_condition("f1.speed", f1[2], a * a, tol),
        pattern_condition("f2+f3.even", f2 + f3, 0, tol),
        pattern_condition("f2-f3.pattern", f2 - f3, 4 / a, tol),
    ] + conds
    return _decide(conds, "f1.speed", s, a, end, collapsing)


# -- codimension four -------------------------------------------------------------------

def check_smooth_codim4(m, diagram: GroupDiagram | None = None, order: int = DEFAULT_ORDER,
                        end: str = "lo", tol: float = COEFF_TOL) -> SmoothnessReport:
    diagram = diagram if diagram is not None else getattr(m, "diagram", None)
    if diagram is not None and diagram.singular_codim != 4:
        raise ConfigError(f"diagram has codimension {diagram.singular_codim}, expected 4")
    conds: list[Condition] = []
    if isinstance(m, FullMetricEndo):
        fs = [_series(_at_end(x, m, end), order) for x in (m.f1, m.f2, m.f3)]
        for name, x in (("d12", m.d12), ("d13", m.d13), ("d23", m.d23)):
            conds.append(pattern_condition(f"{name}.pattern", _series(_at_end(x, m, end), order), 4, tol))
    elif isinstance(m, DiagonalMetric):
        fs = [_square(_series(_at_end(x, m, end), order)) for x in m.functions]
    else:
        raise ConfigError(f"unsupported metric type {type(m).__name__}")
    for k, f in enumerate(fs, start=1):
        conds = [_value_condition(f"f{k}.order0", f[0], 0.0, tol),
                 pattern_condition(f"f{k}.even", f, 0, tol),
                 _value_condition(f"f{k}.speed", f[2], 1.0, tol)] + conds
    conds.sort(key=lambda c: c.id)
    return _decide(conds, "", 1.0, 1.0, end, "all", allow_orbifold=False)


# -- product metrics --------------------------------------------------------------------

def check_smooth_product(m: ProductMetric, end: str = "lo", order: int = DEFAULT_ORDER,
                         tol: float = COEFF_TOL) -> SmoothnessReport:
    """Circle collapse (``g -> 0``, slice speed 1) or sphere collapse (``f -> 0``)."""
    f = _series(_at_end(m.f, m, end), order)
    g = _series(_at_end(m.g, m, end), order)
    if abs(g[0]) <= tol and abs(f[0]) > tol:
        s = abs(g[1])
        conds = [
            pattern_condition("g.odd", g, 1, tol),
            _value_condition("g.speed", s, 1.0, tol),
            pattern_condition("f.even", f, 0, tol),
        ]
        return _decide(conds, "g.speed", s, 1.0, end, "g")
    if abs(f[0]) <= tol and abs(g[0]) > tol:
        s = abs(f[1])
        conds = [
            pattern_condition("f.odd", f, 1, tol),
            _value_condition("f.speed", s, 1.0, tol),
            pattern_condition("g.even", g, 0, tol),
        ]
        return _decide(conds, "", s, 1.0, end, "f", allow_orbifold=False)
    raise ConfigError(f"exactly one of f, g must vanish at the {end} end")


# -- dispatch ---------------------------------------------------------------------------

def check_smooth(m, diagram: GroupDiagram | None = None, end: str = "lo",
                 order: int = DEFAULT_ORDER, tol: float = COEFF_TOL) -> SmoothnessReport:
    if isinstance(m, ProductMetric):
        return check_smooth_product(m, end, order, tol)
    diagram = diagram if diagram is not None else getattr(m, "diagram", None)
    if diagram is None:
        raise ConfigError("a group diagram is needed")
    if diagram.singular_codim == 4:
        return check_smooth_codim4(m, diagram, order, end, tol)
    return check_smooth_codim2(m, diagram, order, end, tol)


def check_entry(entry, order: int = DEFAULT_ORDER) -> list[SmoothnessReport]:
    """Reports for every end a catalog entry lists a diagram for (left end first)."""
    ends = ("lo", "hi")
    return [check_smooth(entry.metric, d, end, order) for d, end in zip(entry.diagrams, ends)]
