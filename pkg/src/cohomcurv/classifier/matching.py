"""Identify a curvature homogeneous metric with a catalog entry.

Two routes are combined.  The curvature route compares the constant frame
components with those of each entry modulo a homothety ``lam`` (components
scale by ``lam^-2``), a relabelling of the lengths (mixed components carry no
sign, see ``permute_components``) and the reflection ``t -> -t`` (mixed
components change sign).  Families whose curvature depends on their
parameter are fitted in that parameter.  The function route then checks the
metric functions themselves; it breaks ties between entries with identical
curvature (several round spheres) and reads off multipliers that curvature
cannot see, such as the circle radius of a product.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

from .. import analytic as an
from ..curvature import (CH_SAMPLES, CH_TOL, CHResult, CurvatureData, curvature_components,
                         curvature_components_product, is_curvature_homogeneous, permute_components,
                         sample_interval)
from ..metrics import CATALOG, DiagonalMetric, ProductMetric, example10, scaled_entry

MATCH_TOL = 1e-6
PERMS = tuple(itertools.permutations(range(3)))
FUNCTION_SAMPLES = 40
FIT_GRID = np.geomspace(0.2, 20.0, 241)

MATCH = "MATCH"
UNKNOWN_CH = "UNKNOWN_CH"
NOT_CH = "NOT_CH"


@dataclass(frozen=True)
class Match:
    id: str
    scale: float  # homothety factor lam: the metric is lam^2 times the entry, up to relabelling
    permutation: tuple[int, ...] = (0, 1, 2)
    reflected: bool = False
    multiplier: float | None = None  # family parameter relative to the catalog member
    verified_functions: bool = False

    def to_dict(self) -> dict:
        return {"id": self.id, "scale": self.scale, "permutation": list(self.permutation),
                "reflected": self.reflected, "multiplier": self.multiplier,
                "verified_functions": self.verified_functions}


@dataclass(frozen=True)
class Classification:
    outcome: str
    match: Match | None
    ch: CHResult
    components: tuple[float, ...]
    alternatives: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {"outcome": self.outcome, "match": self.match.to_dict() if self.match else None,
                "alternatives": list(self.alternatives), "components": list(self.components),
                "ch": {"verdict": self.ch.verdict, "max_deviation": self.ch.max_deviation,
                       "worst_component": self.ch.worst_component}}


# -- constant component vectors ---------------------------------------------------------

def _midpoint(m) -> float:
    lo, hi = sample_interval(m)
    return 0.5 * (lo + hi)


def constant_vector(m, samples: int = CH_SAMPLES) -> np.ndarray:
    ts = np.linspace(*sample_interval(m), samples)
    if isinstance(m, ProductMetric):
        return np.median(curvature_components_product(m, ts).as_vector(), axis=1)
    return np.median(curvature_components(m, ts).as_vector(), axis=1)


def _entry_vector(m, t: float | None = None) -> np.ndarray:
    t = _midpoint(m) if t is None else t
    if isinstance(m, ProductMetric):
        return curvature_components_product(m, t).as_vector()
    return curvature_components(m, t).as_vector()


def _images(c: np.ndarray, product: bool):
    """``(perm, reflected, vector)`` in a fixed order: identity first, then lexicographic."""
    if product:
        yield (0, 1, 2), False, c
        return
    cd = CurvatureData(tuple(c[:3]), tuple(c[3:6]), tuple(c[6:]))
    for perm in PERMS:
        pc = permute_components(cd, perm).as_vector()
        for refl in (False, True):
            v = pc.copy()
            if refl:
                v[3:6] *= -1
            yield perm, refl, v


def _fit_scale(c: np.ndarray, e: np.ndarray) -> tuple[float, float]:
    """Best ``mu`` with ``c ~ mu e`` and the relative sup mismatch."""
    norm = float(e @ e)
    if norm == 0.0:
        return 1.0, float(np.max(np.abs(c)) / (1 + np.max(np.abs(c))))
    mu = float(c @ e) / norm
    return mu, float(np.max(np.abs(c - mu * e)) / (1 + np.max(np.abs(c))))


def _fits(c: np.ndarray, e: np.ndarray, product: bool) -> list[tuple[float, float, tuple, bool]]:
    """All images of ``e`` as ``(err, mu, perm, reflected)`` with a positive homothety."""
    out = []
    for perm, refl, v in _images(e, product):
        mu, err = _fit_scale(c, v)
        if mu > 0 or not np.any(v != 0):
            out.append((err, mu, perm, refl))
    return out


def _best_error(c: np.ndarray, e: np.ndarray, product: bool) -> float:
    return min((f[0] for f in _fits(c, e, product)), default=np.inf)


# -- families whose curvature depends on the parameter ------------------------------------

FAMILIES: dict[str, Callable[[float], DiagonalMetric | ProductMetric]] = {
    "ex5": lambda x: scaled_entry("ex5", x),
    "ex10-compact": lambda x: example10("compact", a=x),
    "ex10-hyperbolic": lambda x: example10("hyperbolic", a=x),
}


def _fit_family(c: np.ndarray, build, product: bool, t: float) -> float:
    """Family parameter whose curvature best matches ``c``; the domain must not depend on it."""
    def err(x):
        return _best_error(c, _entry_vector(build(x), t), product)

    errs = np.array([err(x) for x in FIT_GRID])
    k = int(np.argmin(errs))
    lo, hi = FIT_GRID[max(k - 1, 0)], FIT_GRID[min(k + 1, len(FIT_GRID) - 1)]
    res = optimize.minimize_scalar(err, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    x = float(res.x)
    snapped = round(x, 6)
    if err(snapped) <= err(x) + 1e-12:
        x = snapped
    return x


# -- function route ----------------------------------------------------------------------

def _functions_ratio(m, e, perm, refl, lam) -> np.ndarray | None:
    """Ratios ``m_i(t) / (lam e_perm(i)(s(t)))`` on sample points, or ``None`` if not comparable."""
    lo_m, hi_m = m.domain
    lo_e, hi_e = e.domain
    if not math.isfinite(lo_m) or not math.isfinite(lo_e) or (refl and not math.isfinite(hi_e)):
        return None
    if math.isfinite(hi_m) != math.isfinite(hi_e):
        return None
    if math.isfinite(hi_m) and abs((hi_m - lo_m) - lam * (hi_e - lo_e)) > 1e-9 * (1 + hi_m - lo_m):
        return None
    ts = np.linspace(*sample_interval(m), FUNCTION_SAMPLES)
    s = (hi_e - (ts - lo_m) / lam) if refl else (lo_e + (ts - lo_m) / lam)
    fm, fe = m.functions, e.functions
    order = perm if isinstance(m, DiagonalMetric) else (0, 1)
    return np.array([an.evaluate(fm[i], ts) / (lam * an.evaluate(fe[order[i]], s)) for i in range(len(fm))])


def _verify(m, e, perm, refl, lam) -> tuple[bool, float | None]:
    r = _functions_ratio(m, e, perm, refl, lam)
    if r is None:
        return False, None
    if isinstance(m, ProductMetric):
        g = r[1]
        ok = np.max(np.abs(r[0] - 1)) <= 1e-9 and np.ptp(g) <= 1e-9 * abs(g[0])
        return bool(ok), float(g[0]) if ok else None
    return bool(np.max(np.abs(r - 1)) <= 1e-9), None


# -- entry point -------------------------------------------------------------------------

def classify_metric(m: DiagonalMetric | ProductMetric, samples: int = CH_SAMPLES, tol: float = CH_TOL,
                    match_tol: float = MATCH_TOL) -> Classification:
    ch = is_curvature_homogeneous(m, samples, tol)
    c = constant_vector(m, samples)
    comps = tuple(float(x) for x in c)
    if not ch.verdict:
        return Classification(NOT_CH, None, ch, comps)
    product = isinstance(m, ProductMetric)
    candidates = []
    for rank, (id, entry) in enumerate(CATALOG.items()):
        if isinstance(entry.metric, ProductMetric) != product:
            continue
        t_mid = _midpoint(entry.metric)
        x = _fit_family(c, FAMILIES[id], product, t_mid) if id in FAMILIES else None
        base = FAMILIES[id](x) if id in FAMILIES else entry.metric
        found = []
        for err, mu, perm, refl in _fits(c, _entry_vector(base, t_mid), product):
            if err > match_tol:
                continue
            lam = 1.0 if mu == 0 else 1.0 / math.sqrt(mu)
            ok, circle = _verify(m, base, perm, refl, lam)
            multiplier = x
            if id in ("ex9", "ex10-flat") and circle is not None:
                multiplier = circle
            trivial = perm == (0, 1, 2) and not refl and abs(lam - 1) <= 1e-9
            found.append(((not ok, not trivial, err), Match(id, lam, tuple(perm), refl, multiplier, ok)))
        if found:
            key, match = min(found, key=lambda f: f[0])
            candidates.append((key[:2] + (rank,), match))
    if not candidates:
        return Classification(UNKNOWN_CH, None, ch, comps)
    candidates.sort(key=lambda k: k[0])
    chosen = candidates[0][1]
    others = tuple(k[1].id for k in candidates[1:])
    return Classification(MATCH, chosen, ch, comps, others)
