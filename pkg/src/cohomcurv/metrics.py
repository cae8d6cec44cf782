"""Metric data for SU(2) and SO(3)SO(2) cohomogeneity one actions in dimension 4.

Conventions
-----------
``X1, X2, X3`` is a Q-orthonormal basis of su(2) with ``[Xi, Xj] = 2 Xk`` for
cyclic ``(i, j, k)``.  A diagonal metric is ``dt^2 + sum vi(t)^2 (dual of Xi)^2``
and is stored through the lengths ``vi = |Xi*|``.  Product metrics for
``G = SO(3)SO(2)`` store the radius ``f`` of the S^2 factor and ``g`` of the
circle.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from . import analytic as an
from .analytic import ScalarFunction

INF = math.inf
TOL_CROSS = 1e-9
EIGEN_SAMPLES = 512


class UnknownId(KeyError):
    pass


class DegenerateMetric(ValueError):
    pass


class ConfigError(ValueError):
    pass


class Group(enum.Enum):
    SU2 = "SU2"
    SO3xSO2 = "SO3xSO2"


class Isotropy(enum.Enum):
    SO2 = "SO2"
    PIN2 = "PIN2"
    FULL_GROUP = "FULL_GROUP"
    T2 = "T2"
    SO3 = "SO3"


# (K, H) pairs admitted for a codimension two singular orbit of SU(2), keyed by slice speed.
ADMITTED_CODIM2 = {
    1: ((Isotropy.SO2, "e"),),
    2: ((Isotropy.PIN2, "Z4"), (Isotropy.SO2, "Z2")),
    4: ((Isotropy.PIN2, "D2*"), (Isotropy.SO2, "Z4")),
}


@dataclass(frozen=True)
class GroupDiagram:
    group: Group
    singular_isotropy: Isotropy
    principal_isotropy: str
    slice_speed_a: int
    singular_codim: int
    primed: bool = False

    def __post_init__(self):
        if self.slice_speed_a < 1 or int(self.slice_speed_a) != self.slice_speed_a:
            raise ConfigError("slice speed must be a positive integer")
        if self.singular_codim not in (2, 3, 4):
            raise ConfigError("singular orbit codimension must be 2, 3 or 4")
        if self.singular_isotropy is Isotropy.FULL_GROUP and (self.singular_codim != 4 or self.slice_speed_a != 1):
            raise ConfigError("a fixed point has codimension 4 and slice speed 1")
        if self.group is Group.SU2 and self.singular_codim == 2:
            allowed = ADMITTED_CODIM2.get(self.slice_speed_a)
            if allowed is not None and (self.singular_isotropy, self.principal_isotropy) not in allowed:
                raise ConfigError(
                    f"(K, H) = ({self.singular_isotropy.value}, {self.principal_isotropy}) "
                    f"is not admitted for slice speed {self.slice_speed_a}"
                )

    @property
    def label(self) -> str:
        k = self.singular_isotropy.value + ("'" if self.primed else "")
        return f"{self.group.value}: K={k}, H={self.principal_isotropy}, a={self.slice_speed_a}"

    def to_dict(self) -> dict:
        return {
            "group": self.group.value,
            "K": self.singular_isotropy.value,
            "H": self.principal_isotropy,
            "a": self.slice_speed_a,
            "codim": self.singular_codim,
            "primed": self.primed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GroupDiagram":
        try:
            a = int(d.get("a", 1))
            codim = int(d["codim"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad diagram {d!r}: {exc}") from None
        group = Group(d.get("group", "SU2"))
        if "K" in d:
            k, h = Isotropy(d["K"]), str(d.get("H", "e"))
        elif codim == 4:
            k, h = Isotropy.FULL_GROUP, "e"
        elif codim == 3:
            k, h = Isotropy.SO3, "S1"
        elif group is Group.SO3xSO2:
            k, h = Isotropy.T2, "S1"
        else:
            k, h = ADMITTED_CODIM2.get(a, ((Isotropy.SO2, f"Z{a}"),))[0]
        return cls(group, k, h, a, codim, bool(d.get("primed", False)))


def _diagram(k: Isotropy, h: str, a: int, codim: int = 2, group: Group = Group.SU2, primed=False):
    return GroupDiagram(group, k, h, a, codim, primed)


def _check_domain(domain):
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise ConfigError(f"empty domain {domain!r}")
    return (lo, hi)


@dataclass(frozen=True)
class DiagonalMetric:
    v1: ScalarFunction
    v2: ScalarFunction
    v3: ScalarFunction
    domain: tuple[float, float] = (0.0, INF)
    diagram: GroupDiagram | None = None

    def __post_init__(self):
        object.__setattr__(self, "domain", _check_domain(self.domain))

    @property
    def functions(self) -> tuple[ScalarFunction, ScalarFunction, ScalarFunction]:
        return (self.v1, self.v2, self.v3)

    def values(self, t, deriv: int = 0) -> np.ndarray:
        """Array of shape ``(3,) + shape(t)`` holding the ``deriv``-th derivatives."""
        return np.array([an.evaluate(f.derivative(deriv), t) for f in self.functions])

    def matrix(self, t) -> np.ndarray:
        return np.diag(self.values(t) ** 2)

    def permuted(self, perm: Sequence[int]) -> "DiagonalMetric":
        fs = self.functions
        return replace(self, v1=fs[perm[0]], v2=fs[perm[1]], v3=fs[perm[2]])

    def multiplied(self, factors: Sequence[float]) -> "DiagonalMetric":
        fs = self.functions
        return replace(self, v1=fs[0] * factors[0], v2=fs[1] * factors[1], v3=fs[2] * factors[2])


@dataclass(frozen=True)
class ProductMetric:
    """``dt^2 + f(t)^2 g_{S^2} + g(t)^2 dtheta^2``."""

    f: ScalarFunction
    g: ScalarFunction
    domain: tuple[float, float] = (0.0, INF)

    def __post_init__(self):
        object.__setattr__(self, "domain", _check_domain(self.domain))

    @property
    def functions(self) -> tuple[ScalarFunction, ScalarFunction]:
        return (self.f, self.g)


@dataclass(frozen=True)
class FullMetricEndo:
    """Symmetric 3x3 endomorphism ``P_t`` given by its six entries."""

    f1: ScalarFunction
    f2: ScalarFunction
    f3: ScalarFunction
    d12: ScalarFunction = field(default_factory=lambda: an.const(0.0))
    d13: ScalarFunction = field(default_factory=lambda: an.const(0.0))
    d23: ScalarFunction = field(default_factory=lambda: an.const(0.0))
    domain: tuple[float, float] = (0.0, INF)

    def __post_init__(self):
        object.__setattr__(self, "domain", _check_domain(self.domain))

    def matrix(self, t: float) -> np.ndarray:
        f1, f2, f3, d12, d13, d23 = (an.evaluate(x, t) for x in
                                     (self.f1, self.f2, self.f3, self.d12, self.d13, self.d23))
        return np.array([[f1, d12, d13], [d12, f2, d23], [d13, d23, f3]])


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    metric: DiagonalMetric | ProductMetric
    manifold: str
    diagrams: tuple[GroupDiagram, ...]
    homogeneous: bool
    einstein: bool
    family: str | None = None

    @property
    def compact(self) -> bool:
        return math.isfinite(self.metric.domain[1])


# -- catalog ------------------------------------------------------------------

SQ2, SQ3 = math.sqrt(2.0), math.sqrt(3.0)
PI = math.pi


def example5(b: float = 2.0) -> DiagonalMetric:
    """``(b sin t, b cos t, b)``; smooth for ``b = 2``, an orbifold for other integers."""
    return DiagonalMetric(an.sin(1, b), an.cos(1, b), an.const(b), (0.0, PI / 2),
                          _diagram(Isotropy.SO2, "Z2", 2))


def example9(a: float = 1.0) -> ProductMetric:
    """Round S^4 as a sum action; ``a`` multiplies the circle radius."""
    return ProductMetric(an.cos(1), an.sin(1, a), (0.0, PI / 2))


def example10(kind: str = "compact", a: float = 1.0, circle: float = 1.0) -> ProductMetric:
    """``S^2(a)`` times a 2-dimensional space form; ``circle`` multiplies ``g``."""
    g = {"compact": an.sin(1, circle), "flat": an.tpow(1, circle), "hyperbolic": an.sinh(1, circle)}[kind]
    hi = PI if kind == "compact" else INF
    return ProductMetric(an.const(a), g, (0.0, hi))


def _build_catalog() -> dict[str, CatalogEntry]:
    fix = _diagram(Isotropy.FULL_GROUP, "e", 1, 4)
    t2 = _diagram(Isotropy.T2, "S1", 1, 2, Group.SO3xSO2)
    so3 = _diagram(Isotropy.SO3, "S1", 1, 3, Group.SO3xSO2)
    entries = [
        CatalogEntry(
            "ex1",
            DiagonalMetric(an.sin(1, 4), an.cos(1, 2 * SQ3) - an.sin(1, 2), an.cos(1, 2 * SQ3) + an.sin(1, 2),
                           (0.0, PI / 3), _diagram(Isotropy.PIN2, "D2*", 4)),
            "S4",
            (_diagram(Isotropy.PIN2, "D2*", 4), _diagram(Isotropy.PIN2, "D2*", 4, primed=True)),
            True, True),
        CatalogEntry(
            "ex2",
            DiagonalMetric(an.sin(2, 2), an.cos(1, SQ2) - an.sin(1, SQ2), an.cos(1, SQ2) + an.sin(1, SQ2),
                           (0.0, PI / 4), _diagram(Isotropy.SO2, "Z4", 4, primed=True)),
            "CP2",
            (_diagram(Isotropy.SO2, "Z4", 4, primed=True), _diagram(Isotropy.PIN2, "Z4", 2)),
            True, True),
        CatalogEntry(
            "tsukada",
            DiagonalMetric(an.exp(1, 2) - an.exp(-1, 2), an.exp(1, 2), an.exp(-1, 2), (0.0, INF),
                           _diagram(Isotropy.PIN2, "D2*", 4)),
            "normal bundle of RP2 in CP2",
            (_diagram(Isotropy.PIN2, "D2*", 4),),
            False, False),
        CatalogEntry(
            "ex4",
            DiagonalMetric(an.sin(1, 2), an.cos(2, 2), an.cos(1, 2), (0.0, PI / 4), _diagram(Isotropy.PIN2, "Z4", 2)),
            "CP2",
            (_diagram(Isotropy.PIN2, "Z4", 2), _diagram(Isotropy.SO2, "Z4", 4, primed=True)),
            True, True),
        CatalogEntry("ex5", example5(2.0), "S2xS2",
                     (_diagram(Isotropy.SO2, "Z2", 2), _diagram(Isotropy.SO2, "Z2", 2)), True, True, family="ex5"),
        CatalogEntry(
            "ex6",
            DiagonalMetric(an.sin(1), an.sin(1), an.sin(2, 0.5), (0.0, PI / 2), fix),
            "CP2", (fix, _diagram(Isotropy.SO2, "e", 1)), True, True),
        CatalogEntry(
            "ex7",
            DiagonalMetric(an.sinh(1), an.sinh(1), an.sinh(2, 0.5), (0.0, INF), fix),
            "CH2", (fix,), True, True),
        CatalogEntry("ex8-sphere", DiagonalMetric(an.sin(1), an.sin(1), an.sin(1), (0.0, PI), fix),
                     "S4", (fix, fix), True, True),
        CatalogEntry("ex8-hyperbolic", DiagonalMetric(an.sinh(1), an.sinh(1), an.sinh(1), (0.0, INF), fix),
                     "H4", (fix,), True, True),
        CatalogEntry("ex8-flat", DiagonalMetric(an.tpow(1), an.tpow(1), an.tpow(1), (0.0, INF), fix),
                     "R4", (fix,), True, True),
        CatalogEntry("ex9", example9(1.0), "S4", (t2, so3), True, True, family="ex9"),
        CatalogEntry("ex10-compact", example10("compact"), "S2xS2", (t2, t2), True, True, family="ex10"),
        CatalogEntry("ex10-flat", example10("flat"), "S2xR2", (t2,), True, False, family="ex10"),
        CatalogEntry("ex10-hyperbolic", example10("hyperbolic"), "S2xH2", (t2,), True, False, family="ex10"),
    ]
    return {e.id: e for e in entries}


CATALOG: dict[str, CatalogEntry] = _build_catalog()
ALIASES = {"ex3": "tsukada", "ex8": "ex8-sphere", "ex10": "ex10-compact"}
CATALOG_IDS = tuple(CATALOG)


def catalog_get(id: str) -> CatalogEntry:
    key = ALIASES.get(id, id)
    try:
        return CATALOG[key]
    except KeyError:
        raise UnknownId(f"unknown catalog id {id!r}; known: {', '.join(CATALOG_IDS)}") from None


def scaled_entry(id: str, factor: float) -> DiagonalMetric | ProductMetric:
    """Multiply the metric functions of a catalog entry by ``factor`` without reparametrizing.

    Families follow their own convention: ex9 and ex10 scale the circle radius
    only, every other entry scales all three lengths.
    """
    e = catalog_get(id)
    m = e.metric
    if isinstance(m, ProductMetric):
        return replace(m, g=m.g * factor)
    return m.multiplied((factor, factor, factor))


def scale_metric(m, lam: float):
    """Homothety: ``v(t) -> lam * v(t / lam)`` on the domain scaled by ``lam``."""
    if lam <= 0:
        raise ValueError("scale factor must be positive")
    lo, hi = m.domain
    dom = (lo * lam, hi * lam)
    if isinstance(m, ProductMetric):
        return ProductMetric(lam * m.f.substitute(1 / lam), lam * m.g.substitute(1 / lam), dom)
    return DiagonalMetric(*(lam * f.substitute(1 / lam) for f in m.functions), domain=dom, diagram=m.diagram)


# -- JSON configuration -------------------------------------------------------

def _domain_to_json(domain):
    return [d if math.isfinite(d) else None for d in domain]


def _domain_from_json(raw):
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise ConfigError(f"domain must be a pair, got {raw!r}")
    lo = -INF if raw[0] is None else float(raw[0])
    hi = INF if raw[1] is None else float(raw[1])
    return (lo, hi)


def metric_to_config(m) -> dict:
    if isinstance(m, ProductMetric):
        return {"kind": "product", "f": str(m.f), "g": str(m.g), "domain": _domain_to_json(m.domain)}
    out = {"kind": "diagonal", "v1": str(m.v1), "v2": str(m.v2), "v3": str(m.v3),
           "domain": _domain_to_json(m.domain)}
    if m.diagram is not None:
        out["diagram"] = m.diagram.to_dict()
    return out


def metric_from_config(cfg: dict):
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    kind = cfg.get("kind", "diagonal")
    try:
        domain = _domain_from_json(cfg.get("domain", [0.0, None]))
        if kind == "diagonal":
            diagram = GroupDiagram.from_dict(cfg["diagram"]) if cfg.get("diagram") else None
            return DiagonalMetric(an.parse(cfg["v1"]), an.parse(cfg["v2"]), an.parse(cfg["v3"]), domain, diagram)
        if kind == "product":
            return ProductMetric(an.parse(cfg["f"]), an.parse(cfg["g"]), domain)
    except KeyError as exc:
        raise ConfigError(f"missing field {exc}") from None
    except (an.GrammarError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown metric kind {kind!r}")


def dumps_metric(m) -> str:
    return json.dumps(metric_to_config(m), sort_keys=True)


def loads_metric(text: str):
    try:
        return metric_from_config(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None


# -- eigenvalue multiplicity tracking -------------------------------------------

@dataclass(frozen=True)
class MultiplicityRun:
    interval: tuple[float, float]
    pattern: tuple[int, ...]


def _pattern(eigs: np.ndarray, rel: float) -> tuple[int, ...]:
    scale = max(1.0, float(np.max(np.abs(eigs))))
    groups, run = [], 1
    for x, y in zip(eigs[:-1], eigs[1:]):
        if abs(y - x) <= rel * scale:
            run += 1
        else:
            groups.append(run)
            run = 1
    groups.append(run)
    return tuple(sorted(groups, reverse=True))


def _eigh(P, t) -> tuple[np.ndarray, np.ndarray]:
    M = P.matrix(t)
    w, V = np.linalg.eigh(M)
    if w[0] <= 1e-12 * max(1.0, abs(w[-1])):
        raise DegenerateMetric(f"metric endomorphism is not positive definite at t={t:.6g}")
    return w, V


def _tracked(P, t, ref_vecs) -> np.ndarray:
    """Eigenvalues at ``t`` ordered to follow the eigenvectors ``ref_vecs``."""
    w, V = _eigh(P, t)
    overlap = np.abs(ref_vecs.T @ V)
    order = optimize.linear_sum_assignment(-overlap)[1]
    return w[order]


def eigen_track(P, interval=None, samples: int = EIGEN_SAMPLES, tol: float = TOL_CROSS,
                rel_mult: float = 1e-9) -> list[MultiplicityRun]:
    """Split ``interval`` at points where eigenvalues of ``P_t`` meet.

    Eigenvalue branches are followed by eigenvector continuity between
    samples; a sign change of a branch difference, or a near-zero local
    minimum of its magnitude, marks a crossing, located by bisection (or a
    bounded scalar minimization) to ``tol``.  Branches that coincide on the
    whole interval contribute to the multiplicity pattern instead.
    """
    lo, hi = interval if interval is not None else P.domain
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("eigen_track needs a finite interval")
    ts = np.linspace(lo, hi, samples)
    w0, V = _eigh(P, ts[0])
    branches = [w0]
    vecs = [V]
    for t in ts[1:]:
        w, Vn = _eigh(P, t)
        overlap = np.abs(vecs[-1].T @ Vn)
        order = optimize.linear_sum_assignment(-overlap)[1]
        branches.append(w[order])
        vecs.append(Vn[:, order])
    lam = np.array(branches)  # (samples, 3)
    scale = max(1.0, float(np.max(np.abs(lam))))
    n = lam.shape[1]
    crossings: list[float] = []
    for i in range(n):
        for j in range(i + 1, n):
            g = lam[:, i] - lam[:, j]
            if np.all(np.abs(g) <= rel_mult * scale):
                continue  # identical branches: persistent multiplicity
            crossings.extend(_pair_crossings(P, ts, vecs, g, i, j, tol, rel_mult * scale))
    cuts = sorted(set(round(c / tol) * tol for c in crossings if lo + tol < c < hi - tol))
    merged: list[float] = []
    for c in cuts:
        if not merged or c - merged[-1] > 10 * tol:
            merged.append(c)
    edges = [lo, *merged, hi]
    runs = []
    for a, b in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (a + b)
        w, _ = _eigh(P, mid)
        runs.append(MultiplicityRun((float(a), float(b)), _pattern(w, rel_mult)))
    return runs


def _pair_crossings(P, ts, vecs, g, i, j, tol, atol) -> list[float]:
    out = []
    for k in range(len(ts) - 1):
        a, b = ts[k], ts[k + 1]
        if g[k] == 0.0:
            out.append(float(a))
            continue
        if np.sign(g[k]) != np.sign(g[k + 1]) and g[k + 1] != 0.0:
            ref = vecs[k]

            def gap(t):
                w = _tracked(P, t, ref)
                return w[i] - w[j]

            out.append(float(optimize.bisect(gap, a, b, xtol=tol)) if gap(a) * gap(b) < 0 else float(0.5 * (a + b)))
    # touching without sign change
    mag = np.abs(g)
    for k in range(1, len(ts) - 1):
        if mag[k] <= mag[k - 1] and mag[k] <= mag[k + 1] and mag[k] < 1e3 * atol + 1e-6:
            ref = vecs[k]
            res = optimize.minimize_scalar(lambda t: abs(_tracked(P, t, ref)[i] - _tracked(P, t, ref)[j]),
                                           bounds=(ts[k - 1], ts[k + 1]), method="bounded",
                                           options={"xatol": tol})
            if res.fun <= atol and not any(abs(res.x - c) < 10 * tol for c in out):
                out.append(float(res.x))
    return out


def positive_on(m, interval, samples: int = 400) -> bool:
    lo, hi = interval
    ts = np.linspace(lo, hi, samples + 2)[1:-1]
    return bool(all(np.all(an.evaluate(f, ts) > 0) for f in m.functions))


def function_zeros(fns: Sequence[ScalarFunction], lo: float, hi: float, samples: int = 2000) -> list[float]:
    """Zeros of any of ``fns`` strictly inside ``(lo, hi)``, found by sign change."""
    ts = np.linspace(lo, hi, samples)
    zs = []
    for f in fns:
        y = an.evaluate(f, ts)
        for k in range(1, samples - 2):
            if y[k] == 0.0:
                zs.append(float(ts[k]))
            elif y[k] * y[k + 1] < 0:
                zs.append(float(optimize.brentq(lambda t: an.evaluate(f, t), ts[k], ts[k + 1])))
    return sorted(zs)


Builder = Callable[..., DiagonalMetric]


def random_metric(rng: np.random.Generator, domain: tuple[float, float] = (0.0, 2.0)) -> DiagonalMetric:
    """``v_i = alpha + beta cos(gamma t) + delta exp(eps t)`` with ``alpha > |beta|``, so ``v_i > 0``."""
    fs = []
    for _ in range(3):
        alpha = rng.uniform(1.5, 3.0)
        beta = rng.uniform(-1.0, 1.0)
        gamma = rng.uniform(0.3, 2.0)
        delta = rng.uniform(0.0, 1.0)
        eps = rng.uniform(-1.0, 1.0)
        fs.append(an.const(alpha) + an.cos(gamma, beta) + an.exp(eps, delta))
    return DiagonalMetric(*fs, domain=domain)
