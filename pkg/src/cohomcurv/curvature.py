"""Frame curvature of diagonal SU(2) metrics and the curvature homogeneity test.

Components are taken in the parallel orthonormal frame ``E_i = X_i*/v_i``,
``E_4 = d/dt`` along the normal geodesic.  Storage order of the mixed
components: ``mixed[k-1] = R(E_i, E_j, E_k, E_4)`` for ``(i, j, k)`` a cyclic
permutation of ``(1, 2, 3)``; anticyclic orderings pick up a minus sign.
The sign convention makes ``R(X, Y, X, Y)`` the sectional curvature.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import analytic as an
from .metrics import DiagonalMetric, ProductMetric, function_zeros

EPS_POS = 1e-10
CH_SAMPLES = 200
CH_TOL = 1e-8
A_TOL = 1e-8
MARGIN = 0.05
# sampling window used when the domain is unbounded
WINDOW = 6.0
# an unbounded window also stops where max v_i / min v_i exceeds this; beyond it the
# closed-form components cancel terms of relative size up to the ratio squared
RATIO_CAP = math.exp(13.0)

CYCLIC = ((1, 2, 0), (2, 0, 1), (0, 1, 2))  # (i, j, k) with mixed index k
PAIRS = ((0, 1), (0, 2), (1, 2))


class DomainError(ValueError):
    pass


class PoleError(ValueError):
    pass


@dataclass(frozen=True)
class CurvatureData:
    """The nine frame components; entries may be floats, arrays or series."""

    kappa: tuple  # k12, k13, k23
    mixed: tuple  # m1, m2, m3
    radial: tuple  # r1, r2, r3

    NAMES = ("k12", "k13", "k23", "m1", "m2", "m3", "r1", "r2", "r3")

    def components(self) -> tuple:
        return (*self.kappa, *self.mixed, *self.radial)

    def as_vector(self) -> np.ndarray:
        return np.array([np.asarray(c, dtype=float) for c in self.components()])

    def map(self, fn) -> "CurvatureData":
        c = [fn(x) for x in self.components()]
        return CurvatureData(tuple(c[:3]), tuple(c[3:6]), tuple(c[6:]))

    def tensor(self) -> np.ndarray:
        """Full ``R[a, b, c, d] = R(E_a, E_b, E_c, E_d)`` (0-based, index 3 is ``E_4``)."""
        R = np.zeros((4, 4, 4, 4))
        for (i, j), k in zip(PAIRS, self.kappa):
            _put(R, i, j, i, j, float(k))
        for (i, j, k), m in zip(CYCLIC, self.mixed):
            _put(R, i, j, k, 3, float(m))
        for i, r in enumerate(self.radial):
            _put(R, i, 3, i, 3, float(r))
        return R


def _put(R, a, b, c, d, x):
    for (p, q, s) in (((a, b), (c, d), 1), ((b, a), (c, d), -1), ((a, b), (d, c), -1), ((b, a), (d, c), 1)):
        R[p[0], p[1], q[0], q[1]] = s * x
        R[q[0], q[1], p[0], p[1]] = s * x


def from_tensor(R: np.ndarray) -> CurvatureData:
    return CurvatureData(
        tuple(R[i, j, i, j] for i, j in PAIRS),
        tuple(R[i, j, k, 3] for i, j, k in CYCLIC),
        tuple(R[i, 3, i, 3] for i in range(3)),
    )


def formula(v: Sequence, dv: Sequence, ddv: Sequence) -> CurvatureData:
    """Closed-form components from ``v_i, v_i', v_i''``.

    Written with ring operations only, so it accepts floats, numpy arrays,
    ``TaylorSeries`` or ``LaurentSeries``.
    """
    q = [x * x for x in v]
    lg = [d / x for d, x in zip(dv, v)]
    kappa = []
    for i, j in PAIRS:
        k = 3 - i - j
        num = 2 * q[k] * (q[i] + q[j]) - 3 * q[k] * q[k] + (q[i] - q[j]) * (q[i] - q[j])
        kappa.append(num / (q[i] * q[j] * q[k]) - lg[i] * lg[j])
    mixed = []
    for i, j, k in CYCLIC:
        vol = v[i] * v[j] * v[k]
        mixed.append(-2 * dv[k] / (v[i] * v[j])
                     + lg[i] * (q[i] + q[k] - q[j]) / vol
                     + lg[j] * (q[j] + q[k] - q[i]) / vol)
    radial = [-(d2 / x) for d2, x in zip(ddv, v)]
    return CurvatureData(tuple(kappa), tuple(mixed), tuple(radial))


def _jets(m: DiagonalMetric, t):
    v = m.values(t)
    if np.any(v <= EPS_POS):
        raise DomainError(f"metric degenerates (some v_i <= {EPS_POS}) in the requested range")
    return v, m.values(t, 1), m.values(t, 2)


def curvature_components(m: DiagonalMetric, t) -> CurvatureData:
    """Components at ``t`` (scalar or array)."""
    if isinstance(m, ProductMetric):
        raise TypeError("use curvature_components_product for product metrics")
    return formula(*_jets(m, t))


@dataclass(frozen=True)
class ProductCurvature:
    """Sectional curvatures of the frame planes of ``dt^2 + f^2 g_S2 + g^2 dtheta^2``."""

    sec12: float
    sec_iT: float
    sec_i4: float
    sec_T4: float

    def as_vector(self) -> np.ndarray:
        return np.array([self.sec12, self.sec_iT, self.sec_i4, self.sec_T4], dtype=float)


def curvature_components_product(m: ProductMetric, t) -> ProductCurvature:
    f, g = an.evaluate(m.f, t), an.evaluate(m.g, t)
    if np.any(np.asarray(f) <= EPS_POS) or np.any(np.asarray(g) <= EPS_POS):
        raise DomainError("product metric degenerates in the requested range")
    df, dg = an.evaluate(m.f.derivative(), t), an.evaluate(m.g.derivative(), t)
    ddf, ddg = an.evaluate(m.f.derivative(2), t), an.evaluate(m.g.derivative(2), t)
    return ProductCurvature((1 - df * df) / (f * f), -df * dg / (f * g), -ddf / f, -ddg / g)


def component_series(m: DiagonalMetric, t0: float, order: int = an.DEFAULT_ORDER,
                     boundary: bool = False) -> CurvatureData:
    """Each component as a series at ``t0``.

    Interior expansions are ``TaylorSeries``; with ``boundary=True`` a zero
    of some ``v_i`` at ``t0`` is allowed and the result is a ``LaurentSeries``.
    """
    fs = m.functions
    v = an.series_of(fs, t0, order)
    dv = an.series_of([f.derivative() for f in fs], t0, order)
    ddv = an.series_of([f.derivative(2) for f in fs], t0, order)
    vanishing = [abs(s[0]) <= EPS_POS for s in v]
    if not boundary:
        if any(vanishing):
            raise PoleError(f"some v_i vanishes at t0={t0}; use boundary=True")
        return formula(v, dv, ddv)
    lift = an.LaurentSeries.from_taylor
    return formula([lift(s) for s in v], [lift(s) for s in dv], [lift(s) for s in ddv])


# -- curvature homogeneity ------------------------------------------------------

def sample_interval(m, margin: float = MARGIN) -> tuple[float, float]:
    """Interior interval used for constancy checks.

    Unbounded ends are replaced by a window of length ``WINDOW``; the
    interval stops at the first interior zero of any metric function, and a
    relative margin is removed from both ends.
    """
    lo, hi = m.domain
    open_lo, open_hi = not math.isfinite(lo), not math.isfinite(hi)
    if open_lo and open_hi:
        lo, hi = -WINDOW / 2, WINDOW / 2
    elif open_hi:
        hi = lo + WINDOW
    elif open_lo:
        lo = hi - WINDOW
    if open_lo or open_hi:
        lo, hi = _ratio_window(m, lo, hi, open_lo, open_hi)
    zs = function_zeros(m.functions, lo, hi)
    inner = [z for z in zs if lo + 1e-9 < z < hi - 1e-9]
    if inner:
        # keep the piece containing the left part of the domain
        hi = inner[0]
    d = margin * (hi - lo)
    lo, hi = lo + d, hi - d
    if not lo < hi:
        raise DomainError("sampled interval is empty")
    return lo, hi


def _ratio_window(m, lo: float, hi: float, open_lo: bool, open_hi: bool) -> tuple[float, float]:
    """Shrink the open sides of a window so the length ratio stays below ``RATIO_CAP``.

    Keeps the sampled region invariant under homotheties, which rescale ``t``.
    """
    ts = np.linspace(lo, hi, 401)
    with np.errstate(all="ignore"):
        v = np.abs(np.array([an.evaluate(f, ts) for f in m.functions], dtype=float))
        ratio = v.max(axis=0) / v.min(axis=0)
    ok = np.isfinite(ratio) & (ratio <= RATIO_CAP)
    if ok.all() or not ok.any():
        return lo, hi
    good = np.flatnonzero(ok)
    if open_hi and open_lo:
        # keep the run of good samples around the middle
        mid = good[np.argmin(np.abs(good - 200))]
        a = b = mid
        while a > 0 and ok[a - 1]:
            a -= 1
        while b < 400 and ok[b + 1]:
            b += 1
        return float(ts[a]), float(ts[b])
    if open_hi:
        # a collapsing finite end has an unbounded ratio; start past it
        b = int(good[0])
        while b < 400 and ok[b + 1]:
            b += 1
        return lo, float(ts[b])
    a = int(good[-1])
    while a > 0 and ok[a - 1]:
        a -= 1
    return float(ts[a]), hi


@dataclass(frozen=True)
class CHResult:
    verdict: bool
    max_deviation: float
    interval: tuple[float, float]
    worst_component: str


def constancy_deviation(values: np.ndarray) -> np.ndarray:
    """Per-row ``(max - min) / (1 + max|x|)`` for a ``(components, samples)`` array."""
    return (values.max(axis=1) - values.min(axis=1)) / (1.0 + np.abs(values).max(axis=1))


def is_curvature_homogeneous(m, samples: int = CH_SAMPLES, tol: float = CH_TOL,
                             interval: tuple[float, float] | None = None) -> CHResult:
    lo, hi = interval if interval is not None else sample_interval(m)
    ts = np.linspace(lo, hi, samples)
    if isinstance(m, ProductMetric):
        vals = np.array(curvature_components_product(m, ts).as_vector())
        names = ("sec12", "sec_iT", "sec_i4", "sec_T4")
    else:
        vals = curvature_components(m, ts).as_vector()
        names = CurvatureData.NAMES
    dev = constancy_deviation(vals)
    worst = int(np.argmax(dev))
    return CHResult(bool(dev[worst] <= tol), float(dev[worst]), (float(lo), float(hi)), names[worst])


# -- Ricci ----------------------------------------------------------------------

def ricci_from(cd: CurvatureData):
    k12, k13, k23 = cd.kappa
    r1, r2, r3 = cd.radial
    return (k12 + k13 + r1, k12 + k23 + r2, k13 + k23 + r3, r1 + r2 + r3)


def ricci(m, t) -> np.ndarray:
    """Ricci eigenvalues on ``E_1..E_4``; the Ricci tensor is diagonal in this frame."""
    if isinstance(m, ProductMetric):
        s = curvature_components_product(m, t)
        return np.array([s.sec12 + s.sec_iT + s.sec_i4, s.sec12 + s.sec_iT + s.sec_i4,
                         2 * s.sec_iT + s.sec_T4, 2 * s.sec_i4 + s.sec_T4])
    return np.array(ricci_from(curvature_components(m, t)))


def scalar_curvature(m, t) -> float:
    return np.sum(ricci(m, t), axis=0)


# -- connection tensor A ----------------------------------------------------------

@dataclass(frozen=True)
class ConnectionTensorA:
    entries: tuple[float, ...]  # a_i^m for i < m, row-major over 0-based (0,1),(0,2),(0,3),(1,2),(1,3),(2,3)
    residual: float
    residual_at_zero: float

    UPPER = tuple(itertools.combinations(range(4), 2))

    def matrix(self) -> np.ndarray:
        A = np.zeros((4, 4))
        for (i, j), a in zip(self.UPPER, self.entries):
            A[i, j], A[j, i] = a, -a
        return A


INDEX_PAIRS = tuple(itertools.combinations(range(4), 2))
EQUATIONS = tuple((p, q) for n, p in enumerate(INDEX_PAIRS) for q in INDEX_PAIRS[n:])


def act(A: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Derivation action ``(A.R)_ijkl = sum_m a_i^m R_mjkl + a_j^m R_imkl + a_k^m R_ijml + a_l^m R_ijkm``."""
    return (np.einsum("im,mjkl->ijkl", A, R) + np.einsum("jm,imkl->ijkl", A, R)
            + np.einsum("km,ijml->ijkl", A, R) + np.einsum("lm,ijkm->ijkl", A, R))


def connection_system(R: np.ndarray, dR: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Linear system ``M a = b`` over the 21 pair-symmetric index combinations."""
    cols = []
    for i, j in ConnectionTensorA.UPPER:
        E = np.zeros((4, 4))
        E[i, j], E[j, i] = 1.0, -1.0
        AR = act(E, R)
        cols.append([AR[p[0], p[1], q[0], q[1]] for p, q in EQUATIONS])
    M = np.array(cols).T
    b = np.array([dR[p[0], p[1], q[0], q[1]] for p, q in EQUATIONS])
    return M, b


def solve_connection_A(m: DiagonalMetric, t: float) -> ConnectionTensorA:
    """Least-squares ``A`` with ``dR/dt = A.R`` at ``t``; a zero residual certifies the equation there."""
    series = component_series(m, t, order=1)
    R = CurvatureData(*(tuple(s[0] for s in group) for group in (series.kappa, series.mixed, series.radial))).tensor()
    dR = CurvatureData(*(tuple(s[1] for s in group) for group in (series.kappa, series.mixed, series.radial))).tensor()
    M, b = connection_system(R, dR)
    a, *_ = np.linalg.lstsq(M, b, rcond=None)
    return ConnectionTensorA(tuple(float(x) for x in a), float(np.linalg.norm(M @ a - b)),
                             float(np.linalg.norm(b)))


# -- symmetry helpers -------------------------------------------------------------

def permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def relabel_tensor(R: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """``R'(E_a, E_b, E_c, E_d) = R(E_pa, E_pb, E_pc, E_pd)`` with ``E_4`` fixed."""
    p = np.array([*perm, 3])
    return R[np.ix_(p, p, p, p)]


def permute_components(cd: CurvatureData, perm: Sequence[int]) -> CurvatureData:
    """Components of the metric ``(v_perm[0], v_perm[1], v_perm[2])`` in terms of ``cd``.

    Relabelling the frame by ``perm`` multiplies the cyclically stored mixed
    components by the sign of ``perm``.  For odd ``perm`` the relabelled basis
    has ``[X_i, X_j] = -2 X_k``; restoring the bracket by ``X_k -> -X_k``
    flips the mixed components once more, so the net sign is ``+1``.
    """
    s = permutation_sign(perm)
    relabelled = from_tensor(relabel_tensor(cd.tensor(), perm))
    kappa = tuple(relabelled.kappa)
    mixed = tuple(s * x for x in relabelled.mixed)
    radial = tuple(cd.radial[p] for p in perm)
    return CurvatureData(kappa, mixed, radial)


# -- CSV profile ------------------------------------------------------------------

PROFILE_COLUMNS = ("t",) + CurvatureData.NAMES + ("A_residual",)


def profile_rows(m: DiagonalMetric, ts: Sequence[float]) -> list[tuple[float, ...]]:
    rows = []
    for t in ts:
        cd = curvature_components(m, float(t)).as_vector()
        rows.append((float(t), *map(float, cd), solve_connection_A(m, float(t)).residual))
    return rows


def profile_csv(m: DiagonalMetric, ts: Sequence[float]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PROFILE_COLUMNS)
    for row in profile_rows(m, ts):
        w.writerow([repr(x) for x in row])
    return buf.getvalue()
