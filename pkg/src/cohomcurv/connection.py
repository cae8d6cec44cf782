"""Levi-Civita connection in an orthonormal frame and the invariants built on it.

The frame engine works from structure constants ``C[a, b, c] = <[e_a, e_b], e_c>``
and their directional derivatives; it knows nothing about the closed-form
curvature formulas, which is what makes it usable as an oracle for them.

Frame components of every tensor considered here are constant along the
orbits, so derivatives in orbit directions vanish and only ``e_4 = d/dt``
differentiates (assumption checked by the oracle comparison in the tests).
The one exception is the spherical frame of a product metric, whose
structure constants vary in the polar angle; that derivative is supplied
explicitly.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import analytic as an
from .curvature import (CYCLIC, EPS_POS, CurvatureData, DomainError, component_series, curvature_components,
                        curvature_components_product, from_tensor, ricci_from)
from .metrics import DiagonalMetric, ProductMetric

FD_STEP = 1e-5
E4 = 3


@dataclass(frozen=True)
class ChristoffelFrame:
    """``gamma[a, b, c] = <nabla_{E_a} E_b, E_c>`` with 0-based indices (``3`` is ``E_4``)."""

    gamma: np.ndarray

    def __getitem__(self, abc: tuple[int, int, int]) -> float:
        """1-based access, ``frame[i, j, k]``."""
        a, b, c = abc
        return float(self.gamma[a - 1, b - 1, c - 1])


def levi_civita(C: np.ndarray) -> np.ndarray:
    """Koszul formula for an orthonormal frame."""
    return 0.5 * (C - np.einsum("bca->abc", C) + np.einsum("cab->abc", C))


def _diagonal_brackets(v, dv) -> np.ndarray:
    C = np.zeros((4, 4, 4))
    for i, j, k in CYCLIC:
        c = 2.0 * v[k] / (v[i] * v[j])
        C[i, j, k], C[j, i, k] = c, -c
    for i in range(3):
        c = -dv[i] / v[i]
        C[E4, i, i], C[i, E4, i] = c, -c
    return C


def structure_constants(m: DiagonalMetric, t: float) -> np.ndarray:
    """``[E_i, E_j] = 2 v_k/(v_i v_j) E_k`` (cyclic) and ``[E_4, E_i] = -(v_i'/v_i) E_i``."""
    v = m.values(t)
    if np.any(v <= EPS_POS):
        raise DomainError(f"metric degenerates at t={t}")
    return _diagonal_brackets(v, m.values(t, 1))


def christoffels(m: DiagonalMetric, t: float) -> ChristoffelFrame:
    return ChristoffelFrame(levi_civita(structure_constants(m, t)))


def frame_curvature(C: np.ndarray, dgamma: np.ndarray) -> np.ndarray:
    """``R[a, b, c, d] = <R(e_a, e_b) e_d, e_c>`` from brackets and ``dgamma[a] = e_a(gamma)``."""
    G = levi_civita(C)
    R = (np.einsum("abdc->abcd", dgamma) - np.einsum("badc->abcd", dgamma)
         + np.einsum("bdf,afc->abcd", G, G) - np.einsum("adf,bfc->abcd", G, G)
         - np.einsum("abf,fdc->abcd", C, G))
    return R


def richardson_derivative(fn: Callable[[float], np.ndarray], t: float, h: float = FD_STEP) -> np.ndarray:
    """Centered differences at ``h`` and ``h/2`` combined to fourth order."""
    d1 = (fn(t + h) - fn(t - h)) / (2 * h)
    d2 = (fn(t + h / 2) - fn(t - h / 2)) / h
    return (4 * d2 - d1) / 3


def curvature_from_connection(m: DiagonalMetric, t: float, h: float = FD_STEP) -> CurvatureData:
    lo, hi = m.domain
    if not (lo + h < t < hi - h):
        raise DomainError(f"t={t} is closer than h={h} to the boundary")
    C = structure_constants(m, t)
    dgamma = np.zeros((4, 4, 4, 4))
    dgamma[E4] = richardson_derivative(lambda s: christoffels(m, s).gamma, t, h)
    return from_tensor(frame_curvature(C, dgamma))


def full_tensor_from_connection(m: DiagonalMetric, t: float, h: float = FD_STEP) -> np.ndarray:
    C = structure_constants(m, t)
    dgamma = np.zeros((4, 4, 4, 4))
    dgamma[E4] = richardson_derivative(lambda s: christoffels(m, s).gamma, t, h)
    return frame_curvature(C, dgamma)


# -- product metrics -------------------------------------------------------------

def _product_brackets(f, df, g, dg) -> tuple[np.ndarray, np.ndarray]:
    """Brackets and their derivatives at the equator of the spherical frame.

    ``e_1 = d_theta/f``, ``e_2 = d_phi/(f sin theta)``, ``e_3 = d_psi/g``,
    ``e_4 = d_t``; at ``theta = pi/2`` the bracket ``[e_1, e_2] = -(cot theta/f) e_2``
    vanishes but its ``e_1``-derivative equals ``1/f^2``.
    """
    C = np.zeros((4, 4, 4))
    for i, c in ((0, -df / f), (1, -df / f), (2, -dg / g)):
        C[E4, i, i], C[i, E4, i] = c, -c
    dC = np.zeros((4, 4, 4, 4))
    dC[0, 0, 1, 1], dC[0, 1, 0, 1] = 1.0 / f**2, -1.0 / f**2
    return C, dC


def product_frame_tensor(m: ProductMetric, t: float, h: float = FD_STEP) -> np.ndarray:
    fs = (m.f, m.g)
    if min(an.evaluate(x, t) for x in fs) <= EPS_POS:
        raise DomainError(f"product metric degenerates at t={t}")

    def brackets(s):
        return _product_brackets(an.evaluate(m.f, s), an.evaluate(m.f.derivative(), s),
                                 an.evaluate(m.g, s), an.evaluate(m.g.derivative(), s))

    C, dC = brackets(t)
    dgamma = np.zeros((4, 4, 4, 4))
    dgamma[0] = levi_civita(dC[0])
    dgamma[E4] = richardson_derivative(lambda s: levi_civita(brackets(s)[0]), t, h)
    return frame_curvature(C, dgamma)


def product_tensor(m: ProductMetric, t: float) -> np.ndarray:
    s = curvature_components_product(m, t)
    R = np.zeros((4, 4, 4, 4))
    for (a, b), x in (((0, 1), s.sec12), ((0, 2), s.sec_iT), ((1, 2), s.sec_iT),
                      ((0, 3), s.sec_i4), ((1, 3), s.sec_i4), ((2, 3), s.sec_T4)):
        R[a, b, a, b] = R[b, a, b, a] = x
        R[a, b, b, a] = R[b, a, a, b] = -x
    return R


# -- covariant derivatives of curvature ------------------------------------------

def _product_series(m: ProductMetric, t: float):
    f, g = an.series_of([m.f, m.g], t, 1)
    df, dg = an.series_of([m.f.derivative(), m.g.derivative()], t, 1)
    ddf, ddg = an.series_of([m.f.derivative(2), m.g.derivative(2)], t, 1)
    return ((1 - df * df) / (f * f), -(df * dg) / (f * g), -(ddf / f), -(ddg / g))


def _tensor_and_derivative(m, t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Frame tensor, its exact ``t``-derivative and the Christoffel array at ``t``."""
    if isinstance(m, ProductMetric):
        R = product_tensor(m, t)
        sec = _product_series(m, t)
        dR = np.zeros_like(R)
        for (a, b), s in (((0, 1), sec[0]), ((0, 2), sec[1]), ((1, 2), sec[1]),
                          ((0, 3), sec[2]), ((1, 3), sec[2]), ((2, 3), sec[3])):
            dR[a, b, a, b] = dR[b, a, b, a] = s[1]
            dR[a, b, b, a] = dR[b, a, a, b] = -s[1]
        f, g = an.evaluate(m.f, t), an.evaluate(m.g, t)
        C, _ = _product_brackets(f, an.evaluate(m.f.derivative(), t), g, an.evaluate(m.g.derivative(), t))
        return R, dR, levi_civita(C)
    series = component_series(m, t, order=1)
    R = series.map(lambda s: s[0]).tensor()
    dR = series.map(lambda s: s[1]).tensor()
    return R, dR, christoffels(m, t).gamma


def nabla_R(m, t: float) -> np.ndarray:
    """``(nabla_{e_a} R)(e_b, e_c, e_d, e_e)`` as a 5-index array."""
    R, dR, G = _tensor_and_derivative(m, t)
    out = -(np.einsum("abf,fcde->abcde", G, R) + np.einsum("acf,bfde->abcde", G, R)
            + np.einsum("adf,bcfe->abcde", G, R) + np.einsum("aef,bcdf->abcde", G, R))
    out[E4] += dR
    return out


def nabla_ricci(m, t: float) -> np.ndarray:
    R, dR, G = _tensor_and_derivative(m, t)
    # Ric(b, c) = sum_a R(e_a, e_b, e_a, e_c)
    ric = np.einsum("abac->bc", R)
    dric = np.einsum("abac->bc", dR)
    out = -(np.einsum("abd,dc->abc", G, ric) + np.einsum("acd,bd->abc", G, ric))
    out[E4] += dric
    return out


def nabla_R_norm(m, t: float) -> float:
    return float(np.linalg.norm(nabla_R(m, t)))


def nabla_ricci_norm(m, t: float) -> float:
    return float(np.linalg.norm(nabla_ricci(m, t)))


def ricci_eigenvalues(m, t: float) -> np.ndarray:
    R, _, _ = _tensor_and_derivative(m, t)
    return np.linalg.eigvalsh(np.einsum("abac->bc", R))


# -- CSV profile -----------------------------------------------------------------

INVARIANT_COLUMNS = ("t", "nabla_ric", "nabla_R", "ric1", "ric2", "ric3", "ric4")


def invariant_rows(m, ts: Sequence[float]) -> list[tuple[float, ...]]:
    return [(float(t), nabla_ricci_norm(m, float(t)), nabla_R_norm(m, float(t)),
             *map(float, ricci_eigenvalues(m, float(t)))) for t in ts]


def invariants_csv(m, ts: Sequence[float]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(INVARIANT_COLUMNS)
    for row in invariant_rows(m, ts):
        w.writerow([repr(x) for x in row])
    return buf.getvalue()


def ricci_matches_components(m: DiagonalMetric, t: float) -> float:
    """Sup-difference between the frame Ricci and the contraction of the closed-form components."""
    R = full_tensor_from_connection(m, t)
    ric = np.einsum("abac->bc", R)
    return float(np.max(np.abs(ric - np.diag(ricci_from(curvature_components(m, t))))))
