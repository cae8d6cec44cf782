"""Enumeration of the real roots of a constraint system inside its box.

Levenberg-Marquardt runs from every node of a regular seed grid at once, in
the squared parameters.  Converged points are filtered to the box, merged,
reduced modulo the declared symmetries and, optionally, certified by building
the metric and checking curvature homogeneity directly.  Homogeneous systems
are solved on the slice ``b_last = 1`` and reported as one-parameter families.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..curvature import is_curvature_homogeneous
from .systems import ConstraintSystem, get_system

GRID = 50
STEP_TOL = 1e-12
ROOT_TOL = 1e-8
MERGE_RADIUS = 1e-6
BOX_TOL = 1e-9
MAX_ITER = 200
CSTEP = 1e-20
STALL_EVERY = 20
STALL_FACTOR = 0.5


@dataclass(frozen=True)
class Root:
    values: tuple[float, ...]
    residual: float


@dataclass(frozen=True)
class Rejected:
    root: Root
    reason: str


@dataclass(frozen=True)
class Family:
    """``scale * direction`` solves the system for every scale in ``scales``."""

    direction: tuple[float, ...]
    scales: tuple[float, float]
    max_relative_residual: float


@dataclass(frozen=True)
class RootReport:
    system: str
    params: tuple[str, ...]
    box: tuple[tuple[float, float], ...]
    roots: tuple[Root, ...] = ()
    families: tuple[Family, ...] = ()
    rejected: tuple[Rejected, ...] = ()
    seeds: int = 0

    @property
    def points(self) -> list[tuple[float, ...]]:
        return [r.values for r in self.roots] + [f.direction for f in self.families]

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "params": list(self.params),
            "box": [list(b) for b in self.box],
            "roots": [{"values": list(r.values), "residual": r.residual} for r in self.roots],
            "families": [{"direction": list(f.direction), "scales": list(f.scales),
                          "max_relative_residual": f.max_relative_residual} for f in self.families],
            "rejected": [{"values": list(r.root.values), "reason": r.reason} for r in self.rejected],
            "seeds": self.seeds,
        }


# -- Levenberg-Marquardt in squared variables ------------------------------------------

def _residuals(system: ConstraintSystem, u: np.ndarray) -> np.ndarray:
    """``u`` has shape ``(n, N)``; result ``(m, N)``."""
    return np.array(system.squared(*u))


def _jacobian(system: ConstraintSystem, u: np.ndarray, free: Sequence[int]) -> np.ndarray:
    """Complex-step Jacobian with respect to the free coordinates, shape ``(N, m, k)``."""
    cols = []
    for j in free:
        z = u.astype(complex)
        z[j] += 1j * CSTEP
        cols.append(_residuals(system, z).imag / CSTEP)
    return np.stack(cols, axis=-1).transpose(1, 0, 2)


def levenberg_marquardt(system: ConstraintSystem, u0: np.ndarray, free: Sequence[int],
                        max_iter: int = MAX_ITER, step_tol: float = STEP_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized LM from the columns of ``u0``; returns final points and residual norms."""
    u = u0.astype(float).copy()
    free = list(free)
    r = _residuals(system, u)
    cost = np.sum(r * r, axis=0)
    lam = np.full(u.shape[1], 1e-3)
    active = np.ones(u.shape[1], dtype=bool)
    checkpoint = cost.copy()
    for it in range(1, max_iter + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        ua = u[:, idx]
        J = _jacobian(system, ua, free)
        ra = r[:, idx].T
        JtJ = np.einsum("nmi,nmj->nij", J, J)
        g = np.einsum("nmi,nm->ni", J, ra)
        diag = np.einsum("nii->ni", JtJ)
        A = JtJ + (lam[idx, None, None] * (diag[:, :, None] + 1e-12)) * np.eye(len(free))
        try:
            delta = -np.linalg.solve(A, g[..., None])[..., 0]
        except np.linalg.LinAlgError:
            delta = -np.einsum("nij,nj->ni", np.linalg.pinv(A), g)
        trial = ua.copy()
        trial[free] += delta.T
        rt = _residuals(system, trial)
        ct = np.sum(rt * rt, axis=0)
        better = ct < cost[idx]
        ok = idx[better]
        u[:, ok] = trial[:, better]
        r[:, ok] = rt[:, better]
        cost[ok] = ct[better]
        lam[ok] = np.maximum(lam[ok] / 3, 1e-15)
        bad = idx[~better]
        lam[bad] = lam[bad] * 4
        small = np.max(np.abs(delta), axis=1) <= step_tol * (1 + np.max(np.abs(ua[free]), axis=0))
        done = (small & better) | (cost[idx] == 0.0) | (lam[idx] > 1e12) | ~np.all(np.isfinite(trial), axis=0)
        active[idx[done]] = False
        if it % STALL_EVERY == 0:
            # seeds that stopped making progress far from zero are heading to a non-root minimum
            stalled = (cost > STALL_FACTOR * checkpoint) & (cost > ROOT_TOL**2)
            active &= ~stalled
            checkpoint = cost.copy()
    return u, np.sqrt(cost)


# -- post-processing -----------------------------------------------------------------

def _in_box(p: Sequence[float], box, tol: float = BOX_TOL) -> bool:
    return all(lo - tol <= x <= hi + tol for x, (lo, hi) in zip(p, box))


def _merge(points: list[tuple[float, ...]], radius: float) -> list[tuple[float, ...]]:
    kept: list[tuple[float, ...]] = []
    for p in points:
        if all(max(abs(a - b) for a, b in zip(p, q)) > radius for q in kept):
            kept.append(p)
    return kept


def _clean(x: float) -> float:
    """Snap float noise at a known exact value such as ``0``."""
    return 0.0 if abs(x) < 1e-12 else x


def _polish(system: ConstraintSystem, u: np.ndarray, free: Sequence[int], steps: int = 4) -> np.ndarray:
    """A few Gauss-Newton steps on a single point."""
    u = u.copy()
    for _ in range(steps):
        J = _jacobian(system, u[:, None], free)[0]
        r = _residuals(system, u[:, None])[:, 0]
        d = np.linalg.lstsq(J, -r, rcond=None)[0]
        trial = u.copy()
        trial[list(free)] += d
        if np.sum(_residuals(system, trial[:, None]) ** 2) <= np.sum(r * r):
            u = trial
    return u


def _seed_grid(box, free: Sequence[int], grid: int) -> np.ndarray:
    axes = [np.linspace(*box[j], grid) for j in free]
    return np.array(list(itertools.product(*axes))).T


def _solve_slices(system: ConstraintSystem, box, grid: int, fixed: dict[int, float]) -> tuple[list, int]:
    n = system.arity
    free = [j for j in range(n) if j not in fixed]
    seeds = _seed_grid(box, free, grid)
    N = seeds.shape[1]
    found = []
    u0 = np.zeros((n, N))
    for k, j in enumerate(free):
        u0[j] = seeds[k] ** 2
    for j, v in fixed.items():
        u0[j] = v * v
    u, res = levenberg_marquardt(system, u0, free)
    conv = u[:, res <= ROOT_TOL * 10]
    # drop points clearly outside the box (e.g. root curves on a face b = 0) before polishing
    pc = np.sqrt(np.maximum(conv, 0.0))
    near = np.all([(pc[j] >= box[j][0] - 1e-3) & (pc[j] <= box[j][1] + 1e-3) for j in range(n)], axis=0)
    conv = conv[:, near & np.all(conv >= -1e-6, axis=0)]
    # many seeds land on the same root; polish one representative per cluster
    _, first = np.unique(np.round(conv, 6), axis=1, return_index=True)
    for col in first:
        uc = _polish(system, conv[:, col], free)
        r = float(np.max(np.abs(_residuals(system, uc[:, None]))))
        if r > ROOT_TOL or np.any(uc < -1e-9):
            continue
        p = tuple(_clean(math.sqrt(max(x, 0.0))) for x in uc)
        found.append((p, r))
    return found, N


def parse_box(spec: str, params: Sequence[str], base) -> tuple[tuple[float, float], ...]:
    """``"b=0.1:1.5,c=0:4"`` overrides the named axes of ``base``."""
    box = [tuple(b) for b in base]
    for part in filter(None, (s.strip() for s in spec.split(","))):
        name, _, rng = part.partition("=")
        if name not in params or ":" not in rng:
            raise ValueError(f"bad box item {part!r}; expected name=lo:hi with name in {list(params)}")
        lo, hi = (float(x) for x in rng.split(":"))
        if not lo <= hi:
            raise ValueError(f"empty range in {part!r}")
        box[list(params).index(name)] = (lo, hi)
    return tuple(box)


def find_roots(system: ConstraintSystem | str, grid: int = GRID, box=None, certify: bool = True,
               family_samples: int = 9) -> RootReport:
    system = get_system(system) if isinstance(system, str) else system
    box = tuple(box) if box is not None else system.box
    n = system.arity
    disc = system.discrete
    found, seeds = [], 0
    if system.homogeneous:
        combos = [{n - 1: 1.0}]
    else:
        combos = [dict(zip(disc, vals)) for vals in itertools.product(*disc.values())] if disc else [{}]
    for fixed in combos:
        if not system.homogeneous and not all(_in_box([v], [box[j]]) for j, v in fixed.items()):
            continue
        sub_box = list(box)
        if system.homogeneous:
            # search directions in a box wide enough for any ratio allowed by the real box
            ratio = box[0][1] / box[0][0]
            sub_box = [(1.0 / ratio, ratio)] * n
        pts, N = _solve_slices(system, sub_box, grid, fixed)
        found += pts
        seeds += N

    roots: list[Root] = []
    families: list[Family] = []
    rejected: list[Rejected] = []
    if system.homogeneous:
        dirs = []
        for p, r in found:
            if min(p) <= 0:
                continue
            d = system.canonical(tuple(x / min(p) for x in p))
            dirs.append(d)
        for d in sorted(_merge(sorted(dirs), MERGE_RADIUS)):
            d = tuple(round(x, 9) if abs(x - round(x, 9)) < 1e-9 else x for x in d)
            lo = max(b[0] / x for b, x in zip(box, d))
            hi = min(b[1] / x for b, x in zip(box, d))
            if lo > hi:
                continue
            scales = np.linspace(lo, hi, family_samples)
            rel = max(float(np.max(np.abs(system.residual([s * x for x in d])))) / s**4 for s in scales)
            fam = Family(d, (float(lo), float(hi)), rel)
            if certify:
                m = system.build([scales[len(scales) // 2] * x for x in d])
                ch = is_curvature_homogeneous(m)
                if not ch.verdict:
                    rejected.append(Rejected(Root(d, rel), f"not curvature homogeneous (deviation {ch.max_deviation:.3g})"))
                    continue
            families.append(fam)
    else:
        canon = [(system.canonical(p), r) for p, r in found if _in_box(p, box)]
        canon.sort()
        merged = _merge([p for p, _ in canon], MERGE_RADIUS)
        for p in sorted(merged):
            r = min(rr for q, rr in canon if max(abs(a - b) for a, b in zip(p, q)) <= MERGE_RADIUS)
            root = Root(p, r)
            if certify:
                ch = is_curvature_homogeneous(system.build(p))
                if not ch.verdict:
                    rejected.append(Rejected(root, f"not curvature homogeneous (deviation {ch.max_deviation:.3g})"))
                    continue
            roots.append(root)
    return RootReport(system.id, system.params, box, tuple(roots), tuple(families), tuple(rejected), seeds)


def _orbit(system: ConstraintSystem, p: Sequence[float]) -> list[tuple[float, ...]]:
    return [tuple(p[i] for i in perm) for perm in ((tuple(range(system.arity)),) + system.symmetries)]


def same_point(p: Sequence[float], q: Sequence[float], tol: float = 1e-6) -> bool:
    return len(p) == len(q) and max(abs(a - b) for a, b in zip(p, q)) <= tol


def compare_with_known(report: RootReport, system: ConstraintSystem | str | None = None, tol: float = 1e-6,
                       box=None) -> dict:
    """Known roots that were missed and found points that are not known.

    Expectations are the known roots inside ``box``, by default the declared
    box of the system, so a search over a narrower box reports what it lost.
    """
    system = get_system(system or report.system) if not isinstance(system, ConstraintSystem) else system
    box = system.box if box is None else box
    known = [system.canonical(k.values) for k in system.known_roots]
    if system.homogeneous:
        known_in = known
    else:
        known_in = [k for k in known if any(_in_box(img, box) for img in _orbit(system, k))]
    found = report.points
    missing = [k for k in known_in if not any(same_point(k, f, tol) for f in found)]
    extra = [f for f in found if not any(same_point(k, f, tol) for k in known)]
    return {"missing": missing, "extra": extra}
