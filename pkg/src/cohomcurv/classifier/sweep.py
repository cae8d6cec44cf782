"""Random sweep over exponential ansatzes with no singular orbit.

Each length is one of

* ``pair``:   ``a e^{d t} + b e^{-d t}`` with ``a, b, d > 0``,
* ``single``: ``a e^{2 d t}`` with ``a > 0`` and ``d != 0`` of either sign,
* ``const``:  ``a > 0``,

so every ``v_i`` is positive on the whole line.  All three lengths constant is
left out on purpose: that metric is a product of a line with a left-invariant
metric on ``S^3``, which is homogeneous and therefore curvature homogeneous.
Substrata with tied rates are drawn explicitly because a generic draw never
lands on them.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from ..curvature import formula

KINDS = ("pair", "single", "const")
AMPLITUDE = (0.1, 3.0)
RATE = (0.1, 2.0)
T_MAX = 20.0
SAMPLES = 200
DRAWS = 10_000
TOL = 1e-8


@dataclass(frozen=True)
class Stratum:
    name: str
    kinds: tuple[str, str, str]
    tie: str = ""  # "" | "sum" (d1 = d2 + d3) | "equal" (all nonconstant rates equal)


def strata() -> tuple[Stratum, ...]:
    out = [Stratum("-".join(k), k) for k in itertools.product(KINDS, repeat=3) if k != ("const",) * 3]
    out += [Stratum("pair-single-single:d1=d2+d3", ("pair", "single", "single"), "sum")]
    for k in itertools.product(("pair", "single"), repeat=3):
        out.append(Stratum("-".join(k) + ":equal", k, "equal"))
    return tuple(out)


@dataclass
class SweepReport:
    draws: int
    seed: int
    ch_count: int
    min_deviation: float
    per_stratum: dict = field(default_factory=dict)
    ch_examples: list = field(default_factory=list)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"draws": self.draws, "seed": self.seed, "ch_count": self.ch_count,
                "min_deviation": self.min_deviation, "per_stratum": self.per_stratum,
                "ch_examples": self.ch_examples}


def _jets(kind: str, a, b, d, t):
    """Values, first and second derivatives for a batch: params shape ``(N,)``, ``t`` shape ``(S,)``."""
    a, b, d = a[:, None], b[:, None], d[:, None]
    if kind == "pair":
        ep, em = a * np.exp(d * t), b * np.exp(-d * t)
        return ep + em, d * (ep - em), d * d * (ep + em)
    if kind == "single":
        v = a * np.exp(2 * d * t)
        return v, 2 * d * v, 4 * d * d * v
    v = np.broadcast_to(a, (a.shape[0], t.shape[0]))
    return v, np.zeros_like(v), np.zeros_like(v)


def _draw(stratum: Stratum, n: int, rng: np.random.Generator) -> np.ndarray:
    """Parameters ``(n, 3, 3)`` holding ``(a, b, d)`` for each length."""
    p = np.empty((n, 3, 3))
    p[:, :, :2] = rng.uniform(*AMPLITUDE, size=(n, 3, 2))
    p[:, :, 2] = rng.uniform(*RATE, size=(n, 3))
    for i, kind in enumerate(stratum.kinds):
        if kind == "single":
            p[:, i, 2] *= rng.choice((-1.0, 1.0), size=n)
    if stratum.tie == "sum":
        # v2 = a2 e^{d2 t}, v3 = a3 e^{d3 t} with d_i > 0 and d1 = d2 + d3
        rates = np.abs(p[:, 1:, 2])
        p[:, 0, 2] = rates.sum(axis=1)
        p[:, 1:, 2] = 0.5 * rates  # the single kind carries rate 2d
    elif stratum.tie == "equal":
        d = p[:, 0, 2:3]
        for i, kind in enumerate(stratum.kinds):
            p[:, i, 2] = np.abs(d[:, 0]) * (0.5 if kind == "single" else 1.0)
    return p


def deviations(stratum: Stratum, params: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Largest relative spread of the nine components over ``t``, per draw."""
    jets = [_jets(kind, params[:, i, 0], params[:, i, 1], params[:, i, 2], t) for i, kind in enumerate(stratum.kinds)]
    v, dv, ddv = ([j[n] for j in jets] for n in range(3))
    comps = np.array(formula(v, dv, ddv).components())  # (9, N, S)
    spread = comps.max(axis=2) - comps.min(axis=2)
    scale = 1.0 + np.abs(comps).max(axis=2)
    dev = (spread / scale).max(axis=0)
    return np.where(np.isfinite(dev), dev, np.inf)


def run_sweep(draws: int = DRAWS, seed: int = 0, tol: float = TOL, t_max: float = T_MAX,
              samples: int = SAMPLES) -> SweepReport:
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    t = np.linspace(-t_max, t_max, samples)
    ss = strata()
    counts = [draws // len(ss) + (1 if k < draws % len(ss) else 0) for k in range(len(ss))]
    report = SweepReport(draws, seed, 0, np.inf)
    for stratum, n in zip(ss, counts):
        params = _draw(stratum, n, rng)
        dev = deviations(stratum, params, t)
        hits = np.flatnonzero(dev <= tol)
        report.ch_count += int(hits.size)
        report.min_deviation = float(min(report.min_deviation, dev.min()))
        report.per_stratum[stratum.name] = {"draws": n, "ch": int(hits.size), "min_deviation": float(dev.min())}
        report.ch_examples += [{"stratum": stratum.name, "params": params[h].tolist()} for h in hits[:5]]
    report.seconds = time.perf_counter() - start
    return report
