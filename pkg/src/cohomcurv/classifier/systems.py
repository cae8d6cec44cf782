"""Named polynomial constraint systems and the ansatz families they come from.

Every system is a polynomial in the squares of its parameters, so each one is
stored through a function of the squared parameters.  ``residual`` squares
the parameters and evaluates it, which makes boundary roots such as ``c = 0``
simple roots of the underlying map.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .. import analytic as an
from ..metrics import INF, DiagonalMetric, function_zeros


class UnknownSystem(KeyError):
    pass


class DegenerateAnsatz(ValueError):
    pass


@dataclass(frozen=True)
class KnownRoot:
    values: tuple[float, ...]
    squares: tuple[float, ...]
    provenance: str = "published"


@dataclass(frozen=True)
class AnsatzFamily:
    id: str
    params: tuple[str, ...]
    build: Callable[..., DiagonalMetric]
    box: tuple[tuple[float, float], ...] = ()

    def __call__(self, *values) -> DiagonalMetric:
        return self.build(*values)

    @property
    def constraints(self) -> "ConstraintSystem | None":
        return SYSTEMS.get(self.id)


@dataclass(frozen=True)
class ConstraintSystem:
    id: str
    params: tuple[str, ...]
    squared: Callable[..., list]
    box: tuple[tuple[float, float], ...]
    family: AnsatzFamily
    known_roots: tuple[KnownRoot, ...] = ()
    symmetries: tuple[tuple[int, ...], ...] = ()
    discrete: dict = field(default_factory=dict)
    homogeneous: bool = False
    amplitude_groups: tuple[tuple[int, ...], ...] = ()

    @property
    def arity(self) -> int:
        return len(self.params)

    def residual_squared(self, u) -> np.ndarray:
        return np.array(self.squared(*u))

    def residual(self, params: Sequence[float]) -> np.ndarray:
        p = np.asarray(params, dtype=float)
        if p.shape != (self.arity,):
            raise ValueError(f"system {self.id} takes {self.arity} parameters {self.params}, got shape {p.shape}")
        for group in self.amplitude_groups:
            if all(p[i] == 0.0 for i in group):
                raise DegenerateAnsatz(f"parameters {[self.params[i] for i in group]} all vanish")
        return self.residual_squared(p * p)

    def known_residual(self, root: KnownRoot) -> float:
        """Residual at the exact squares of a known root (no rounding of square roots)."""
        return float(np.max(np.abs(self.residual_squared(np.array(root.squares, dtype=float)))))

    def canonical(self, values: Sequence[float]) -> tuple[float, ...]:
        images = [tuple(values[i] for i in perm) for perm in ((tuple(range(self.arity)),) + self.symmetries)]
        return min(images)

    def build(self, values: Sequence[float]) -> DiagonalMetric:
        return self.family(*values)


def _trig_domain(fs: Sequence[an.ScalarFunction], horizon: float = 4 * math.pi) -> tuple[float, float]:
    """``(0, first positive zero)`` of the functions, or ``(0, inf)`` if none within ``horizon``."""
    zs = [z for z in function_zeros(fs, 0.0, horizon, samples=4000) if z > 1e-9]
    return (0.0, min(zs)) if zs else (0.0, INF)


def _metric(fs) -> DiagonalMetric:
    return DiagonalMetric(*fs, domain=_trig_domain(fs))


def _sin_over(b: float) -> an.ScalarFunction:
    return an.sin(b, 1.0 / b)


def _sinh_over(b: float) -> an.ScalarFunction:
    return an.sinh(b, 1.0 / b)


# -- ansatz builders -------------------------------------------------------------

def _b51_compact(a, b, c):
    return _metric((an.sin(1, a), an.cos(c, b), an.cos(c, b)))


def _b51_hyperbolic(a, b, c):
    return _metric((an.sinh(1, a), an.cosh(c, b), an.cosh(c, b)))


def _b51_linear(a, b, c):
    return _metric((an.tpow(1, a), an.cosh(c, b), an.cosh(c, b)))


def _b521(b, c1, c2):
    return _metric((an.sin(1, 2), an.cos(c1, b), an.cos(c2, b)))


def _b522(b1, b2, c):
    return _metric((an.sin(1, 4), an.cos(c, b1) + an.sin(c, b2), an.cos(c, b1) - an.sin(c, b2)))


def _b531(b, c1, c2):
    return _metric((an.tpow(1, 2), an.cosh(c1, b), an.cosh(c2, b)))


def _b532(b1, b2, c):
    return _metric((an.tpow(1, 4), an.cosh(c, b1) + an.sinh(c, b2), an.cosh(c, b1) - an.sinh(c, b2)))


def _b541(b, c1, c2):
    return _metric((an.sinh(1, 2), an.cosh(c1, b), an.cosh(c2, b)))


def _b542(b1, b2, c):
    return _metric((an.sinh(1, 4), an.cosh(c, b1) + an.sinh(c, b2), an.cosh(c, b1) - an.sinh(c, b2)))


def _bc4_trig(b1, b2, b3):
    return _metric((_sin_over(b1), _sin_over(b2), _sin_over(b3)))


def _bc4_mixed(b1, b2):
    return _metric((_sinh_over(math.sqrt(b1)), _sinh_over(math.sqrt(b2)), an.tpow(1)))


# -- equations in squared parameters ----------------------------------------------

def _e51_compact(A, B, C):
    return [B**2 * C**2 - 4 * B * C + 3 * A, B**2 * C**2 - B**2 * C + 3 * A]


def _e51_hyperbolic(A, B, C):
    return [B**2 * C**2 + 4 * B * C + 3 * A, B**2 * C**2 - B**2 * C + 3 * A]


def _e51_linear(A, B, C):
    return [B**2 * C**2 + 4 * B * C + 3 * A, B**2 * C**2 + 3 * A]


def _quartic(B, X, Y):
    return B**2 * X**2 - 6 * B**2 * X * Y + B**2 * Y**2


def _e521(B, X, Y):
    q = _quartic(B, X, Y)
    return [
        q + 8 * B * X + 8 * B * Y - 48,
        q - 4 * B**2 * X + 8 * B**2 * Y + 24 * B * X - 24 * B * Y - 48,
        q + 8 * B**2 * X - 4 * B**2 * Y - 24 * B * X + 24 * B * Y - 48,
        (X - Y) ** 2 - 2 * (X + Y) + 1,
        X + Y - X * Y - 1,
    ]


def _e522(P, Q, C):
    return [
        C**2 * (3 * P**2 - 2 * P * Q - 9 * Q**2) - C * (P * Q + 12 * P + 36 * Q) + 144,
        C**2 * (P**2 + 2 * P * Q - 3 * Q**2) - C * (P**2 + 2 * P * Q) + 48,
        C * (P - 3 * Q) - P + 12,
    ]


def _e531(B, X, Y):
    q = _quartic(B, X, Y)
    return [q - 8 * B * X - 8 * B * Y - 48, q - 24 * B * X + 24 * B * Y - 48, q + 24 * B * X - 24 * B * Y - 48]


def _e532(P, Q, C):
    return [C**2 * (P**2 - 2 * P * Q - 3 * Q**2) + 48, C * (P + 3 * Q) - 12]


def _e541(B, X, Y):
    q = _quartic(B, X, Y)
    return [
        q - 8 * B * X - 8 * B * Y - 48,
        q - 4 * B**2 * X + 8 * B**2 * Y - 24 * B * X + 24 * B * Y - 48,
        q + 8 * B**2 * X - 4 * B**2 * Y + 24 * B * X - 24 * B * Y - 48,
    ]


def _e542(P, Q, C):
    return [
        C**2 * (3 * P**2 + 2 * P * Q - 9 * Q**2) + C * (P * Q + 12 * P - 36 * Q) + 144,
        C * (P + 3 * Q) - P - 12,
        C**2 * (8 * P * Q - 12 * Q**2) + C * (P * Q - 48 * P + 48 * Q) + 12 * P,
    ]


def _ec4_trig(X, Y, Z):
    return [5 * (X - Y) * Z - X**2 + Y**2, 5 * (Z - X) * Y + X**2 - Z**2]


def _ec4_mixed(X, Y):
    # parameters enter the ansatz as sqrt(b_i), so the printed equations are in b_i = sqrt(X)
    return [X - 5 * Y, 5 * X - Y, 3 * Y**2 - 3 * X**2]


# -- registry ------------------------------------------------------------------------

AMP = (0.1, 6.0)
RATE = (0.0, 4.0)
C4BOX = (0.1, 5.0)
SWAP23 = ((0, 2, 1),)
S3 = ((0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))


def _root(values, squares=None, provenance="published"):
    values = tuple(float(v) for v in values)
    squares = tuple(float(s) for s in squares) if squares is not None else tuple(v * v for v in values)
    return KnownRoot(values, squares, provenance)


def _family(id, params, build, box):
    return AnsatzFamily(id, params, build, box)


def _make_systems() -> dict[str, ConstraintSystem]:
    r3, r2 = math.sqrt(3.0), math.sqrt(2.0)
    abc, bcc, bbc = ("a", "b", "c"), ("b", "c1", "c2"), ("b1", "b2", "c")
    specs = [
        ConstraintSystem("5.1-compact", abc, _e51_compact, (AMP, AMP, RATE),
                         _family("5.1-compact", abc, _b51_compact, (AMP, AMP, RATE)),
                         (_root((1, 2, 0.5), (1, 4, 0.25)),), discrete={0: (1.0, 2.0, 4.0)},
                         amplitude_groups=((0,), (1,))),
        ConstraintSystem("5.1-hyperbolic", abc, _e51_hyperbolic, (AMP, AMP, RATE),
                         _family("5.1-hyperbolic", abc, _b51_hyperbolic, (AMP, AMP, RATE)),
                         discrete={0: (1.0, 2.0, 4.0)}, amplitude_groups=((0,), (1,))),
        ConstraintSystem("5.1-linear", abc, _e51_linear, (AMP, AMP, RATE),
                         _family("5.1-linear", abc, _b51_linear, (AMP, AMP, RATE)),
                         discrete={0: (1.0, 2.0, 4.0)}, amplitude_groups=((0,), (1,))),
        ConstraintSystem("5.2.1", bcc, _e521, (AMP, RATE, RATE),
                         _family("5.2.1", bcc, _b521, (AMP, RATE, RATE)),
                         (_root((2, 1, 2), (4, 1, 4)), _root((2, 1, 0), (4, 1, 0))), SWAP23,
                         amplitude_groups=((0,),)),
        ConstraintSystem("5.2.2", bbc, _e522, (AMP, AMP, RATE),
                         _family("5.2.2", bbc, _b522, (AMP, AMP, RATE)),
                         (_root((2 * r3, 2, 1), (12, 4, 1)), _root((2 * r2, 2 * r2, 0.5), (8, 8, 0.25))),
                         amplitude_groups=((0, 1),)),
        ConstraintSystem("5.3.1", bcc, _e531, (AMP, RATE, RATE),
                         _family("5.3.1", bcc, _b531, (AMP, RATE, RATE)), (), SWAP23,
                         amplitude_groups=((0,),)),
        ConstraintSystem("5.3.2", bbc, _e532, (AMP, AMP, RATE),
                         _family("5.3.2", bbc, _b532, (AMP, AMP, RATE)),
                         amplitude_groups=((0, 1),)),
        ConstraintSystem("5.4.1", bcc, _e541, (AMP, RATE, RATE),
                         _family("5.4.1", bcc, _b541, (AMP, RATE, RATE)), (), SWAP23,
                         amplitude_groups=((0,),)),
        ConstraintSystem("5.4.2", bbc, _e542, (AMP, AMP, RATE),
                         _family("5.4.2", bbc, _b542, (AMP, AMP, RATE)),
                         (_root((2, 2, 1), (4, 4, 1)),),
                         amplitude_groups=((0, 1),)),
        ConstraintSystem("codim4-trig", ("b1", "b2", "b3"), _ec4_trig, (C4BOX,) * 3,
                         _family("codim4-trig", ("b1", "b2", "b3"), _bc4_trig, (C4BOX,) * 3),
                         (_root((1, 1, 1)), _root((2, 1, 1))), S3, homogeneous=True),
        ConstraintSystem("codim4-mixed", ("b1", "b2"), _ec4_mixed, (C4BOX,) * 2,
                         _family("codim4-mixed", ("b1", "b2"), lambda b1, b2: _bc4_mixed(b1, b2), (C4BOX,) * 2)),
    ]
    return {s.id: s for s in specs}


SYSTEMS: dict[str, ConstraintSystem] = _make_systems()
SYSTEM_IDS = tuple(SYSTEMS)
FINITE_NONEMPTY = ("5.1-compact", "5.2.1", "5.2.2", "5.4.2")
EMPTY = ("5.1-hyperbolic", "5.1-linear", "5.3.1", "5.3.2", "5.4.1", "codim4-mixed")


def get_system(id: str) -> ConstraintSystem:
    try:
        return SYSTEMS[id]
    except KeyError:
        raise UnknownSystem(f"unknown system {id!r}; known: {', '.join(SYSTEM_IDS)}") from None


def constraint_residual(id: str, params: Sequence[float]) -> np.ndarray:
    return get_system(id).residual(params)
