"""Exact scalar calculus on trig/exp/polynomial functions and truncated power series.

Two building blocks live here:

``ScalarFunction``
    finite sums ``c * t**p * K(d*t)`` with ``K`` one of ``1, sin, cos, exp``.
    The family is closed under differentiation and affine substitution
    ``t -> alpha*t + beta``, so derivatives and Taylor coefficients are exact.

``TaylorSeries`` / ``LaurentSeries``
    truncated expansions at a base point with ring arithmetic and division.
    Products and quotients of metric functions are only ever formed at the
    series level.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_ORDER = 12
EPS_DIV = 1e-12


class DivisionByZeroSeries(ZeroDivisionError):
    """Raised when a series divisor has a (numerically) vanishing constant term."""


class GrammarError(ValueError):
    """Raised on text that does not follow the ScalarFunction grammar."""


class Kind(enum.IntEnum):
    ONE = 0
    SIN = 1
    COS = 2
    EXP = 3


@dataclass(frozen=True, order=True)
class Term:
    """``coeff * t**power * kind(rate * t)``."""

    coeff: float
    power: int = 0
    kind: Kind = Kind.ONE
    rate: float = 0.0

    @property
    def key(self) -> tuple[int, float, int]:
        return (int(self.kind), self.rate, self.power)

    def evaluate(self, t):
        base = self.coeff * t**self.power if self.power else self.coeff * np.ones_like(t)
        if self.kind is Kind.ONE:
            return base
        x = self.rate * t
        if self.kind is Kind.SIN:
            return base * np.sin(x)
        if self.kind is Kind.COS:
            return base * np.cos(x)
        return base * np.exp(x)


def _canonical(term: Term) -> Term | None:
    coeff, power, kind, rate = float(term.coeff), int(term.power), Kind(term.kind), float(term.rate)
    if power < 0:
        raise ValueError("negative powers are not representable")
    if kind is Kind.ONE:
        rate = 0.0
    elif rate == 0.0:
        if kind is Kind.SIN:
            return None
        kind = Kind.ONE
    elif rate < 0 and kind is Kind.SIN:
        coeff, rate = -coeff, -rate
    elif rate < 0 and kind is Kind.COS:
        rate = -rate
    if coeff == 0.0:
        return None
    return Term(coeff, power, kind, rate + 0.0)


def normalize(terms: Iterable[Term]) -> tuple[Term, ...]:
    merged: dict[tuple[int, float, int], float] = {}
    for raw in terms:
        term = _canonical(raw)
        if term is None:
            continue
        merged[term.key] = merged.get(term.key, 0.0) + term.coeff
    out = []
    for (kind, rate, power), coeff in sorted(merged.items()):
        if coeff != 0.0:
            out.append(Term(coeff, power, Kind(kind), rate))
    return tuple(out)


@dataclass(frozen=True)
class ScalarFunction:
    """A function of ``t`` in normal form (see module docstring)."""

    terms: tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", normalize(self.terms))

    # -- construction -----------------------------------------------------
    @classmethod
    def constant(cls, c: float) -> "ScalarFunction":
        return cls((Term(c),))

    @classmethod
    def parse(cls, text: str) -> "ScalarFunction":
        return parse(text)

    # -- algebra (linear only) --------------------------------------------
    def __add__(self, other):
        other = _as_function(other)
        return ScalarFunction(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return ScalarFunction(tuple(Term(-x.coeff, x.power, x.kind, x.rate) for x in self.terms))

    def __sub__(self, other):
        return self + (-_as_function(other))

    def __rsub__(self, other):
        return _as_function(other) - self

    def __mul__(self, c):
        if isinstance(c, ScalarFunction):
            raise TypeError("products of ScalarFunctions are formed at series level")
        c = float(c)
        return ScalarFunction(tuple(Term(c * x.coeff, x.power, x.kind, x.rate) for x in self.terms))

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / float(c))

    def __call__(self, t):
        return evaluate(self, t)

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"ScalarFunction({render(self)!r})"

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def derivative(self, k: int = 1) -> "ScalarFunction":
        f = self
        for _ in range(k):
            f = differentiate(f)
        return f

    def substitute(self, alpha: float, beta: float = 0.0) -> "ScalarFunction":
        return substitute(self, alpha, beta)

    def reflect(self, c: float) -> "ScalarFunction":
        """``t -> c - t``."""
        return substitute(self, -1.0, c)

    def shift(self, c: float) -> "ScalarFunction":
        """``t -> t + c``."""
        return substitute(self, 1.0, c)


def _as_function(x) -> ScalarFunction:
    if isinstance(x, ScalarFunction):
        return x
    return ScalarFunction.constant(float(x))


# -- convenience constructors ---------------------------------------------

def const(c: float) -> ScalarFunction:
    return ScalarFunction.constant(c)


def tpow(p: int, c: float = 1.0) -> ScalarFunction:
    return ScalarFunction((Term(c, p),))


def sin(rate: float = 1.0, c: float = 1.0) -> ScalarFunction:
    return ScalarFunction((Term(c, 0, Kind.SIN, rate),))


def cos(rate: float = 1.0, c: float = 1.0) -> ScalarFunction:
    return ScalarFunction((Term(c, 0, Kind.COS, rate),))


def exp(rate: float = 1.0, c: float = 1.0) -> ScalarFunction:
    return ScalarFunction((Term(c, 0, Kind.EXP, rate),))


def sinh(rate: float = 1.0, c: float = 1.0) -> ScalarFunction:
    return ScalarFunction((Term(0.5 * c, 0, Kind.EXP, rate), Term(-0.5 * c, 0, Kind.EXP, -rate)))


def cosh(rate: float = 1.0, c: float = 1.0) -> ScalarFunction:
    return ScalarFunction((Term(0.5 * c, 0, Kind.EXP, rate), Term(0.5 * c, 0, Kind.EXP, -rate)))


# -- calculus ---------------------------------------------------------------

def differentiate(f: ScalarFunction) -> ScalarFunction:
    out: list[Term] = []
    for x in f.terms:
        if x.power:
            out.append(Term(x.coeff * x.power, x.power - 1, x.kind, x.rate))
        if x.kind is Kind.SIN:
            out.append(Term(x.coeff * x.rate, x.power, Kind.COS, x.rate))
        elif x.kind is Kind.COS:
            out.append(Term(-x.coeff * x.rate, x.power, Kind.SIN, x.rate))
        elif x.kind is Kind.EXP:
            out.append(Term(x.coeff * x.rate, x.power, Kind.EXP, x.rate))
    return ScalarFunction(tuple(out))


def evaluate(f: ScalarFunction, t):
    """Pointwise value; ``t`` may be a scalar or a numpy array."""
    scalar = np.ndim(t) == 0
    tt = np.asarray(t, dtype=float)
    total = np.zeros_like(tt)
    for x in f.terms:
        total = total + x.evaluate(tt)
    return float(total) if scalar else total


def substitute(f: ScalarFunction, alpha: float, beta: float = 0.0) -> ScalarFunction:
    """Exact ``f(alpha*t + beta)``; round-off residue below 4 ulp of the largest term is dropped."""
    alpha, beta = float(alpha), float(beta)
    out: list[Term] = []
    for x in f.terms:
        # (alpha t + beta)^p expanded binomially
        poly = [(math.comb(x.power, j) * alpha**j * beta ** (x.power - j), j) for j in range(x.power + 1)]
        if x.kind is Kind.ONE:
            parts = [(1.0, Kind.ONE, 0.0)]
        elif x.kind is Kind.SIN:
            phase = x.rate * beta
            parts = [(math.cos(phase), Kind.SIN, x.rate * alpha), (math.sin(phase), Kind.COS, x.rate * alpha)]
        elif x.kind is Kind.COS:
            phase = x.rate * beta
            parts = [(math.cos(phase), Kind.COS, x.rate * alpha), (-math.sin(phase), Kind.SIN, x.rate * alpha)]
        else:
            parts = [(math.exp(x.rate * beta), Kind.EXP, x.rate * alpha)]
        for pc, j in poly:
            for kc, kind, rate in parts:
                out.append(Term(x.coeff * pc * kc, j, kind, rate))
    g = ScalarFunction(tuple(out))
    if not g.terms:
        return g
    scale = max(abs(x.coeff) for x in g.terms)
    return ScalarFunction(tuple(x for x in g.terms if abs(x.coeff) > 4 * np.finfo(float).eps * scale))


def taylor_at(f: ScalarFunction, t0: float, order: int = DEFAULT_ORDER) -> "TaylorSeries":
    """Coefficients ``f^(k)(t0)/k!`` for ``k = 0..order`` by exact repeated differentiation."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    coeffs = np.empty(order + 1)
    g = f
    fact = 1.0
    for k in range(order + 1):
        if k:
            g = differentiate(g)
            fact *= k
        coeffs[k] = evaluate(g, t0) / fact
    return TaylorSeries(float(t0), coeffs)


# -- text grammar -----------------------------------------------------------

_NUM = r"(?:\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
_TERM_RE = re.compile(
    rf"\s*(?P<sign>[+-])?\s*(?P<coeff>{_NUM})?"
    rf"(?:t\^(?P<power>\d+))?"
    rf"(?:(?P<func>sin|cos|exp)\(\s*(?P<rate>[+-]?\s*{_NUM})\s*t\s*\))?\s*"
)


def _fmt(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def render(f: ScalarFunction) -> str:
    if not f.terms:
        return "0"
    pieces = []
    for i, x in enumerate(f.terms):
        sign = "-" if x.coeff < 0 else "+"
        body = _fmt(abs(x.coeff))
        if x.power:
            body += f"t^{x.power}"
        if x.kind is not Kind.ONE:
            body += f"{x.kind.name.lower()}({_fmt(x.rate)}t)"
        if i == 0:
            pieces.append(("-" if sign == "-" else "") + body)
        else:
            pieces.append(f" {sign} {body}")
    return "".join(pieces)


def parse(text: str) -> ScalarFunction:
    """Parse ``term (+|- term)*`` with ``term ::= coeff [t^p] [func(rate t)]``."""
    s = text.strip()
    if not s:
        raise GrammarError("empty expression")
    pos, terms = 0, []
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if m is None or m.end() == pos:
            raise GrammarError(f"cannot parse {text!r} at offset {pos}")
        if terms and not m.group("sign"):
            raise GrammarError(f"missing '+' or '-' before offset {pos} in {text!r}")
        if m.group("coeff") is None and m.group("power") is None and m.group("func") is None:
            raise GrammarError(f"empty term at offset {pos} in {text!r}")
        coeff = float(m.group("coeff")) if m.group("coeff") is not None else 1.0
        if m.group("sign") == "-":
            coeff = -coeff
        power = int(m.group("power") or 0)
        if m.group("func"):
            kind = Kind[m.group("func").upper()]
            rate = float(m.group("rate").replace(" ", ""))
        else:
            kind, rate = Kind.ONE, 0.0
        terms.append(Term(coeff, power, kind, rate))
        pos = m.end()
    return ScalarFunction(tuple(terms))


# -- truncated series -------------------------------------------------------

def _check_compatible(a: "TaylorSeries", b: "TaylorSeries"):
    if a.base != b.base or a.order != b.order:
        raise ValueError(f"incompatible series: base {a.base}/{b.base}, order {a.order}/{b.order}")


@dataclass(frozen=True, eq=False)
class TaylorSeries:
    """``sum_k coeffs[k] * (t - base)**k``, known through order ``len(coeffs) - 1``."""

    base: float
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def _coerce(self, other) -> "TaylorSeries":
        if isinstance(other, TaylorSeries):
            _check_compatible(self, other)
            return other
        c = np.zeros(self.order + 1)
        c[0] = float(other)
        return TaylorSeries(self.base, c)

    def __add__(self, other):
        if isinstance(other, LaurentSeries):
            return LaurentSeries.from_taylor(self) + other
        return TaylorSeries(self.base, self.coeffs + self._coerce(other).coeffs)

    __radd__ = __add__

    def __neg__(self):
        return TaylorSeries(self.base, -self.coeffs)

    def __sub__(self, other):
        if isinstance(other, LaurentSeries):
            return LaurentSeries.from_taylor(self) - other
        return TaylorSeries(self.base, self.coeffs - self._coerce(other).coeffs)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            return LaurentSeries.from_taylor(self) * other
        if not isinstance(other, TaylorSeries):
            return TaylorSeries(self.base, self.coeffs * float(other))
        _check_compatible(self, other)
        return TaylorSeries(self.base, np.convolve(self.coeffs, other.coeffs)[: self.order + 1])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LaurentSeries):
            return LaurentSeries.from_taylor(self) / other
        if not isinstance(other, TaylorSeries):
            return TaylorSeries(self.base, self.coeffs / float(other))
        _check_compatible(self, other)
        return TaylorSeries(self.base, _divide(self.coeffs, other.coeffs))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if int(n) != n or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = self._coerce(1.0)
        for _ in range(int(n)):
            out = out * self
        return out

    def derivative(self) -> "TaylorSeries":
        k = np.arange(1, self.order + 1)
        return TaylorSeries(self.base, self.coeffs[1:] * k)

    def truncate(self, order: int) -> "TaylorSeries":
        return TaylorSeries(self.base, self.coeffs[: order + 1])

    def evaluate(self, t):
        h = np.asarray(t, dtype=float) - self.base
        return np.polynomial.polynomial.polyval(h, self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __repr__(self):
        return f"TaylorSeries(base={self.base}, coeffs={np.array2string(self.coeffs, precision=6)})"


def _divide(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(b)) if len(b) else 0.0
    if scale == 0.0 or abs(b[0]) < EPS_DIV * scale:
        raise DivisionByZeroSeries("divisor has vanishing constant term (pole)")
    n = len(a)
    q = np.empty(n)
    for k in range(n):
        acc = a[k]
        if k:
            acc -= np.dot(b[1 : k + 1], q[k - 1 :: -1][:k])
        q[k] = acc / b[0]
    return q


def add(a, b):
    return a + b


def sub(a, b):
    return a - b


def mul(a, b):
    return a * b


def div(a, b):
    return a / b


def scale(a, c: float):
    return a * float(c)


@dataclass(frozen=True, eq=False)
class LaurentSeries:
    """``sum_k coeffs[k] * (t - base)**(valuation + k)``.

    Precision is tracked as a number of known terms, so a quotient by a series
    with a zero of order ``m`` at ``base`` loses nothing in relative terms but
    shifts the valuation by ``-m``.
    """

    base: float
    valuation: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_taylor(cls, s: TaylorSeries) -> "LaurentSeries":
        return cls(s.base, 0, s.coeffs)

    @property
    def top(self) -> int:
        """Highest order that is known."""
        return self.valuation + len(self.coeffs) - 1

    def coefficient(self, k: int) -> float:
        if k > self.top:
            raise ValueError(f"order {k} exceeds known precision (top order {self.top})")
        if k < self.valuation:
            return 0.0
        return float(self.coeffs[k - self.valuation])

    def coefficients(self, lo: int, hi: int) -> np.ndarray:
        return np.array([self.coefficient(k) for k in range(lo, hi + 1)])

    def stripped(self, rel_tol: float = EPS_DIV) -> "LaurentSeries":
        """Drop leading coefficients that are round-off relative to the largest one."""
        c = self.coeffs
        scale = np.max(np.abs(c)) if len(c) else 0.0
        if scale == 0.0:
            raise DivisionByZeroSeries("series vanishes to known precision")
        k = 0
        while abs(c[k]) < rel_tol * scale:
            k += 1
        return LaurentSeries(self.base, self.valuation + k, c[k:])

    def _trimmed(self) -> "LaurentSeries":
        """Exact leading zeros moved into the valuation; they carry no precision."""
        nz = np.flatnonzero(self.coeffs)
        k = int(nz[0]) if nz.size else 0
        return LaurentSeries(self.base, self.valuation + k, self.coeffs[k:]) if k else self

    def _coerce(self, other) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            if other.base != self.base:
                raise ValueError("incompatible base points")
            return other
        if isinstance(other, TaylorSeries):
            return LaurentSeries.from_taylor(other)
        n = max(self.top + 1, 1)
        c = np.zeros(n)
        c[0] = float(other)
        return LaurentSeries(self.base, 0, c)

    def __add__(self, other):
        o = self._coerce(other)
        lo = min(self.valuation, o.valuation)
        top = min(self.top, o.top)
        if top < lo:
            raise ValueError("sum has no known coefficients")
        c = np.zeros(top - lo + 1)
        for s in (self, o):
            n = min(len(s.coeffs), top - s.valuation + 1)
            if n > 0:
                c[s.valuation - lo : s.valuation - lo + n] += s.coeffs[:n]
        return LaurentSeries(self.base, lo, c)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.base, self.valuation, -self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (LaurentSeries, TaylorSeries)):
            return LaurentSeries(self.base, self.valuation, self.coeffs * float(other))
        a, o = self._trimmed(), self._coerce(other)._trimmed()
        n = min(len(a.coeffs), len(o.coeffs))
        c = np.convolve(a.coeffs[:n], o.coeffs[:n])[:n]
        return LaurentSeries(self.base, a.valuation + o.valuation, c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, (LaurentSeries, TaylorSeries)):
            return LaurentSeries(self.base, self.valuation, self.coeffs / float(other))
        a, o = self._trimmed(), self._coerce(other).stripped()
        n = min(len(a.coeffs), len(o.coeffs))
        return LaurentSeries(self.base, a.valuation - o.valuation, _divide(a.coeffs[:n], o.coeffs[:n]))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if int(n) != n or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = LaurentSeries(self.base, 0, np.r_[1.0, np.zeros(len(self.coeffs) - 1)])
        for _ in range(int(n)):
            out = out * self
        return out

    def __repr__(self):
        return (
            f"LaurentSeries(base={self.base}, valuation={self.valuation}, "
            f"coeffs={np.array2string(self.coeffs, precision=6)})"
        )


def series_of(functions: Sequence[ScalarFunction], t0: float, order: int) -> list[TaylorSeries]:
    return [taylor_at(f, t0, order) for f in functions]
