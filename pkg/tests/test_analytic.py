import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cohomcurv import analytic as an

rates = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False).filter(lambda x: abs(x) > 1e-3)
coeffs = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


@st.composite
def functions(draw, max_terms=4):
    f = an.const(draw(coeffs))
    for _ in range(draw(st.integers(1, max_terms))):
        kind = draw(st.sampled_from(["sin", "cos", "exp", "tpow"]))
        c = draw(coeffs)
        if kind == "tpow":
            f = f + an.tpow(draw(st.integers(1, 3)), c)
        else:
            f = f + getattr(an, kind)(draw(rates), c)
    return f


class TestDifferentiate:
    def test_sin(self):
        assert an.differentiate(an.sin(1)) == an.cos(1)

    def test_tsukada_length(self):
        f = an.parse("2exp(1t) - 2exp(-1t)")
        assert f.derivative() == an.parse("2exp(1t) + 2exp(-1t)")

    def test_product_rule(self):
        f = an.parse("1t^2cos(3t)")
        assert f.derivative() == an.parse("2t^1cos(3t) - 3t^2sin(3t)")

    @given(functions(), st.floats(min_value=-1.5, max_value=1.5))
    def test_matches_centered_difference(self, f, t):
        h = 1e-5
        fd = (an.evaluate(f, t + h) - an.evaluate(f, t - h)) / (2 * h)
        exact = an.evaluate(f.derivative(), t)
        assert abs(exact - fd) <= 1e-7 * (1 + abs(an.evaluate(f.derivative(2), t))) + 1e-9 * (1 + abs(an.evaluate(f, t)))


class TestEvaluate:
    @pytest.mark.parametrize("text, t, expected", [
        ("1sin(1t)", math.pi / 2, 1.0),
        ("2exp(1t) - 2exp(-1t)", 0.0, 0.0),
        ("1t^2exp(2t)", 1.0, math.exp(2)),
    ])
    def test_values(self, text, t, expected):
        assert an.evaluate(an.parse(text), t) == pytest.approx(expected, abs=1e-14)

    def test_vectorized(self):
        ts = np.linspace(0, 1, 7)
        assert np.allclose(an.evaluate(an.sin(2), ts), np.sin(2 * ts))


class TestTaylor:
    def test_sin(self):
        assert np.allclose(an.taylor_at(an.sin(1), 0, 4).coeffs, [0, 1, 0, -1 / 6, 0], atol=1e-15)

    def test_square_of_collapsing_length(self):
        s = an.taylor_at(an.sin(1, 2), 0, 4)
        assert np.allclose((s * s).coeffs, [0, 0, 4, 0, -4 / 3], atol=1e-14)

    def test_exp(self):
        assert np.allclose(an.taylor_at(an.exp(2), 0, 2).coeffs, [1, 2, 2])

    @given(functions(), st.floats(min_value=-1.0, max_value=1.0))
    def test_truncation_error_shrinks(self, f, t0):
        n = 5
        s = an.taylor_at(f, t0, n)
        errs = [abs(an.evaluate(f, t0 + h) - s.evaluate(t0 + h)) for h in (0.1, 0.05)]
        # O(h^{N+1}): halving h divides the error by about 2^6
        assert errs[1] <= errs[0] / 16 + 1e-12


class TestSeriesArithmetic:
    def test_inverse_exponentials(self):
        p = an.taylor_at(an.exp(1), 0, 6) * an.taylor_at(an.exp(-1), 0, 6)
        assert np.allclose(p.coeffs, [1, 0, 0, 0, 0, 0, 0], atol=1e-15)

    def test_sinc(self):
        s = an.taylor_at(an.sin(1), 0, 8)
        shifted = an.TaylorSeries(0.0, np.r_[s.coeffs[1:], 0.0])
        q = shifted / an.taylor_at(an.const(1), 0, 8)
        assert q.coeffs[:3] == pytest.approx([1, 0, -1 / 6])

    def test_division_by_vanishing_series(self):
        with pytest.raises(an.DivisionByZeroSeries):
            an.taylor_at(an.const(1), 0, 4) / an.taylor_at(an.sin(1), 0, 4)

    @given(functions(), functions(), functions())
    def test_ring_laws(self, f, g, h):
        a, b, c = (an.taylor_at(x, 0.3, 6) for x in (f, g, h))
        assert np.allclose(((a * b) * c).coeffs, (a * (b * c)).coeffs, atol=1e-9)
        assert np.allclose((a * (b + c)).coeffs, (a * b + a * c).coeffs, atol=1e-9)
        assert np.allclose((a * b).coeffs, (b * a).coeffs, atol=1e-12)

    @given(functions(), functions())
    def test_division_undoes_multiplication(self, f, g):
        b = an.taylor_at(g + an.const(10.0), 0.0, 6)
        a = an.taylor_at(f, 0.0, 6)
        assert np.allclose(((a * b) / b).coeffs, a.coeffs, atol=1e-8)


class TestLaurent:
    def test_pole_of_cosecant(self):
        one = an.LaurentSeries.from_taylor(an.taylor_at(an.const(1), 0, 8))
        s = an.LaurentSeries.from_taylor(an.taylor_at(an.sin(1), 0, 8))
        q = one / s
        assert q.valuation == -1
        assert q.coefficient(-1) == pytest.approx(1.0)
        assert q.coefficient(1) == pytest.approx(1 / 6)


class TestGrammar:
    @pytest.mark.parametrize("text", ["4sin(1t)", "2exp(1t) - 2exp(-1t)", "1t^2cos(3t)", "1.5"])
    def test_round_trip(self, text):
        f = an.parse(text)
        assert an.parse(an.render(f)) == f

    @given(functions())
    def test_normal_form_idempotent(self, f):
        assert an.ScalarFunction(f.terms) == f
        assert an.parse(an.render(f)) == f or np.allclose(
            an.evaluate(an.parse(an.render(f)), np.linspace(-1, 1, 5)), an.evaluate(f, np.linspace(-1, 1, 5)))

    @pytest.mark.parametrize("bad", ["sin(", "4tan(1t)", "2exp(t", "t^^2"])
    def test_rejects_malformed(self, bad):
        with pytest.raises(an.GrammarError):
            an.parse(bad)
