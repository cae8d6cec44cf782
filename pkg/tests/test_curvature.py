import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cohomcurv import analytic as an
from cohomcurv.curvature import (CH_TOL, CurvatureData, DomainError, PoleError, component_series,
                                 curvature_components, curvature_components_product, is_curvature_homogeneous,
                                 permute_components, profile_csv, ricci, sample_interval, solve_connection_A)
from cohomcurv.metrics import (CATALOG, DiagonalMetric, catalog_get, example5, example10, random_metric,
                               scale_metric)

PROBE = DiagonalMetric(an.sin(1), an.cos(1), an.const(1.1), (0.0, math.pi / 2))


def sphere():
    return catalog_get("ex8-sphere").metric


def flat():
    return catalog_get("ex8-flat").metric


def _probes(n=20, seed=1):
    rng = np.random.default_rng(seed)
    return [random_metric(rng) for _ in range(n)]


def _relabel(m, perm):
    fs = m.functions
    return DiagonalMetric(fs[perm[0]], fs[perm[1]], fs[perm[2]], m.domain)


class TestComponents:
    def test_sphere(self):
        cd = curvature_components(sphere(), 0.7)
        assert np.allclose(cd.kappa, 1) and np.allclose(cd.mixed, 0) and np.allclose(cd.radial, 1)

    def test_flat(self):
        assert np.allclose(curvature_components(flat(), 1.0).as_vector(), 0, atol=1e-14)

    @pytest.mark.parametrize("t", [0.3, 1.0, 2.5, 5.0])
    def test_tsukada(self, tsukada, t):
        cd = curvature_components(tsukada, t)
        assert np.allclose(cd.kappa, (-1, -1, 3), atol=1e-10)
        assert np.allclose(cd.radial, -1, atol=1e-12)
        assert cd.kappa[2] - cd.kappa[0] == pytest.approx(4, abs=1e-10)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            curvature_components(sphere(), 0.0)

    def test_product_ex9(self):
        s = curvature_components_product(catalog_get("ex9").metric, 0.5)
        assert s.sec12 == pytest.approx(1) and s.sec_iT == pytest.approx(1)

    @pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
    def test_product_ex10(self, a):
        s = curvature_components_product(example10("compact", a=a), 0.4)
        assert (s.sec12, s.sec_iT, s.sec_i4, s.sec_T4) == pytest.approx((1 / a**2, 0, 0, 1), abs=1e-12)

    def test_tensor_round_trip(self, tsukada):
        from cohomcurv.curvature import from_tensor
        cd = curvature_components(tsukada, 0.8)
        assert np.allclose(from_tensor(cd.tensor()).as_vector(), cd.as_vector())


class TestRicci:
    def test_sphere(self):
        assert np.allclose(ricci(sphere(), 0.4), 3)

    def test_tsukada(self, tsukada):
        assert np.allclose(ricci(tsukada, 1.2), (-3, 1, 1, -3), atol=1e-12)

    def test_ex7_einstein(self):
        r = ricci(catalog_get("ex7").metric, 0.6)
        assert np.ptp(r) < 1e-10 and r[0] < 0


class TestSeries:
    def test_sphere(self):
        s = component_series(sphere(), 0.3, order=6).kappa[2]
        # roundoff grows with order since the pole at 0 sets the radius of convergence
        bound = 1e-12 * (1 / 0.3) ** (2 * np.arange(7))
        assert np.all(np.abs(s.coeffs[:7] - [1, 0, 0, 0, 0, 0, 0]) <= bound)

    def test_ex5_constant(self):
        for s in component_series(example5(2.0), 0.4, order=6).components():
            assert np.max(np.abs(s.coeffs[1:7])) <= 1e-10

    def test_probe_not_constant(self):
        assert abs(component_series(PROBE, 0.4, order=3).kappa[0][1]) > 0.1

    def test_pole(self):
        with pytest.raises(PoleError):
            component_series(sphere(), 0.0)

    @pytest.mark.parametrize("m", [PROBE, *_probes(5)], ids=lambda m: "metric")
    def test_first_order_matches_centered_difference(self, m):
        lo, hi = sample_interval(m)
        t, h = 0.5 * (lo + hi), 1e-5
        first = np.array([s[1] for s in component_series(m, t, order=2).components()])
        fd = (curvature_components(m, t + h).as_vector() - curvature_components(m, t - h).as_vector()) / (2 * h)
        assert np.allclose(first, fd, atol=1e-6, rtol=1e-6)


class TestHomogeneity:
    def test_catalog(self, entry):
        r = is_curvature_homogeneous(entry.metric, 200)
        assert r.verdict and r.max_deviation < 1e-9

    def test_ex5_family(self):
        assert is_curvature_homogeneous(example5(3.7)).verdict

    def test_probe(self):
        r = is_curvature_homogeneous(PROBE)
        assert not r.verdict and r.max_deviation > 1e-2


class TestConnectionTensorA:
    def test_catalog(self, diagonal_entry):
        m = diagonal_entry.metric
        t = 0.5 if sample_interval(m)[0] < 0.5 < sample_interval(m)[1] else sum(sample_interval(m)) / 2
        assert solve_connection_A(m, t).residual < 1e-8

    def test_probe(self):
        a = solve_connection_A(PROBE, 0.5)
        assert a.residual > 1e-3 and a.residual_at_zero >= a.residual

    def test_tsukada(self, tsukada):
        A = solve_connection_A(tsukada, 1.0)
        assert A.residual < 1e-8
        assert np.allclose(A.matrix(), -A.matrix().T)

    @pytest.mark.parametrize("m", [entry.metric for entry in CATALOG.values() if isinstance(entry.metric, DiagonalMetric)]
                             + [PROBE, *_probes()])
    def test_equivalent_to_constancy(self, m):
        ts = np.linspace(*sample_interval(m), 7)
        a_ok = max(solve_connection_A(m, float(t)).residual for t in ts) <= CH_TOL
        assert a_ok == is_curvature_homogeneous(m).verdict


class TestScaling:
    @pytest.mark.parametrize("lam", [0.5, 2.0, 3.0])
    def test_law(self, diagonal_entry, lam):
        m = diagonal_entry.metric
        ts = np.linspace(*sample_interval(m), 11)
        lhs = curvature_components(scale_metric(m, lam), lam * ts).as_vector()
        rhs = curvature_components(m, ts).as_vector() / lam**2
        assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-9)


PERMS = [(0, 1, 2), (1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0), (2, 0, 1)]


class TestPermutation:
    @pytest.mark.parametrize("perm", PERMS)
    def test_catalog(self, diagonal_entry, perm):
        m = diagonal_entry.metric
        t = sum(sample_interval(m)) / 2
        lhs = curvature_components(_relabel(m, perm), t).as_vector()
        rhs = permute_components(curvature_components(m, t), perm).as_vector()
        assert np.allclose(lhs, rhs, atol=1e-12, rtol=1e-12)

    @given(st.integers(0, 10_000), st.sampled_from(PERMS))
    def test_random(self, seed, perm):
        m = random_metric(np.random.default_rng(seed))
        t = sum(sample_interval(m)) / 2
        lhs = curvature_components(_relabel(m, perm), t).as_vector()
        rhs = permute_components(curvature_components(m, t), perm).as_vector()
        assert np.allclose(lhs, rhs, atol=1e-12, rtol=1e-12)

    def test_mixed_carry_no_sign(self):
        m = _probes(1)[0]
        cd = curvature_components(m, 1.0)
        swapped = permute_components(cd, (1, 0, 2))
        assert sorted(np.abs(swapped.mixed)) == pytest.approx(sorted(np.abs(cd.mixed)))
        assert sum(swapped.mixed) == pytest.approx(sum(cd.mixed))


class TestProfile:
    def test_csv(self, tsukada):
        text = profile_csv(tsukada, [0.5, 1.0])
        lines = text.strip().splitlines()
        assert lines[0].split(",") == ["t", *CurvatureData.NAMES, "A_residual"]
        assert len(lines) == 3
        assert float(lines[1].split(",")[3]) == pytest.approx(3)
        assert float(lines[1].split(",")[-1]) < 1e-8
