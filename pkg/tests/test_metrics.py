import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cohomcurv import analytic as an
from cohomcurv.curvature import curvature_components, sample_interval
from cohomcurv.metrics import (CATALOG, CATALOG_IDS, ConfigError, DegenerateMetric, DiagonalMetric, FullMetricEndo,
                               Group, GroupDiagram, Isotropy, ProductMetric, UnknownId, catalog_get, dumps_metric,
                               eigen_track, example5, loads_metric, metric_from_config, random_metric, scale_metric,
                               scaled_entry)


SQ3 = math.sqrt(3)


class TestCatalog:
    def test_fourteen_ids(self):
        assert len(CATALOG_IDS) == 14

    def test_tsukada(self):
        e = catalog_get("tsukada")
        v1, v2, v3 = e.metric.functions
        assert v1 == an.parse("2exp(1t) - 2exp(-1t)")
        assert v2 == an.exp(1, 2) and v3 == an.exp(-1, 2)
        assert e.diagrams[0].slice_speed_a == 4

    def test_ex1(self):
        m = catalog_get("ex1").metric
        ts = np.linspace(0.1, 1.0, 5)
        assert np.allclose(m.values(ts), [4 * np.sin(ts), 2 * SQ3 * np.cos(ts) - 2 * np.sin(ts),
                                          2 * SQ3 * np.cos(ts) + 2 * np.sin(ts)])
        assert m.domain == pytest.approx((0.0, math.pi / 3))

    def test_ex8_sphere(self):
        m = catalog_get("ex8-sphere").metric
        assert m.functions == (an.sin(1),) * 3 and m.domain == pytest.approx((0, math.pi))

    @pytest.mark.parametrize("alias, target", [("ex3", "tsukada"), ("ex8", "ex8-sphere"), ("ex10", "ex10-compact")])
    def test_aliases(self, alias, target):
        assert catalog_get(alias) is CATALOG[target]

    def test_unknown(self):
        with pytest.raises(UnknownId):
            catalog_get("ex11")

    def test_collapse_speed_is_slice_speed(self, entry):
        d = entry.diagrams[0]
        m = entry.metric
        if d.group is not Group.SU2 or d.singular_codim != 2:
            pytest.skip("codimension two SU(2) ends only")
        lo = m.domain[0]
        (i,) = [k for k, f in enumerate(m.functions) if abs(an.evaluate(f, lo)) < 1e-12]
        assert abs(an.evaluate(m.functions[i].derivative(), lo)) == pytest.approx(d.slice_speed_a)

    def test_compact_entries_vanish_at_both_ends(self, entry):
        m = entry.metric
        if not entry.compact:
            pytest.skip("noncompact")
        lo, hi = m.domain
        inner = np.linspace(lo, hi, 203)[1:-1]
        assert all(np.all(an.evaluate(f, inner) > 0) for f in m.functions)
        for end in (lo, hi):
            assert min(abs(an.evaluate(f, end)) for f in m.functions) < 1e-12


class TestScaling:
    def test_ex5_three_halves(self):
        m = scale_metric(catalog_get("ex5").metric, 1.5)
        ts = np.linspace(0.1, 2.0, 5)
        assert np.allclose(m.values(ts), [3 * np.sin(2 * ts / 3), 3 * np.cos(2 * ts / 3), 3 + 0 * ts])

    def test_identity(self, diagonal_entry):
        m = diagonal_entry.metric
        ts = np.linspace(*sample_interval(m), 9)
        assert np.allclose(scale_metric(m, 1.0).values(ts), m.values(ts), atol=1e-14)

    @pytest.mark.parametrize("lam", [0.5, 2.0, 3.0])
    def test_round_trip(self, diagonal_entry, lam):
        m = diagonal_entry.metric
        back = scale_metric(scale_metric(m, lam), 1 / lam)
        ts = np.linspace(*sample_interval(m), 9)
        assert np.allclose(back.values(ts), m.values(ts), atol=1e-12, rtol=1e-12)

    @pytest.mark.parametrize("lam", [0.5, 2.0, 3.0])
    def test_curvature_scales(self, diagonal_entry, lam):
        m = diagonal_entry.metric
        ts = np.linspace(*sample_interval(m), 7)
        a = curvature_components(scale_metric(m, lam), lam * ts).as_vector()
        b = curvature_components(m, ts).as_vector() / lam**2
        assert np.allclose(a, b, rtol=1e-9, atol=1e-9)

    def test_scaled_entry_families(self):
        assert scaled_entry("ex5", 1.5).functions == example5(3.0).functions
        assert scaled_entry("ex9", 3.0).g == an.sin(1, 3.0)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            scale_metric(catalog_get("ex5").metric, 0.0)


class TestConfig:
    def test_round_trip(self, entry):
        m = loads_metric(dumps_metric(entry.metric))
        assert m == entry.metric

    def test_diagram_shorthand(self):
        m = metric_from_config({"kind": "diagonal", "v1": "2sin(1t)", "v2": "2cos(1t)", "v3": "2",
                                "domain": [0, 1.5], "diagram": {"a": 2, "codim": 2}})
        d = m.diagram
        assert d.slice_speed_a == 2 and (d.singular_isotropy, d.principal_isotropy) == (Isotropy.PIN2, "Z4")

    @pytest.mark.parametrize("cfg", [
        [], {"kind": "torus"}, {"v1": "1", "v2": "1"}, {"v1": "sin(", "v2": "1", "v3": "1"},
        {"v1": "1", "v2": "1", "v3": "1", "domain": [1]}, {"v1": "1", "v2": "1", "v3": "1", "domain": [2, 1]},
    ])
    def test_malformed(self, cfg):
        with pytest.raises(ConfigError):
            metric_from_config(cfg)

    def test_invalid_json(self):
        with pytest.raises(ConfigError):
            loads_metric("{not json")

    def test_deterministic(self, entry):
        assert dumps_metric(entry.metric) == json.dumps(json.loads(dumps_metric(entry.metric)), sort_keys=True)


class TestDiagrams:
    def test_fixed_point_constraints(self):
        with pytest.raises(ConfigError):
            GroupDiagram(Group.SU2, Isotropy.FULL_GROUP, "e", 2, 4)

    def test_inadmissible_pair(self):
        with pytest.raises(ConfigError):
            GroupDiagram(Group.SU2, Isotropy.PIN2, "Z7", 4, 2)


class TestEigenTrack:
    def test_crossing(self):
        P = FullMetricEndo(an.parse("0.5 - 0.5cos(2t)"), an.parse("0.5 + 0.5cos(2t)"), an.const(1))
        runs = eigen_track(P, (0.2, 1.3))
        assert [r.pattern for r in runs] == [(1, 1, 1), (1, 1, 1)]
        assert runs[0].interval[1] == pytest.approx(math.pi / 4, abs=1e-9)

    def test_example6_pattern(self):
        s2 = an.parse("0.5 - 0.5cos(2t)")
        P = FullMetricEndo(s2, s2, an.parse("0.125 - 0.125cos(4t)"))
        runs = eigen_track(P, (0.2, 1.3))
        assert [r.pattern for r in runs] == [(2, 1)]

    def test_identity(self):
        one = an.const(1)
        assert [r.pattern for r in eigen_track(FullMetricEndo(one, one, one), (0, 1))] == [(3,)]

    def test_singular(self):
        with pytest.raises(DegenerateMetric):
            eigen_track(FullMetricEndo(an.const(0), an.const(1), an.const(1)), (0, 1))


class TestRandomMetric:
    @given(st.integers(0, 10_000))
    def test_positive(self, seed):
        m = random_metric(np.random.default_rng(seed))
        assert np.all(m.values(np.linspace(*m.domain, 50)) > 0)
