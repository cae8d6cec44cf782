"""Root enumeration against an independent algebraic oracle.

The oracle eliminates with a lexicographic Groebner basis in sympy, solves
the triangular system exactly and keeps the real, nonnegative squares whose
square roots fall in the box.
"""
import math

import numpy as np
import pytest

from cohomcurv.classifier import compare_with_known, find_roots, get_system, parse_box
from cohomcurv.classifier.roots import same_point
from cohomcurv.classifier.systems import EMPTY, FINITE_NONEMPTY, SYSTEM_IDS, SYSTEMS
from cohomcurv.curvature import is_curvature_homogeneous

sp = pytest.importorskip("sympy")

ORACLE_IDS = FINITE_NONEMPTY + EMPTY


def _in_box(p, box, tol=1e-9):
    return all(lo - tol <= x <= hi + tol for x, (lo, hi) in zip(p, box))


def groebner_roots(system):
    U = sp.symbols(f"u0:{system.arity}")
    eqs = [sp.expand(e) for e in system.squared(*U)]
    slices = [{}] if not system.discrete else [{U[0]: sp.nsimplify(a * a)} for a in system.discrete[0]]
    out = []
    for fixed in slices:
        free = [u for u in U if u not in fixed]
        G = sp.groebner([e.subs(fixed) for e in eqs], *free, order="lex")
        if G.exprs == [1]:
            continue
        for sol in sp.solve(G.exprs, free, dict=True):
            sol.update(fixed)
            exprs = [sp.sympify(sol.get(u, u)) for u in U]
            consts = [(k, complex(sp.N(e))) for k, e in enumerate(exprs) if not e.free_symbols]
            if any(abs(v.imag) > 1e-12 or v.real < -1e-12 for _, v in consts):
                continue
            if len(consts) < system.arity:
                # a curve of solutions: only acceptable if a fixed coordinate is outside the box
                if any(not _in_box([math.sqrt(max(v.real, 0))], [system.box[k]]) for k, v in consts):
                    continue
                raise AssertionError(f"{system.id}: solution curve {sol} meets the box")
            p = tuple(math.sqrt(max(v.real, 0.0)) for _, v in consts)
            if _in_box(p, system.box):
                out.append(system.canonical(p))
    return sorted(set(tuple(round(x, 12) for x in p) for p in out))


def _same_set(ps, qs):
    return len(ps) == len(qs) and all(any(same_point(p, q) for q in qs) for p in ps)


@pytest.fixture(scope="module")
def reports():
    return {}


def _report(cache, sid):
    if sid not in cache:
        cache[sid] = find_roots(sid)
    return cache[sid]


class TestAgainstOracle:
    @pytest.mark.parametrize("sid", ORACLE_IDS)
    def test_same_set(self, reports, sid):
        system = SYSTEMS[sid]
        report = _report(reports, sid)
        expected = groebner_roots(system)
        candidates = report.points + [r.root.values for r in report.rejected]
        assert len(candidates) == len(expected)
        for p in expected:
            assert any(same_point(p, q) for q in candidates), p

    @pytest.mark.parametrize("sid", ORACLE_IDS)
    def test_matches_known(self, reports, sid):
        cmp = compare_with_known(_report(reports, sid))
        assert cmp == {"missing": [], "extra": []}

    @pytest.mark.parametrize("sid", EMPTY)
    def test_empty(self, reports, sid):
        assert _report(reports, sid).points == []

    def test_spurious_root_rejected(self, reports):
        # algebraically valid but the metric it builds is not curvature homogeneous
        report = _report(reports, "5.1-compact")
        assert _same_set([r.root.values for r in report.rejected], [(1, 2, math.sqrt(3) / 2)])
        assert not is_curvature_homogeneous(SYSTEMS["5.1-compact"].build((1, 2, math.sqrt(3) / 2))).verdict


class TestRoots:
    @pytest.mark.parametrize("sid", FINITE_NONEMPTY)
    def test_found_roots_are_ch(self, reports, sid):
        system = SYSTEMS[sid]
        for p in _report(reports, sid).points:
            assert is_curvature_homogeneous(system.build(p)).verdict

    def test_521_up_to_swap(self, reports):
        pts = _report(reports, "5.2.1").points
        assert _same_set(pts, [(2, 0, 1), (2, 1, 2)])

    def test_codim4_families(self):
        report = find_roots("codim4-trig")
        assert _same_set(report.points, [(1, 1, 1), (1, 1, 2)])
        for fam in report.families:
            assert fam.max_relative_residual < 1e-12
            m = SYSTEMS["codim4-trig"].build([fam.scales[1] * x for x in fam.direction])
            assert is_curvature_homogeneous(m).verdict

    def test_sorted_and_deterministic(self, reports):
        a = _report(reports, "5.2.2")
        b = find_roots("5.2.2")
        assert a.to_dict() == b.to_dict()
        assert a.points == sorted(a.points)

    def test_narrow_box_loses_root(self):
        system = get_system("5.2.1")
        box = parse_box("b=0.1:1.5", system.params, system.box)
        report = find_roots(system, box=box)
        cmp = compare_with_known(report)
        assert report.points == [] and len(cmp["missing"]) == 2

    def test_residuals_small(self, reports):
        for sid in FINITE_NONEMPTY:
            assert all(r.residual <= 1e-10 for r in _report(reports, sid).roots)


class TestParseBox:
    def test_override(self):
        s = get_system("5.2.1")
        assert parse_box("c1=0:2", s.params, s.box) == (s.box[0], (0.0, 2.0), s.box[2])

    @pytest.mark.parametrize("bad", ["x=0:1", "b=1", "b=2:1"])
    def test_bad(self, bad):
        s = get_system("5.2.1")
        with pytest.raises(ValueError):
            parse_box(bad, s.params, s.box)
