import pytest

from app.exceptions import DomainError, InvariantViolationError, PreconditionError
from app.models.compact_set import CompactSet
from app.models.expressions import Poly, const
from app.models.piecewise_map import PiecewiseMap
from app.models.schemas import Bracket, ExpressionPool, RandomMapParams, SelectionPolicy
from app.services.corpus import random_minimal_usco
from app.services.map_analyzer import MapAnalyzer
from config import TestingConfig
from tests.conftest import FULL_PARAMS

POLICIES = list(SelectionPolicy)


def flags(report):
    return (report.is_usco, report.is_minimal_usco, report.is_cusco, report.is_minimal_cusco)


class TestFibers:
    def test_jump_pair_fibers(self, F21, G21):
        assert F21.fiber(0.0) == CompactSet.points([-1.0, 1.0])
        assert F21.fiber(-0.5) == CompactSet.point(1.0)
        assert G21.fiber(0.0) == CompactSet.interval(-1.0, 1.0)

    def test_auto_endpoint_fibers_are_one_sided(self, F21):
        assert F21.fiber(-1.0) == CompactSet.point(1.0)
        assert F21.fiber(1.0) == CompactSet.point(-1.0)

    @pytest.mark.parametrize('x', [-1.5, 1.0 + 1e-9])
    def test_outside_the_domain(self, F21, x):
        with pytest.raises(DomainError):
            F21.fiber(x)

    def test_punctured_point(self, corpus):
        F = corpus.build('F21-trunc(3)')
        with pytest.raises(DomainError):
            F.fiber(0.5)
        assert F.fiber(0.4) == CompactSet.point(-1.0)


class TestSelections:
    def test_extreme_selections_of_the_interval_fiber(self, analyzer, G21):
        assert analyzer.selection(G21, SelectionPolicy.SUP).fiber(0.0) == CompactSet.point(1.0)
        assert analyzer.selection(G21, SelectionPolicy.INF).fiber(0.0) == CompactSet.point(-1.0)
        assert analyzer.selection(G21, SelectionPolicy.MID).fiber(0.0) == CompactSet.point(0.0)
        assert analyzer.selection(G21, SelectionPolicy.SUP).pieces == G21.pieces

    def test_mid_selection_stays_in_a_split_fiber(self, analyzer, F21):
        assert analyzer.selection(F21, SelectionPolicy.MID).fiber(0.0) == CompactSet.point(-1.0)

    @pytest.mark.parametrize('policy', POLICIES)
    def test_single_valued_map_is_its_own_selection(self, analyzer, corpus, policy):
        g = corpus.build('gn', 3)
        assert analyzer.map_equal(analyzer.selection(g, policy), g, 0.0)

    def test_selections_are_single_valued(self, analyzer, G21):
        for policy in POLICIES:
            assert analyzer.is_single_valued(analyzer.selection(G21, policy))
        assert analyzer.multi_valued_points(G21) == [0.0]


class TestGraphClosure:
    def test_oscillation_fills_the_fiber(self, analyzer, sinrec):
        assert analyzer.graph_closure(sinrec).fiber(0.0) == CompactSet.interval(-1.0, 1.0)

    def test_closure_of_sup_selection_is_the_jump_pair(self, analyzer, F21, G21):
        closed = analyzer.graph_closure(analyzer.selection(G21, SelectionPolicy.SUP))
        assert analyzer.map_equal(closed, F21, 0.0)

    def test_continuous_map_is_closed(self, analyzer, corpus):
        g = corpus.build('gn', 5)
        assert analyzer.map_equal(analyzer.graph_closure(g), g, 0.0)

    def test_idempotent(self, analyzer, sinrec):
        once = analyzer.graph_closure(sinrec)
        assert analyzer.map_equal(analyzer.graph_closure(once), once, 0.0)


class TestClassify:
    def test_jump_pair(self, analyzer, F21, G21):
        assert flags(analyzer.classify(F21)) == (True, True, False, False)
        assert flags(analyzer.classify(G21)) == (True, False, True, True)

    def test_witnesses_name_the_breakpoint(self, analyzer, F21, G21):
        assert [(w.breakpoint, w.rule) for w in analyzer.classify(F21).witnesses] == [
            (0.0, 'cusco'), (0.0, 'minimal_cusco')]
        assert [(w.breakpoint, w.rule) for w in analyzer.classify(G21).witnesses] == [(0.0, 'minimal_usco')]

    def test_oscillating_map_and_its_closure(self, analyzer, sinrec):
        report = analyzer.classify(sinrec)
        assert not report.is_usco
        assert report.witnesses[0].breakpoint == 0.0
        assert flags(analyzer.classify(analyzer.graph_closure(sinrec))) == (True, True, True, True)

    def test_fiber_missing_a_limit_is_not_usco(self, analyzer):
        F = PiecewiseMap.from_pieces((0.0, 2.0), [(0.0, 1.0, const(0.0)), (1.0, 2.0, const(1.0))],
                                     {1.0: CompactSet.point(0.0)})
        assert flags(analyzer.classify(F)) == (False, False, False, False)

    def test_oversized_singleton_side(self, analyzer):
        # fiber [0, 2] over a continuous point with value 1: usco but not minimal
        F = PiecewiseMap.from_pieces((0.0, 2.0), [(0.0, 1.0, const(1.0)), (1.0, 2.0, const(1.0))],
                                     {1.0: CompactSet.interval(0.0, 2.0)})
        assert flags(analyzer.classify(F)) == (True, False, True, False)

    def test_both_classes_iff_minimal_usco_with_convex_fibers(self, analyzer):
        for seed in range(200):
            F = random_minimal_usco(seed, FULL_PARAMS)
            report = analyzer.classify(F)
            convex = all(fib.is_convex() for _, _, fib in F.resolved_fibers())
            both = report.is_minimal_usco and report.is_minimal_cusco
            assert both == (report.is_minimal_usco and convex)

    def test_minimal_uscos_are_single_valued_off_breakpoints(self, analyzer):
        for seed in range(100):
            F = random_minimal_usco(seed, FULL_PARAMS)
            assert set(analyzer.multi_valued_points(F)) <= set(F.breakpoints)


class TestPhi:
    def test_jump_pair_round_trip(self, analyzer, F21, G21):
        assert analyzer.map_equal(analyzer.phi(F21), G21, 1e-12)
        assert analyzer.map_equal(analyzer.phi_inverse(G21), F21, 1e-12)
        assert analyzer.map_equal(analyzer.phi_inverse(analyzer.phi(F21)), F21, 1e-12)
        assert not analyzer.map_equal(F21, G21, 1e-12)

    def test_phi_of_continuous_map(self, analyzer, corpus):
        g = corpus.build('gn', 2)
        assert analyzer.map_equal(analyzer.phi(g), g, 0.0)
        assert analyzer.map_equal(analyzer.phi_inverse(g), g, 0.0)

    def test_phi_keeps_the_closed_oscillation(self, analyzer, sinrec):
        closed = analyzer.graph_closure(sinrec)
        assert analyzer.map_equal(analyzer.phi(closed), closed, 0.0)

    def test_phi_precondition(self, analyzer, G21):
        with pytest.raises(PreconditionError) as info:
            analyzer.phi(G21)
        assert info.value.witnesses[0][0] == 0.0
        assert 'minimal_usco' in str(info.value)

    def test_phi_inverse_precondition(self, analyzer, F21):
        with pytest.raises(PreconditionError) as info:
            analyzer.phi_inverse(F21)
        assert [x for x, _ in info.value.witnesses] == [0.0, 0.0]

    def test_phi_inverse_cross_checks_extreme_closures(self, G21, monkeypatch):
        broken = MapAnalyzer(TestingConfig)
        monkeypatch.setattr(broken, 'graph_closure', lambda F: F)
        with pytest.raises(InvariantViolationError, match='x=0.0'):
            broken.phi_inverse(G21)

    def test_oscillating_family(self, analyzer, corpus, calculator, F21):
        for n in range(1, 21):
            P = corpus.build('Pn', n)
            assert analyzer.classify(P).is_minimal_cusco
            inverse = analyzer.phi_inverse(P)
            assert inverse.fiber(0.0) == CompactSet.interval(-1.0, 1.0)
            assert calculator.fiber_distance(F21, inverse, 0.0) == pytest.approx(1.0, abs=1e-9)


class TestProperties:
    def test_bijection_round_trips(self, analyzer):
        for seed in range(200):
            F = random_minimal_usco(seed, FULL_PARAMS)
            assert analyzer.classify(F).is_minimal_usco
            G = analyzer.phi(F)
            assert analyzer.classify(G).is_minimal_cusco
            assert analyzer.map_equal(analyzer.phi_inverse(G), F, 1e-12)
            assert analyzer.map_equal(analyzer.phi(analyzer.phi_inverse(G)), G, 1e-12)

    def test_every_selection_closes_to_the_map(self, analyzer):
        for seed in range(200):
            F = random_minimal_usco(1000 + seed, FULL_PARAMS)
            for policy in POLICIES:
                closed = analyzer.graph_closure(analyzer.selection(F, policy))
                assert analyzer.map_equal(closed, F, 1e-12), (seed, policy)

    def test_extreme_selections_close_to_the_same_map(self, analyzer):
        for seed in range(200):
            G = analyzer.phi(random_minimal_usco(2000 + seed, FULL_PARAMS))
            upper = analyzer.graph_closure(analyzer.selection(G, SelectionPolicy.SUP))
            lower = analyzer.graph_closure(analyzer.selection(G, SelectionPolicy.INF))
            assert analyzer.map_equal(upper, lower, 1e-12)

    def test_phi_fixes_maps_in_both_classes(self, analyzer, corpus, sinrec):
        maps = [corpus.build('gn', 3), analyzer.graph_closure(sinrec)]
        for seed in range(50):
            F = random_minimal_usco(3000 + seed, FULL_PARAMS)
            if analyzer.classify(F).is_minimal_cusco:
                maps.append(F)
        for F in maps:
            assert analyzer.classify(F).is_minimal_usco
            assert analyzer.map_equal(analyzer.phi(F), F, 0.0)

    def test_fiberwise_hull_is_idempotent(self, analyzer):
        for seed in range(50):
            G = analyzer.phi(random_minimal_usco(3000 + seed, FULL_PARAMS))
            again = G.with_fibers({i: fib.hull() for i, _, fib in G.resolved_fibers()})
            assert analyzer.map_equal(again, G, 0.0)

    def test_polynomial_map_is_in_both_classes(self, analyzer):
        params = RandomMapParams(breakpoints=0, weights={ExpressionPool.POLY: 1.0})
        F = random_minimal_usco(1, params)
        assert len(F.pieces) == 1 and isinstance(F.pieces[0], Poly)
        assert flags(analyzer.classify(F)) == (True, True, True, True)

    def test_sign_jump_is_minimal_usco(self, analyzer):
        params = RandomMapParams(breakpoints=1, weights={ExpressionPool.CONST: 1.0})
        F = random_minimal_usco(2, params)
        report = analyzer.classify(F)
        assert report.is_minimal_usco
        assert report.is_cusco == (not analyzer.multi_valued_points(F))


class TestStarQuasicontinuity:
    def test_oscillation_with_value_in_the_band(self, analyzer, sinrec):
        assert analyzer.is_star_qc_at(sinrec, 0.0)

    def test_sup_selection_of_interval_fiber(self, analyzer, G21):
        assert not analyzer.is_star_qc_at(analyzer.selection(G21, SelectionPolicy.SUP), 0.0)

    def test_continuous_points(self, analyzer, corpus):
        g = corpus.build('gn', 4)
        assert all(analyzer.is_star_qc_at(g, x) for x in (-1.0, -0.3, 0.0, 0.25, 0.9, 1.0))

    def test_needs_a_single_value(self, analyzer, G21):
        with pytest.raises(PreconditionError):
            analyzer.is_star_qc_at(G21, 0.0)


class TestMapEqual:
    def test_identity(self, analyzer, F21):
        assert analyzer.map_equal(F21, F21, 0.0)

    def test_extra_breakpoints_do_not_matter(self, analyzer, G21):
        assert analyzer.map_equal(G21.with_breakpoints([-0.5, 0.25]), G21, 0.0)

    def test_pieces_compared_within_tolerance(self, analyzer):
        F = PiecewiseMap.from_pieces((0.0, 1.0), [(0.0, 1.0, Poly(coeffs=(0.0, 1.0)))])
        G = PiecewiseMap.from_pieces((0.0, 1.0), [(0.0, 1.0, Poly(coeffs=(1e-4, 1.0)))])
        assert analyzer.map_equal(F, G, 1e-3)
        assert not analyzer.map_equal(F, G, 1e-5)
        assert not analyzer.map_equal(F, G, 0.0)

    def test_constant_offsets_against_the_tolerance(self, analyzer):
        F = PiecewiseMap.from_pieces((0.0, 1.0), [(0.0, 0.5, const(0.0)), (0.5, 1.0, Poly(coeffs=(0.0, 1.0)))])
        for offset, equal in ((8e-4, True), (1.2e-3, False)):
            G = PiecewiseMap.from_pieces((0.0, 1.0), [(0.0, 0.5, const(0.0)), (0.5, 1.0, Poly(coeffs=(offset, 1.0)))])
            assert analyzer.map_equal(F, G, 1e-3) == equal

    def test_decided_on_the_upper_bound(self, monkeypatch):
        analyzer = MapAnalyzer(TestingConfig)
        requested = []

        def loose_bracket(tasks, tol, lower=0.0):
            requested.append(tol)
            return Bracket(lo=9e-4, hi=1.4e-3)

        monkeypatch.setattr(analyzer.sampler, 'sup_abs_difference', loose_bracket)
        F = PiecewiseMap.from_pieces((0.0, 1.0), [(0.0, 1.0, Poly(coeffs=(0.0, 1.0)))])
        G = PiecewiseMap.from_pieces((0.0, 1.0), [(0.0, 1.0, Poly(coeffs=(0.0, 1.0, 1e-3)))],
                                     {1.0: CompactSet.point(1.0)})
        assert not analyzer.map_equal(F, G, 1e-3)
        assert requested == [5e-4]

    def test_domains_must_agree(self, analyzer, F21, corpus):
        other = PiecewiseMap.from_pieces((0.0, 1.0), [(0.0, 1.0, const(0.0))])
        with pytest.raises(DomainError):
            analyzer.map_equal(F21, other, 0.0)
        with pytest.raises(DomainError):
            analyzer.map_equal(F21, corpus.build('F21-trunc(3)'), 0.0)
