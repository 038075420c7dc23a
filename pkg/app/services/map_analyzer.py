import logging
from typing import List, Optional

from app.exceptions import DomainError, InvariantViolationError, PreconditionError
from app.models.compact_set import CompactSet
from app.models.piecewise_map import PiecewiseMap
from app.models.schemas import ClassificationReport, SelectionPolicy, Witness
from app.services.adaptive_sampler import AdaptiveSampler
from config import get_config


class MapAnalyzer:
    """Selections, graph closure, the convexification map and the
    usco / cusco classification of piecewise set-valued maps"""

    def __init__(self, app_config=None):
        self.config = app_config or get_config()
        self.tolerance = self.config.SET_TOLERANCE
        self.sampler = AdaptiveSampler(self.config)
        self.logger = logging.getLogger(__name__)

    # Selections and closures

    @staticmethod
    def _select(fib: CompactSet, policy: SelectionPolicy) -> float:
        if policy == SelectionPolicy.INF:
            return fib.lo
        if policy == SelectionPolicy.SUP:
            return fib.hi
        return fib.nearest_member((fib.lo + fib.hi) / 2.0)

    def selection(self, F: PiecewiseMap, policy: SelectionPolicy) -> PiecewiseMap:
        """Single-valued map inside F: pieces unchanged, one member of each breakpoint fiber"""
        policy = SelectionPolicy(policy)
        chosen = {i: CompactSet.point(self._select(fib, policy)) for i, _, fib in F.resolved_fibers()}
        return F.with_fibers(chosen)

    def graph_closure(self, F: PiecewiseMap) -> PiecewiseMap:
        """Map whose graph is the closure of F's graph (declared fiber plus cluster sets)"""
        return F.with_fibers({i: F.closure_fiber_at(i) for i, _, _ in F.resolved_fibers()})

    def multi_valued_points(self, F: PiecewiseMap, tol: Optional[float] = None) -> List[float]:
        tol = self.tolerance if tol is None else tol
        return [x for _, x, fib in F.resolved_fibers() if not fib.is_singleton(tol)]

    def is_single_valued(self, F: PiecewiseMap, tol: Optional[float] = None) -> bool:
        return not self.multi_valued_points(F, tol)

    # Classification

    def classify(self, F: PiecewiseMap) -> ClassificationReport:
        tol = self.tolerance
        usco = minimal_rule = convex = extreme_rule = True
        witnesses: List[Witness] = []

        for i, x, fib in F.resolved_fibers():
            clusters = F.cluster_union(i)
            if usco and not clusters.is_subset(fib, tol):
                usco = False
                witnesses.append(Witness(breakpoint=x, rule='usco',
                                         reason=f'cluster set {clusters} is not inside fiber {fib}'))
            if minimal_rule and not (fib.is_singleton(tol) or fib.is_subset(clusters, tol)):
                minimal_rule = False
                witnesses.append(Witness(breakpoint=x, rule='minimal_usco',
                                         reason=f'fiber {fib} is not a singleton and exceeds cluster set {clusters}'))
            if convex and not fib.is_convex():
                convex = False
                witnesses.append(Witness(breakpoint=x, rule='cusco', reason=f'fiber {fib} is not convex'))
            if extreme_rule:
                for policy in (SelectionPolicy.SUP, SelectionPolicy.INF):
                    rebuilt = CompactSet.point(self._select(fib, policy)).union(clusters).hull()
                    if rebuilt.hausdorff(fib) > tol:
                        extreme_rule = False
                        witnesses.append(Witness(
                            breakpoint=x, rule='minimal_cusco',
                            reason=f'hull of the {policy.value}-selection closure is {rebuilt}, fiber is {fib}'))
                        break

        is_usco = usco
        is_cusco = usco and convex
        return ClassificationReport(
            is_usco=is_usco,
            is_minimal_usco=is_usco and minimal_rule,
            is_cusco=is_cusco,
            is_minimal_cusco=is_cusco and extreme_rule,
            witnesses=witnesses,
        )

    # Convexification and its inverse

    def phi(self, F: PiecewiseMap) -> PiecewiseMap:
        """Fiberwise convex hull of a minimal usco map"""
        report = self.classify(F)
        if not report.is_minimal_usco:
            self.logger.error("phi called on a map that is not minimal usco")
            raise PreconditionError('phi is defined on minimal usco maps only', report.witness_pairs())
        return F.with_fibers({i: fib.hull() for i, _, fib in F.resolved_fibers()})

    def phi_inverse(self, G: PiecewiseMap) -> PiecewiseMap:
        """The minimal usco map inside a minimal cusco map, as the closure of an extreme selection"""
        report = self.classify(G)
        if not report.is_minimal_cusco:
            self.logger.error("phi_inverse called on a map that is not minimal cusco")
            raise PreconditionError('phi_inverse is defined on minimal cusco maps only', report.witness_pairs())
        upper = self.graph_closure(self.selection(G, SelectionPolicy.SUP))
        lower = self.graph_closure(self.selection(G, SelectionPolicy.INF))
        for (_, x, a), (_, _, b) in zip(upper.resolved_fibers(), lower.resolved_fibers()):
            if a.hausdorff(b) > self.tolerance:
                self.logger.error(f"Extreme selection closures disagree at x={x!r}")
                raise InvariantViolationError(
                    f'closures of the sup and inf selections differ at x={x!r}: {a} vs {b}',
                    {'breakpoint': x, 'sup': a.to_literal(), 'inf': b.to_literal()})
        return upper

    # Pointwise structure

    def is_star_qc_at(self, f: PiecewiseMap, x: float) -> bool:
        """Whether a single-valued map is *-quasicontinuous at x: its closure fiber is an interval"""
        kind, index = f.locate(x)
        if not f.fiber(x).is_singleton(self.tolerance):
            raise PreconditionError(f'map is multi-valued at x={x!r}', [(x, f'fiber {f.fiber(x)}')])
        if kind == 'piece':
            return True
        return f.closure_fiber_at(index).is_convex()

    def map_equal(self, F: PiecewiseMap, G: PiecewiseMap, tol: float) -> bool:
        """Equality of maps up to tol, fiberwise in the Hausdorff distance.

        With tol == 0 the pieces must match exactly as expressions.
        """
        if F.domain != G.domain:
            raise DomainError(f'domains differ: {F.domain} vs {G.domain}')
        if F.punctures != G.punctures:
            raise DomainError(f'punctures differ: {F.punctures} vs {G.punctures}')

        merged = sorted(set(F.breakpoints) | set(G.breakpoints))
        left, right = F.with_breakpoints(merged), G.with_breakpoints(merged)
        for (_, x, a), (_, _, b) in zip(left.resolved_fibers(), right.resolved_fibers()):
            if a.hausdorff(b) > tol:
                self.logger.info(f"Maps differ at breakpoint x={x!r}")
                return False

        tasks = [(u, v, f, g) for (u, v, f), (_, _, g) in zip(left.segments(), right.segments()) if f != g]
        if not tasks:
            return True
        if tol == 0:
            return False
        gap = self.sampler.sup_abs_difference(tasks, tol / 2.0)
        return gap.hi <= tol
