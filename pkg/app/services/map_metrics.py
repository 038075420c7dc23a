import logging
from typing import Callable, List, Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

from app.exceptions import DomainError, ParseError, SamplingBudgetError
from app.models.piecewise_map import PiecewiseMap
from app.models.schemas import (
    Bracket, ConvergenceReport, ConvergenceRow, GraphHausdorffMetric, MapMetric,
    PointwiseMetric, UniformMetric, UniformOnCompactMetric, Verdict, VerdictStatus,
)
from app.services.adaptive_sampler import AdaptiveSampler
from app.services.expression_parser import ConstExprParser, split_top_level
from config import get_config

Tolerance = Union[float, Callable[[int], float]]

# Radius doublings tried before a graph distance gives up on the cloud budget
MAX_WIDENINGS = 32


def parse_metric(text: str) -> MapMetric:
    """Parse a metric selector: point:x1,x2,... | uc:u,v | uniform | graph"""
    consts = ConstExprParser()
    body = text.strip()
    offset = len(text) - len(text.lstrip()) + 1
    if body == 'uniform':
        return UniformMetric()
    if body == 'graph':
        return GraphHausdorffMetric()
    kind, colon, rest = body.partition(':')
    if not colon or kind not in ('point', 'uc'):
        raise ParseError(f"unknown metric '{body}' (expected point:..., uc:u,v, uniform or graph)", 1, offset)
    column = offset + len(kind) + 1
    values = [consts.parse(entry, col) for entry, col in split_top_level(rest, separator=',', column=column)]
    if kind == 'point':
        if not values:
            raise ParseError('point metric needs at least one point', 1, column)
        return PointwiseMetric(points=tuple(values))
    if len(values) != 2:
        raise ParseError('uc metric needs exactly two bounds', 1, column)
    if values[0] > values[1]:
        raise ParseError(f'uc bounds {values[0]} > {values[1]}', 1, column)
    return UniformOnCompactMetric(lo=values[0], hi=values[1])


class MapMetricCalculator:
    """Distances between piecewise maps for the pointwise, uniform-on-compacta,
    uniform and graph-Hausdorff topologies"""

    def __init__(self, app_config=None):
        self.config = app_config or get_config()
        self.sampler = AdaptiveSampler(self.config)
        self.logger = logging.getLogger(__name__)

    def fiber_distance(self, F: PiecewiseMap, G: PiecewiseMap, x: float) -> float:
        return F.fiber(x).hausdorff(G.fiber(x))

    def distance(self, F: PiecewiseMap, G: PiecewiseMap, metric: MapMetric, tol: float) -> Bracket:
        """Bracket of width at most tol around the distance of F and G"""
        if not tol > 0:
            raise ValueError(f'tolerance must be positive, got {tol}')
        if F.domain != G.domain:
            raise DomainError(f'domains differ: {F.domain} vs {G.domain}')

        if isinstance(metric, PointwiseMetric):
            value = max(self.fiber_distance(F, G, x) for x in metric.points)
            return Bracket(lo=value, hi=value)
        if isinstance(metric, GraphHausdorffMetric):
            if F == G:
                return Bracket(lo=0.0, hi=0.0)
            return self._graph_distance(F, G, tol)

        if F.punctures != G.punctures:
            raise DomainError(f'punctures differ: {F.punctures} vs {G.punctures}')
        if isinstance(metric, UniformMetric):
            return self._sup_distance(F, G, *F.domain, tol)
        if isinstance(metric, UniformOnCompactMetric):
            a, b = F.domain
            if not a <= metric.lo <= metric.hi <= b:
                raise DomainError(f'compact set [{metric.lo!r}, {metric.hi!r}] is not inside [{a!r}, {b!r}]')
            inside = [p for p in F.punctures if metric.lo <= p <= metric.hi]
            if inside:
                raise DomainError(f'compact set [{metric.lo!r}, {metric.hi!r}] contains punctures {inside}')
            if metric.lo == metric.hi:
                value = self.fiber_distance(F, G, metric.lo)
                return Bracket(lo=value, hi=value)
            return self._sup_distance(F, G, metric.lo, metric.hi, tol)
        raise ValueError(f'unsupported metric {metric!r}')

    def _sup_distance(self, F: PiecewiseMap, G: PiecewiseMap, lo: float, hi: float, tol: float) -> Bracket:
        merged = sorted(set(F.breakpoints) | set(G.breakpoints) | {lo, hi})
        left, right = F.with_breakpoints(merged), G.with_breakpoints(merged)
        floor = 0.0
        for (_, x, a), (_, _, b) in zip(left.resolved_fibers(), right.resolved_fibers()):
            if lo <= x <= hi:
                floor = max(floor, a.hausdorff(b))
        tasks = [(u, v, f, g) for (u, v, f), (_, _, g) in zip(left.segments(), right.segments())
                 if lo <= u and v <= hi]
        return self.sampler.sup_abs_difference(tasks, tol, lower=floor)

    # Graph clouds

    def graph_cloud(self, F: PiecewiseMap, radius: float) -> np.ndarray:
        """(N, 2) points within `radius` of the closed graph of F, every graph point within `radius` of one"""
        budget = self.config.MAX_CLOUD_POINTS
        blocks: List[np.ndarray] = []
        for i, x in enumerate(F.breakpoints):
            ys = self.sampler.segment_ordinates(F.closure_fiber_at(i), radius, budget=max(budget, 0))
            blocks.append(np.column_stack((np.full(ys.shape, x), ys)))
            budget -= len(ys)
        for u, v, expr in F.segments():
            if budget < 0:
                break
            block = self.sampler.piece_cloud(expr, u, v, radius, budget=budget)
            blocks.append(block)
            budget -= len(block)
        if budget < 0:
            raise SamplingBudgetError(f'graph cloud exceeds the budget of {self.config.MAX_CLOUD_POINTS} points',
                                      {'budget': self.config.MAX_CLOUD_POINTS, 'radius': radius})
        return np.concatenate(blocks)

    def _graph_distance(self, F: PiecewiseMap, G: PiecewiseMap, tol: float) -> Bracket:
        radius = tol / 4.0
        for _ in range(MAX_WIDENINGS):
            try:
                first, second = self.graph_cloud(F, radius), self.graph_cloud(G, radius)
                break
            except SamplingBudgetError:
                radius *= 2.0
        else:
            raise SamplingBudgetError(f'graph clouds do not fit {self.config.MAX_CLOUD_POINTS} points',
                                      {'budget': self.config.MAX_CLOUD_POINTS, 'radius': radius})
        if radius > tol / 4.0:
            self.logger.warning(f"Graph clouds exceed {self.config.MAX_CLOUD_POINTS} points at tolerance {tol:.3g}, "
                                f"bracket widened to {4.0 * radius:.3g}")
        self.logger.info(f"Graph distance on clouds of {len(first)} and {len(second)} points")
        forward, _ = cKDTree(second).query(first)
        backward, _ = cKDTree(first).query(second)
        value = float(max(forward.max(), backward.max()))
        return Bracket(lo=max(0.0, value - 2.0 * radius), hi=value + 2.0 * radius)

    # Sequences

    def converge(self, family: Callable[[int], PiecewiseMap], limit: PiecewiseMap, metric: MapMetric,
                 ns: Sequence[int], tol: Tolerance) -> ConvergenceReport:
        """Distance rows from family(n) to the limit and a verdict against tol"""
        ns = list(ns)
        if not ns or any(a >= b for a, b in zip(ns, ns[1:])):
            raise ValueError('ns must be a nonempty strictly increasing list')
        tol_at = tol if callable(tol) else (lambda n: tol)

        self.logger.info(f"Convergence run over n={ns[0]}..{ns[-1]} with metric {metric.selector()}")
        rows = []
        for n in ns:
            row_tol = tol_at(n)
            accuracy = min(row_tol / 2.0, self.config.CONVERGENCE_ACCURACY)
            rows.append(ConvergenceRow(n=n, distance=self.distance(family(n), limit, metric, accuracy), tol=row_tol))

        final = rows[-1]
        if final.distance.hi < final.tol:
            verdict = Verdict(status=VerdictStatus.CONVERGES, tol=final.tol)
        else:
            witness = max(rows, key=lambda row: row.distance.lo)
            verdict = Verdict(status=VerdictStatus.FAILS, tol=final.tol,
                              witness_n=witness.n, lower_bound=witness.distance.lo)
        return ConvergenceReport(metric=metric, rows=rows, verdict=verdict)


def parse_ns(text: str) -> List[int]:
    """Parse an index list: `a..b` ranges and single values separated by commas"""
    ns: List[int] = []
    for entry, col in split_top_level(text, separator=','):
        lo, dots, hi = entry.partition('..')
        try:
            if dots:
                ns.extend(range(int(lo), int(hi) + 1))
            else:
                ns.append(int(entry))
        except ValueError:
            raise ParseError(f"invalid index list entry '{entry}'", 1, col)
    if not ns:
        raise ParseError('empty index list', 1, 1)
    if any(a >= b for a, b in zip(ns, ns[1:])):
        raise ParseError(f"index list '{text}' must be strictly increasing", 1, 1)
    return ns
