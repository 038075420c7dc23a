import heapq
import itertools
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.exceptions import SamplingBudgetError
from app.models.compact_set import CompactSet
from app.models.expressions import PieceExpr, Poly, SinRecip
from app.models.schemas import Bracket
from config import get_config

# Sub-intervals sampled in one linspace call
CHUNK_POINTS = 4096

PieceTask = Tuple[float, float, PieceExpr, PieceExpr]


def difference_expr(f: PieceExpr, g: PieceExpr) -> Optional[PieceExpr]:
    """f - g as a single expression when the language can express it"""
    if isinstance(f, Poly) and isinstance(g, Poly):
        size = max(len(f.coeffs), len(g.coeffs))
        fc = f.coeffs + (0.0,) * (size - len(f.coeffs))
        gc = g.coeffs + (0.0,) * (size - len(g.coeffs))
        return Poly(coeffs=tuple(a - b for a, b in zip(fc, gc)))
    if isinstance(f, SinRecip) and isinstance(g, SinRecip):
        if f.center == g.center and f.k == g.k:
            amp = f.amp - g.amp
            offset = f.offset - g.offset
            if amp == 0:
                return Poly(coeffs=(offset,))
            return SinRecip(amp=amp, k=f.k, center=f.center, offset=offset)
        return None
    if isinstance(f, SinRecip) and isinstance(g, Poly) and g.degree == 0:
        return SinRecip(amp=f.amp, k=f.k, center=f.center, offset=f.offset - g.coeffs[0])
    if isinstance(f, Poly) and f.degree == 0 and isinstance(g, SinRecip):
        return SinRecip(amp=-g.amp, k=g.k, center=g.center, offset=f.coeffs[0] - g.offset)
    return None


class AdaptiveSampler:
    """Sup enclosures and graph sampling driven by derivative bounds"""

    def __init__(self, app_config=None):
        self.config = app_config or get_config()
        self.logger = logging.getLogger(__name__)

    # Sup of |f - g| over open pieces

    def _value(self, x: float, f: PieceExpr, g: PieceExpr, d: Optional[PieceExpr]) -> float:
        if d is not None:
            return abs(d.eval(x))
        return abs(f.eval(x) - g.eval(x))

    def _limit(self, x: float, f: PieceExpr, g: PieceExpr, d: Optional[PieceExpr]) -> float:
        """Lower bound for the lim sup of |f - g| at an end of the piece"""
        if d is not None:
            if d.is_singular_at(x):
                return max(abs(bound) for bound in d.band())
            return abs(d.eval(x))
        f_singular, g_singular = f.is_singular_at(x), g.is_singular_at(x)
        if f_singular and g_singular:
            return 0.0
        if f_singular:
            return max(abs(y - g.eval(x)) for y in f.band())
        if g_singular:
            return max(abs(f.eval(x) - y) for y in g.band())
        return abs(f.eval(x) - g.eval(x))

    def _evaluate(self, u: float, v: float, f: PieceExpr, g: PieceExpr,
                  d: Optional[PieceExpr]) -> Tuple[float, float]:
        samples = [(u + v) / 2.0]
        for e in ((d,) if d is not None else (f, g)):
            samples.extend(e.peak_points(u, v))
        lower = max(self._value(x, f, g, d) for x in samples)
        lower = max(lower, self._limit(u, f, g, d), self._limit(v, f, g, d))
        if d is not None:
            lo, hi = d.enclosure(u, v)
            upper = max(abs(lo), abs(hi))
        else:
            f_lo, f_hi = f.enclosure(u, v)
            g_lo, g_hi = g.enclosure(u, v)
            upper = max(f_hi - g_lo, g_hi - f_lo)
        return lower, max(upper, lower)

    def sup_abs_difference(self, tasks: Sequence[PieceTask], tol: float, lower: float = 0.0) -> Bracket:
        """Bracket for sup of |f - g| over the union of open pieces (u, v).

        Best-first branch and bound: the piece with the largest upper bound is
        bisected until every upper bound is within tol of the best sample.
        `lower` seeds the lower bound (e.g. exact fiber distances).
        """
        if not tol > 0:
            raise ValueError(f'tolerance must be positive, got {tol}')
        best = lower
        counter = itertools.count()
        heap = []
        stuck = 0.0
        for u, v, f, g in tasks:
            d = difference_expr(f, g)
            node_lower, node_upper = self._evaluate(u, v, f, g, d)
            best = max(best, node_lower)
            heapq.heappush(heap, (-node_upper, next(counter), u, v, f, g, d))

        refinements = 0
        while heap and -heap[0][0] > best + tol:
            if refinements >= self.config.MAX_REFINEMENTS:
                self.logger.warning(f"Sup enclosure stopped after {refinements} refinements, "
                                    f"bracket width {-heap[0][0] - best:.3g} exceeds {tol:.3g}")
                break
            neg_upper, _, u, v, f, g, d = heapq.heappop(heap)
            mid = (u + v) / 2.0
            if not u < mid < v:
                stuck = max(stuck, -neg_upper)
                continue
            for a, b in ((u, mid), (mid, v)):
                node_lower, node_upper = self._evaluate(a, b, f, g, d)
                best = max(best, node_lower)
                heapq.heappush(heap, (-node_upper, next(counter), a, b, f, g, d))
            refinements += 1

        upper = max(best, stuck, -heap[0][0] if heap else 0.0)
        return Bracket(lo=best, hi=upper)

    # Graph sampling

    @staticmethod
    def band_width(expr: PieceExpr, radius: float) -> float:
        """Width next to an oscillation center where the local period drops below `radius`.

        Over [c, c + w] the phase runs through a full turn within `radius` of
        every abscissa, so each point of the band rectangle lies within
        `radius` of the closed graph.
        """
        if not isinstance(expr, SinRecip):
            return 0.0
        return math.sqrt(abs(expr.k) * radius / (2.0 * math.pi))

    def piece_abscissae(self, expr: PieceExpr, u: float, v: float, radius: float,
                        budget: Optional[int] = None, gap: Optional[float] = None) -> np.ndarray:
        """Abscissae whose graph points cover the piece's graph within `radius`.

        Nothing is sampled within `gap` (default radius/2) of an oscillation
        center; the caller covers that strip.
        """
        budget = budget if budget is not None else self.config.MAX_CLOUD_POINTS
        gap = radius / 2.0 if gap is None else gap
        lo = u + gap if expr.is_singular_at(u) else u
        hi = v - gap if expr.is_singular_at(v) else v
        if not lo < hi:
            return np.empty(0)
        chunks: List[Tuple[float, float, int]] = []
        total = 0
        stack = [(lo, hi)]
        while stack:
            a, b = stack.pop()
            slope = expr.deriv_bound(a, b)
            stretch = (b - a) * math.hypot(1.0, slope)
            count = math.ceil(stretch / (2.0 * radius))
            if count <= CHUNK_POINTS or not a < (a + b) / 2.0 < b:
                chunks.append((a, b, max(count, 1)))
                total += max(count, 1) + 1
                if total > budget:
                    raise SamplingBudgetError(
                        f'graph sampling needs more than {budget} points at radius {radius:.3g}',
                        {'budget': budget, 'radius': radius})
            else:
                mid = (a + b) / 2.0
                stack.append((mid, b))
                stack.append((a, mid))
        return np.concatenate([np.linspace(a, b, n + 1) for a, b, n in chunks])

    def piece_cloud(self, expr: PieceExpr, u: float, v: float, radius: float,
                    budget: Optional[int] = None) -> np.ndarray:
        """(N, 2) points within `radius` of the piece's closed graph, covering it within `radius`.

        The strip next to an oscillation center is emitted as a grid over the
        band rectangle instead of graph samples.
        """
        budget = budget if budget is not None else self.config.MAX_CLOUD_POINTS
        blocks = []
        width = 0.0
        singular = [x for x in (u, v) if expr.is_singular_at(x)]
        if singular:
            width = min(self.band_width(expr, radius), v - u)
            center = singular[0]
            band_lo, band_hi = expr.band()
            columns = max(math.ceil(width / radius), 1) + 1
            rows = max(math.ceil((band_hi - band_lo) / radius), 1) + 1
            if columns * rows > budget:
                raise SamplingBudgetError(
                    f'band rectangle needs {columns * rows} points at radius {radius:.3g}',
                    {'budget': budget, 'radius': radius})
            end = center + width if center == u else center - width
            xs, ys = np.meshgrid(np.linspace(center, end, columns), np.linspace(band_lo, band_hi, rows))
            blocks.append(np.column_stack((xs.ravel(), ys.ravel())))
            budget -= columns * rows
        xs = self.piece_abscissae(expr, u, v, radius, budget=budget, gap=width if singular else None)
        if xs.size:
            blocks.append(np.column_stack((xs, expr.eval_many(xs))))
        return np.concatenate(blocks) if blocks else np.empty((0, 2))

    def segment_ordinates(self, fib: CompactSet, radius: float, budget: Optional[int] = None) -> np.ndarray:
        """Ordinates covering a vertical fiber within radius/2"""
        budget = budget if budget is not None else self.config.MAX_CLOUD_POINTS
        counts = [max(math.ceil((hi - lo) / radius), 1) + 1 if hi > lo else 1 for lo, hi in fib.parts]
        if sum(counts) > budget:
            raise SamplingBudgetError(f'fiber {fib} needs {sum(counts)} points at radius {radius:.3g}',
                                      {'budget': budget, 'radius': radius})
        return np.concatenate([np.linspace(lo, hi, n) for (lo, hi), n in zip(fib.parts, counts)])
