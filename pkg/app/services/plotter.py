import logging
from typing import Optional, Tuple

import matplotlib
matplotlib.use('Agg')
from matplotlib.figure import Figure  # noqa: E402

import numpy as np  # noqa: E402

from app.models.piecewise_map import PiecewiseMap  # noqa: E402
from app.services.adaptive_sampler import AdaptiveSampler  # noqa: E402
from config import get_config  # noqa: E402

HASH_SALT = 'setmaps'
LINE_COLOR = '#1f4e79'
FIBER_COLOR = '#b22222'


class MapPlotter:
    """Static SVG rendering of a piecewise map: pieces as polylines, breakpoint
    fibers as vertical segments, punctures as open circles"""

    def __init__(self, app_config=None):
        self.config = app_config or get_config()
        self.sampler = AdaptiveSampler(self.config)
        self.logger = logging.getLogger(__name__)

    def _polylines(self, F: PiecewiseMap):
        spacing = self.config.PLOT_SPACING
        for u, v, expr in F.segments():
            xs = self.sampler.piece_abscissae(expr, u, v, spacing)
            if xs.size:
                yield xs, expr.eval_many(xs)

    def default_y_range(self, F: PiecewiseMap) -> Tuple[float, float]:
        """[min - 0.5, max + 0.5] over all fibers and sampled pieces"""
        lows, highs = [], []
        for _, ys in self._polylines(F):
            lows.append(float(ys.min()))
            highs.append(float(ys.max()))
        for i, _ in enumerate(F.breakpoints):
            fib = F.closure_fiber_at(i)
            lows.append(fib.lo)
            highs.append(fib.hi)
        return min(lows) - 0.5, max(highs) + 0.5

    def render(self, F: PiecewiseMap, out_path: str, y_range: Optional[Tuple[float, float]] = None) -> str:
        y_range = y_range or self.default_y_range(F)
        figure = Figure(figsize=(6.4, 4.8))
        axes = figure.add_subplot()

        for xs, ys in self._polylines(F):
            axes.plot(xs, ys, color=LINE_COLOR, linewidth=0.8)

        for i, x in enumerate(F.breakpoints):
            if F.is_punctured(i):
                ys = np.array([y for part in F.cluster_union(i).parts for y in sorted(set(part))])
                axes.scatter(np.full(ys.shape, x), ys, s=24, facecolors='none', edgecolors=FIBER_COLOR, zorder=3)
                continue
            for lo, hi in F.breakpoint_fiber(i).parts:
                if lo == hi:
                    axes.scatter([x], [lo], s=16, color=FIBER_COLOR, zorder=3)
                else:
                    axes.vlines(x, lo, hi, colors=FIBER_COLOR, linewidth=1.6, zorder=3)

        axes.set_xlim(*F.domain)
        axes.set_ylim(*y_range)
        axes.set_xlabel('x')
        axes.set_ylabel('F(x)')
        with matplotlib.rc_context({'svg.hashsalt': HASH_SALT}):
            figure.savefig(out_path, format='svg', metadata={'Date': None})
        self.logger.info(f"Plot written: {out_path}")
        return out_path
