import logging
import math
import re
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.exceptions import UnknownExampleError
from app.models.compact_set import CompactSet
from app.models.expressions import PieceExpr, Poly, SinRecip, const
from app.models.piecewise_map import PiecewiseMap
from app.models.schemas import ExpressionPool, RandomMapParams
from app.services.map_file import serialize_map

TRUNCATED = re.compile(r'^(fn|F21|G21)-trunc\((\d+)\)$')


class NamedExample(BaseModel):
    """A built-in map, or a family n -> map when `family` is set"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    description: str
    value: Optional[PiecewiseMap] = None
    family: Optional[Callable[[int], PiecewiseMap]] = None

    @property
    def is_family(self) -> bool:
        return self.family is not None

    def build(self, n: Optional[int] = None) -> PiecewiseMap:
        if self.is_family:
            if n is None:
                raise UnknownExampleError(f"'{self.name}' is a family and needs n")
            return self.family(n)
        if n is not None:
            raise UnknownExampleError(f"'{self.name}' is a single map and takes no n")
        return self.value


# Jump pair: -1 / 1 on either side of 0

def jump_map(zero_fiber: CompactSet) -> PiecewiseMap:
    return PiecewiseMap.from_pieces(
        (-1.0, 1.0),
        [(-1.0, 0.0, const(1.0)), (0.0, 1.0, const(-1.0))],
        {0.0: zero_fiber},
    )


def example_f21() -> PiecewiseMap:
    return jump_map(CompactSet.points((-1.0, 1.0)))


def example_g21() -> PiecewiseMap:
    return jump_map(CompactSet.interval(-1.0, 1.0))


def example_sinrec() -> PiecewiseMap:
    """sin(1/x) with value 0 at 0"""
    wave = SinRecip(amp=1.0, k=1.0, center=0.0)
    return PiecewiseMap.from_pieces((-1.0, 1.0), [(-1.0, 0.0, wave), (0.0, 1.0, wave)],
                                    {0.0: CompactSet.point(0.0)})


def p_breakpoint(n: int) -> float:
    return 2.0 / ((4 * n - 1) * math.pi)


def example_pn(n: int) -> PiecewiseMap:
    """1 left of 0, [-1, 1] at 0, sin(1/x) up to 2/((4n-1)pi), then -1"""
    if n < 1:
        raise UnknownExampleError(f'Pn needs n >= 1, got {n}')
    t = p_breakpoint(n)
    return PiecewiseMap.from_pieces(
        (-1.0, 1.0),
        [(-1.0, 0.0, const(1.0)), (0.0, t, SinRecip(amp=1.0, k=1.0, center=0.0)), (t, 1.0, const(-1.0))],
        {0.0: CompactSet.interval(-1.0, 1.0)},
    )


def example_gn(n: int) -> PiecewiseMap:
    """Continuous ramp from 1 at 0 down to -1 at 1/n"""
    if n < 1:
        raise UnknownExampleError(f'gn needs n >= 1, got {n}')
    ramp = Poly(coeffs=(1.0, -2.0 * n))
    edge = 1.0 / n
    pieces = [(-1.0, 0.0, const(1.0)), (0.0, edge, ramp)]
    if edge < 1.0:
        pieces.append((edge, 1.0, const(-1.0)))
    return PiecewiseMap.from_pieces((-1.0, 1.0), pieces)


def truncation_punctures(m: int) -> List[float]:
    return [1.0 / j for j in range(2, m + 1)]


def example_fn_trunc(m: int, n: int) -> PiecewiseMap:
    """1 left of 1/n and -1 right of it, on [-1, 1] minus {1/j : 2 <= j <= m}"""
    if not 2 <= n <= m:
        raise UnknownExampleError(f'fn-trunc({m}) is defined for 2 <= n <= {m}, got {n}')
    edge = 1.0 / n
    base = PiecewiseMap.from_pieces((-1.0, 1.0), [(-1.0, edge, const(1.0)), (edge, 1.0, const(-1.0))])
    return base.with_punctures(truncation_punctures(m))


class ExampleCorpus:
    """Registry of the built-in maps and families"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self._examples: Dict[str, NamedExample] = {
            'F21': NamedExample(name='F21', description='1 / {-1, 1} at 0 / -1 (minimal usco)',
                                value=example_f21()),
            'G21': NamedExample(name='G21', description='1 / [-1, 1] at 0 / -1 (minimal cusco)',
                                value=example_g21()),
            'sinrec': NamedExample(name='sinrec', description='sin(1/x) with value 0 at 0',
                                   value=example_sinrec()),
            'Pn': NamedExample(name='Pn', description='sin(1/x) on (0, 2/((4n-1)pi)), n >= 1',
                               family=example_pn),
            'gn': NamedExample(name='gn', description='continuous ramp 1 - 2nx on (0, 1/n), n >= 1',
                               family=example_gn),
        }

    def names(self) -> List[Tuple[str, str]]:
        listed = [(e.name, e.description) for e in self._examples.values()]
        listed.extend([
            ('fn-trunc(m)', 'f_n on [-1, 1] minus {1/j : 2 <= j <= m}, 2 <= n <= m (truncation)'),
            ('F21-trunc(m)', 'F21 on [-1, 1] minus {1/j : 2 <= j <= m}'),
            ('G21-trunc(m)', 'G21 on [-1, 1] minus {1/j : 2 <= j <= m}'),
        ])
        return listed

    def example(self, name: str) -> NamedExample:
        if name in self._examples:
            return self._examples[name]
        match = TRUNCATED.match(name)
        if match is None:
            known = ', '.join(n for n, _ in self.names())
            raise UnknownExampleError(f"unknown example '{name}' (known: {known})", {'name': name})
        base, m = match.group(1), int(match.group(2))
        if m < 2:
            raise UnknownExampleError(f'{name}: truncation needs m >= 2')
        if base == 'fn':
            return NamedExample(name=name, description=f'f_n with {m - 1} punctures',
                                family=lambda n: example_fn_trunc(m, n))
        limit = example_f21() if base == 'F21' else example_g21()
        return NamedExample(name=name, description=f'{base} with {m - 1} punctures',
                            value=limit.with_punctures(truncation_punctures(m)))

    def build(self, name: str, n: Optional[int] = None) -> PiecewiseMap:
        return self.example(name).build(n)

    def family(self, name: str) -> Callable[[int], PiecewiseMap]:
        entry = self.example(name)
        if not entry.is_family:
            raise UnknownExampleError(f"'{name}' is not an indexed family")
        return entry.family

    def export_example(self, name: str, n: Optional[int] = None) -> str:
        """Map file text of a corpus map"""
        return serialize_map(self.build(name, n))


# Random generators

def _random_piece(rng: np.random.Generator, kind: ExpressionPool, u: float, v: float,
                  interior: Tuple[float, ...]) -> PieceExpr:
    if kind == ExpressionPool.SINRECIP:
        centers = [x for x in (u, v) if x in interior]
        if centers:
            center = centers[int(rng.integers(len(centers)))]
            sign = 1.0 if rng.random() < 0.5 else -1.0
            return SinRecip(amp=float(rng.uniform(0.2, 1.5)), k=sign * float(rng.uniform(0.05, 0.5)),
                            center=center, offset=float(rng.uniform(-1.0, 1.0)))
        kind = ExpressionPool.POLY
    if kind == ExpressionPool.POLY:
        degree = int(rng.integers(1, 4))
        return Poly(coeffs=tuple(float(c) for c in rng.uniform(-1.0, 1.0, size=degree + 1)))
    return const(float(rng.uniform(-2.0, 2.0)))


def random_minimal_usco(seed: int, params: Optional[RandomMapParams] = None) -> PiecewiseMap:
    """Random piecewise map with auto fibers; minimal usco by construction"""
    params = params or RandomMapParams()
    rng = np.random.default_rng(seed)
    a, b = params.domain
    interior = tuple(sorted(set(float(x) for x in rng.uniform(a, b, size=params.breakpoints))))
    interior = tuple(x for x in interior if a < x < b)
    breakpoints = (a,) + interior + (b,)

    kinds = list(params.weights)
    weights = np.array([params.weights[k] for k in kinds], dtype=float)
    weights /= weights.sum()
    pieces = []
    for u, v in zip(breakpoints[:-1], breakpoints[1:]):
        kind = kinds[int(rng.choice(len(kinds), p=weights))]
        pieces.append((u, v, _random_piece(rng, kind, u, v, interior)))
    return PiecewiseMap.from_pieces((a, b), pieces)


def random_compact_set(seed: int, max_parts: int) -> CompactSet:
    """1..max_parts disjoint intervals (some degenerate) in [-10, 10]"""
    if max_parts < 1:
        raise ValueError(f'max_parts must be at least 1, got {max_parts}')
    rng = np.random.default_rng(seed)
    count = int(rng.integers(1, max_parts + 1))
    ends = np.sort(rng.uniform(-10.0, 10.0, size=2 * count))
    parts = []
    for lo, hi in zip(ends[0::2], ends[1::2]):
        if rng.random() < 0.3:
            hi = lo
        parts.append((float(lo), float(hi)))
    return CompactSet.make(parts)
