from bisect import bisect_left
from typing import Dict, Iterator, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, model_validator

from app.exceptions import DomainError
from app.models.compact_set import CompactSet, union_all
from app.models.expressions import Expr, PieceExpr, Side, SinRecip

AUTO = 'auto'

FiberSpec = Union[CompactSet, Literal['auto'], None]


class PiecewiseMap(BaseModel):
    """Set-valued map on [a, b] minus finitely many punctures.

    Single-valued on the open pieces between breakpoints, with a declared
    fiber (or 'auto' = one-sided cluster sets) at every non-punctured
    breakpoint. A punctured breakpoint carries no fiber (None).
    """

    model_config = ConfigDict(frozen=True)

    domain: Tuple[float, float]
    breakpoints: Tuple[float, ...]
    pieces: Tuple[Expr, ...]
    fibers: Tuple[FiberSpec, ...]
    punctures: Tuple[float, ...] = ()

    @model_validator(mode='after')
    def check_layout(self):
        a, b = self.domain
        bps = self.breakpoints
        if not a < b:
            raise ValueError(f'domain [{a}, {b}] needs a < b')
        if len(bps) < 2 or bps[0] != a or bps[-1] != b:
            raise ValueError('breakpoints must start at a and end at b')
        if any(not bps[i] < bps[i + 1] for i in range(len(bps) - 1)):
            raise ValueError('breakpoints must be strictly increasing')
        if len(self.pieces) != len(bps) - 1:
            raise ValueError(f'{len(bps) - 1} pieces expected, got {len(self.pieces)}')
        if len(self.fibers) != len(bps):
            raise ValueError(f'{len(bps)} fibers expected, got {len(self.fibers)}')
        if list(self.punctures) != sorted(set(self.punctures)):
            raise ValueError('punctures must be sorted and distinct')
        interior = set(bps[1:-1])
        for p in self.punctures:
            if p not in interior:
                raise ValueError(f'puncture {p} is not an interior breakpoint')
        for x, fib in zip(bps, self.fibers):
            if (fib is None) != (x in self.punctures):
                state = 'punctured' if x in self.punctures else 'not punctured'
                raise ValueError(f'breakpoint {x} is {state} but its fiber is {fib!r}')
        for (u, v), piece in zip(self.intervals(), self.pieces):
            if isinstance(piece, SinRecip) and u < piece.center < v:
                raise ValueError(f'sinrecip center {piece.center} lies inside its piece ({u}, {v})')
        return self

    @classmethod
    def from_pieces(cls, domain: Tuple[float, float], pieces: Sequence[Tuple[float, float, PieceExpr]],
                    fibers: Optional[Dict[float, FiberSpec]] = None,
                    punctures: Sequence[float] = ()) -> 'PiecewiseMap':
        """Build from (u, v, expr) triples that tile the domain; unlisted fibers are auto"""
        ordered = sorted(pieces, key=lambda p: p[0])
        breakpoints = [ordered[0][0]] + [v for _, v, _ in ordered]
        for (_, v, _), (u, _, _) in zip(ordered, ordered[1:]):
            if u != v:
                raise ValueError(f'pieces do not tile the domain between {v} and {u}')
        fibers = fibers or {}
        punctured = set(punctures)
        return cls(
            domain=tuple(domain),
            breakpoints=tuple(breakpoints),
            pieces=tuple(expr for _, _, expr in ordered),
            fibers=tuple(None if x in punctured else fibers.get(x, AUTO) for x in breakpoints),
            punctures=tuple(sorted(punctured)),
        )

    # Layout

    def intervals(self) -> Iterator[Tuple[float, float]]:
        return zip(self.breakpoints[:-1], self.breakpoints[1:])

    def segments(self) -> Iterator[Tuple[float, float, PieceExpr]]:
        for (u, v), piece in zip(self.intervals(), self.pieces):
            yield u, v, piece

    def is_punctured(self, index: int) -> bool:
        return self.fibers[index] is None

    def breakpoint_index(self, x: float) -> Optional[int]:
        i = bisect_left(self.breakpoints, x)
        if i < len(self.breakpoints) and self.breakpoints[i] == x:
            return i
        return None

    def locate(self, x: float) -> Tuple[str, int]:
        """('breakpoint', i) or ('piece', i) for a point of the domain"""
        a, b = self.domain
        if not a <= x <= b:
            raise DomainError(f'x={x!r} lies outside the domain [{a!r}, {b!r}]')
        index = self.breakpoint_index(x)
        if index is not None:
            if self.is_punctured(index):
                raise DomainError(f'x={x!r} is a puncture of the domain')
            return 'breakpoint', index
        return 'piece', bisect_left(self.breakpoints, x) - 1

    # Fibers

    def one_sided_clusters(self, index: int) -> Tuple[Optional[CompactSet], Optional[CompactSet]]:
        """Cluster sets from the left and right pieces at breakpoint `index`"""
        x = self.breakpoints[index]
        left = self.pieces[index - 1].cluster(x, Side.LEFT) if index > 0 else None
        right = self.pieces[index].cluster(x, Side.RIGHT) if index < len(self.pieces) else None
        return left, right

    def cluster_union(self, index: int) -> CompactSet:
        return union_all(c for c in self.one_sided_clusters(index) if c is not None)

    def breakpoint_fiber(self, index: int) -> CompactSet:
        fib = self.fibers[index]
        if fib is None:
            raise DomainError(f'x={self.breakpoints[index]!r} is a puncture of the domain')
        if fib == AUTO:
            return self.cluster_union(index)
        return fib

    def fiber(self, x: float) -> CompactSet:
        """F(x)"""
        kind, index = self.locate(x)
        if kind == 'breakpoint':
            return self.breakpoint_fiber(index)
        return CompactSet.point(self.pieces[index].eval(x))

    def closure_fiber_at(self, index: int) -> CompactSet:
        """Fiber of the graph closure at breakpoint `index` (planar closure at punctures)"""
        clusters = self.cluster_union(index)
        if self.is_punctured(index):
            return clusters
        return self.breakpoint_fiber(index).union(clusters)

    def resolved_fibers(self) -> List[Tuple[int, float, CompactSet]]:
        """(index, x, fiber) for every non-punctured breakpoint"""
        return [(i, x, self.breakpoint_fiber(i))
                for i, x in enumerate(self.breakpoints) if not self.is_punctured(i)]

    # Derived maps

    def with_fibers(self, fibers: Dict[int, FiberSpec]) -> 'PiecewiseMap':
        updated = list(self.fibers)
        for index, fib in fibers.items():
            updated[index] = fib
        return self.model_copy(update={'fibers': tuple(updated)})

    def with_breakpoints(self, points: Sequence[float]) -> 'PiecewiseMap':
        """Insert breakpoints (auto fibers) without changing the map"""
        pieces = list(self.segments())
        fibers = {x: fib for x, fib in zip(self.breakpoints, self.fibers) if fib is not None}
        for p in sorted(set(points)):
            if self.breakpoint_index(p) is not None:
                continue
            self.locate(p)
            for j, (u, v, expr) in enumerate(pieces):
                if u < p < v:
                    pieces[j:j + 1] = [(u, p, expr), (p, v, expr)]
                    break
        return PiecewiseMap.from_pieces(self.domain, pieces, fibers, self.punctures)

    def with_punctures(self, points: Sequence[float]) -> 'PiecewiseMap':
        """The same map on the domain with `points` removed"""
        split = self.with_breakpoints(points)
        punctured = sorted(set(split.punctures) | set(points))
        fibers = {x: fib for x, fib in zip(split.breakpoints, split.fibers) if fib is not None}
        return PiecewiseMap.from_pieces(self.domain, list(split.segments()), fibers, punctured)
