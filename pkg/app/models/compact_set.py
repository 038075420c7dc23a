import math
from typing import Iterable, List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, field_validator

from config import Config

Interval = Tuple[float, float]


def merge_intervals(intervals: Iterable[Interval], gap: float = 0.0, open_ends: bool = False) -> List[Interval]:
    """Sort and merge intervals whose gap is below `gap`.

    Closed intervals that touch are merged; with `open_ends` the intervals are
    read as open and only strictly overlapping ones are merged.
    """
    merged: List[Interval] = []
    for lo, hi in sorted(intervals):
        if merged:
            last_lo, last_hi = merged[-1]
            joined = lo < last_hi if open_ends else lo - last_hi < gap or lo <= last_hi
            if joined:
                merged[-1] = (last_lo, max(last_hi, hi))
                continue
        merged.append((lo, hi))
    return merged


def _fmt(value: float) -> str:
    return repr(float(value))


class CompactSet(BaseModel):
    """Nonempty compact subset of the real line, stored as a finite union of
    disjoint closed intervals in increasing order (a point is a degenerate
    interval). Construction sorts and merges, so equal point sets compare equal.
    """

    model_config = ConfigDict(frozen=True)

    parts: Tuple[Tuple[float, float], ...]

    @field_validator('parts')
    @classmethod
    def normalize_parts(cls, v):
        if not v:
            raise ValueError('a compact set needs at least one interval')
        for lo, hi in v:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f'interval bounds must be finite, got [{lo}, {hi}]')
            if lo > hi:
                raise ValueError(f'interval [{lo}, {hi}] has lo > hi')
        return tuple(merge_intervals(((float(lo), float(hi)) for lo, hi in v), Config.MERGE_GAP))

    # Construction helpers

    @classmethod
    def make(cls, intervals: Sequence[Interval]) -> 'CompactSet':
        return cls(parts=tuple((lo, hi) for lo, hi in intervals))

    @classmethod
    def point(cls, x: float) -> 'CompactSet':
        return cls(parts=((x, x),))

    @classmethod
    def points(cls, xs: Iterable[float]) -> 'CompactSet':
        return cls(parts=tuple((x, x) for x in xs))

    @classmethod
    def interval(cls, lo: float, hi: float) -> 'CompactSet':
        return cls(parts=((lo, hi),))

    # Shape

    @property
    def lo(self) -> float:
        return self.parts[0][0]

    @property
    def hi(self) -> float:
        return self.parts[-1][1]

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def is_convex(self) -> bool:
        return len(self.parts) == 1

    def is_singleton(self, tol: float = 0.0) -> bool:
        return self.width <= tol

    def hull(self) -> 'CompactSet':
        """Closed convex hull [min A, max A]"""
        if self.is_convex():
            return self
        return CompactSet.interval(self.lo, self.hi)

    def extreme_points(self) -> 'CompactSet':
        """Extreme points of a convex value: its two endpoints"""
        if not self.is_convex():
            raise ValueError(f'extreme points are taken on convex values only, got {self}')
        return CompactSet.points((self.lo, self.hi))

    def union(self, other: 'CompactSet') -> 'CompactSet':
        return CompactSet(parts=self.parts + other.parts)

    # Metric structure

    def point_distance(self, z: float) -> float:
        """d(z, A) = inf over a in A of |z - a|"""
        return min(max(lo - z, z - hi, 0.0) for lo, hi in self.parts)

    def contains(self, z: float, tol: float = 0.0) -> bool:
        return self.point_distance(z) <= tol

    def gap_midpoints(self) -> List[float]:
        return [(self.parts[i][1] + self.parts[i + 1][0]) / 2.0 for i in range(len(self.parts) - 1)]

    def excess(self, other: 'CompactSet') -> float:
        """e_d(A, B) = sup over a in A of d(a, B).

        d(., B) is piecewise linear with maxima at gap midpoints of B, so the
        supremum over A is attained at an endpoint of A or at such a midpoint.
        """
        candidates = [x for part in self.parts for x in part]
        candidates.extend(m for m in other.gap_midpoints() if self.contains(m))
        return max(other.point_distance(x) for x in candidates)

    def is_subset(self, other: 'CompactSet', tol: float = 0.0) -> bool:
        return self.excess(other) <= tol

    def hausdorff(self, other: 'CompactSet') -> float:
        return max(self.excess(other), other.excess(self))

    def enlarge(self, eps: float) -> List[Interval]:
        """Open eps-enlargement S_eps(A) as merged open intervals"""
        if not eps > 0:
            raise ValueError(f'enlargement radius must be positive, got {eps}')
        return merge_intervals(((lo - eps, hi + eps) for lo, hi in self.parts), open_ends=True)

    def nearest_member(self, y: float) -> float:
        """Point of A closest to y; ties go to the smaller point"""
        best = None
        for lo, hi in self.parts:
            candidate = min(max(y, lo), hi)
            if best is None or abs(candidate - y) < abs(best - y):
                best = candidate
        return best

    # Text

    def to_literal(self) -> str:
        """Set literal with exact float text, e.g. "{-1.0, 1.0} u [2.0, 3.0]"."""
        terms: List[str] = []
        pending: List[float] = []
        for lo, hi in self.parts:
            if lo == hi:
                pending.append(lo)
                continue
            if pending:
                terms.append('{' + ', '.join(_fmt(x) for x in pending) + '}')
                pending = []
            terms.append(f'[{_fmt(lo)}, {_fmt(hi)}]')
        if pending:
            terms.append('{' + ', '.join(_fmt(x) for x in pending) + '}')
        return ' u '.join(terms)

    def __str__(self):
        return ' u '.join(f'{{{lo:.10g}}}' if lo == hi else f'[{lo:.10g}, {hi:.10g}]' for lo, hi in self.parts)


def covers(open_intervals: Sequence[Interval], compact: CompactSet) -> bool:
    """Whether a union of open intervals contains the compact set"""
    return all(
        any(l < lo and hi < h for l, h in open_intervals)
        for lo, hi in compact.parts
    )


def excess(a: CompactSet, b: CompactSet) -> float:
    return a.excess(b)


def hausdorff(a: CompactSet, b: CompactSet) -> float:
    return a.hausdorff(b)


def union_all(sets: Iterable[CompactSet]) -> CompactSet:
    return CompactSet(parts=tuple(part for s in sets for part in s.parts))
