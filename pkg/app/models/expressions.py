import math
from enum import Enum
from typing import Annotated, List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.exceptions import DomainError
from app.models.compact_set import CompactSet


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class PieceExpr(BaseModel):
    """Continuous piece of a piecewise map; subclasses are the closed expression language"""

    model_config = ConfigDict(frozen=True)

    def eval(self, x: float) -> float:
        raise NotImplementedError

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def cluster(self, x0: float, side: Side) -> CompactSet:
        raise NotImplementedError

    def deriv_bound(self, u: float, v: float) -> float:
        raise NotImplementedError

    def to_text(self) -> str:
        raise NotImplementedError

    def band(self) -> Tuple[float, float]:
        """Bounds every value of the piece satisfies"""
        return (-math.inf, math.inf)

    def is_singular_at(self, x: float) -> bool:
        return False

    def enclosure(self, u: float, v: float) -> Tuple[float, float]:
        """Interval containing every value on (u, v)"""
        band_lo, band_hi = self.band()
        bound = self.deriv_bound(u, v)
        if math.isinf(bound):
            return band_lo, band_hi
        mid = (u + v) / 2.0
        value = self.eval(mid)
        radius = bound * (v - u) / 2.0
        return max(value - radius, band_lo), min(value + radius, band_hi)

    def peak_points(self, u: float, v: float) -> List[float]:
        return []


class Poly(PieceExpr):
    """c0 + c1*x + c2*x^2 + ..."""

    kind: Literal['poly'] = 'poly'
    coeffs: Tuple[float, ...]

    @field_validator('coeffs')
    @classmethod
    def normalize_coeffs(cls, v):
        if not v:
            raise ValueError('a polynomial needs at least one coefficient')
        if not all(math.isfinite(c) for c in v):
            raise ValueError('polynomial coefficients must be finite')
        coeffs = [float(c) for c in v]
        while len(coeffs) > 1 and coeffs[-1] == 0.0:
            coeffs.pop()
        return tuple(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def eval(self, x: float) -> float:
        result = 0.0
        for c in reversed(self.coeffs):
            result = result * x + c
        return result

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        return np.polynomial.polynomial.polyval(xs, self.coeffs)

    def cluster(self, x0: float, side: Side) -> CompactSet:
        return CompactSet.point(self.eval(x0))

    def deriv_bound(self, u: float, v: float) -> float:
        if not u < v:
            raise ValueError(f'deriv_bound needs u < v, got [{u}, {v}]')
        reach = max(abs(u), abs(v))
        return sum(i * abs(c) * reach ** (i - 1) for i, c in enumerate(self.coeffs) if i > 0)

    def derivative(self) -> 'Poly':
        if self.degree == 0:
            return Poly(coeffs=(0.0,))
        return Poly(coeffs=tuple(i * c for i, c in enumerate(self.coeffs) if i > 0))

    def enclosure(self, u: float, v: float) -> Tuple[float, float]:
        # second order centered form: |p(x) - p(m) - p'(m)(x - m)| <= M2 h^2 / 2
        if self.degree <= 1:
            lo, hi = sorted((self.eval(u), self.eval(v)))
            return lo, hi
        mid, half = (u + v) / 2.0, (v - u) / 2.0
        slope = abs(self.derivative().eval(mid))
        curvature = self.derivative().deriv_bound(u, v)
        radius = slope * half + curvature * half * half / 2.0
        value = self.eval(mid)
        return value - radius, value + radius

    def to_text(self) -> str:
        return 'poly ' + ' '.join(repr(c) for c in self.coeffs)


class SinRecip(PieceExpr):
    """offset + amp * sin(k / (x - center))"""

    kind: Literal['sinrecip'] = 'sinrecip'
    amp: float
    k: float
    center: float
    offset: float = 0.0

    @field_validator('k')
    @classmethod
    def nonzero_frequency(cls, v):
        if v == 0:
            raise ValueError('sinrecip needs k != 0')
        return v

    def _phase(self, x: float) -> float:
        return self.k / (x - self.center)

    def eval(self, x: float) -> float:
        if x == self.center:
            raise DomainError(f'sinrecip is undefined at its center {self.center!r}')
        return self.offset + self.amp * math.sin(self._phase(x))

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        return self.offset + self.amp * np.sin(self.k / (xs - self.center))

    def band(self) -> Tuple[float, float]:
        spread = abs(self.amp)
        return self.offset - spread, self.offset + spread

    def is_singular_at(self, x: float) -> bool:
        return x == self.center

    def cluster(self, x0: float, side: Side) -> CompactSet:
        # sin(k/(x-c)) runs through all of [-1, 1] in every one-sided
        # neighbourhood of c
        if x0 == self.center:
            return CompactSet.interval(*self.band())
        return CompactSet.point(self.eval(x0))

    def deriv_bound(self, u: float, v: float) -> float:
        if not u < v:
            raise ValueError(f'deriv_bound needs u < v, got [{u}, {v}]')
        if u <= self.center <= v:
            return math.inf
        gap = min(abs(u - self.center), abs(v - self.center))
        return abs(self.amp * self.k) / gap ** 2

    def peak_points(self, u: float, v: float) -> List[float]:
        """Points of [u, v] where the sine is +1 or -1, one of each at most"""
        if u < self.center < v:
            raise ValueError('peak points are taken on one side of the center')
        finite = sorted(self._phase(x) for x in (u, v) if x != self.center)
        if not finite:
            return []
        if len(finite) == 2:
            lo_t, hi_t = finite
        else:
            inside = (u + v) / 2.0
            direction = math.copysign(1.0, self._phase(inside) - finite[0])
            lo_t, hi_t = (finite[0], math.inf) if direction > 0 else (-math.inf, finite[0])
        points = []
        for phase in (math.pi / 2.0, -math.pi / 2.0):
            if math.isinf(hi_t):
                j = math.ceil((lo_t - phase) / (2.0 * math.pi))
            elif math.isinf(lo_t):
                j = math.floor((hi_t - phase) / (2.0 * math.pi))
            else:
                j = round(((lo_t + hi_t) / 2.0 - phase) / (2.0 * math.pi))
            t = phase + 2.0 * math.pi * j
            if lo_t <= t <= hi_t:
                x = self.center + self.k / t
                if u <= x <= v and x != self.center:
                    points.append(x)
        return points

    def to_text(self) -> str:
        return f'sinrecip amp={self.amp!r} k={self.k!r} c={self.center!r} off={self.offset!r}'


Expr = Annotated[Union[Poly, SinRecip], Field(discriminator='kind')]


def const(value: float) -> Poly:
    return Poly(coeffs=(value,))
