from pydantic import BaseModel, ConfigDict, Field, model_validator, validator
from typing import Annotated, List, Dict, Any, Optional, Union, Literal, Tuple
from enum import Enum
from datetime import datetime


class SelectionPolicy(str, Enum):
    INF = "inf"
    SUP = "sup"
    MID = "mid"


class VerdictStatus(str, Enum):
    CONVERGES = "converges"
    FAILS = "fails"


class ExpressionPool(str, Enum):
    CONST = "const"
    POLY = "poly"
    SINRECIP = "sinrecip"


# Classification

class Witness(BaseModel):
    model_config = ConfigDict(frozen=True)

    breakpoint: float
    rule: str
    reason: str


class ClassificationReport(BaseModel):
    is_usco: bool
    is_minimal_usco: bool
    is_cusco: bool
    is_minimal_cusco: bool
    witnesses: List[Witness] = Field(default_factory=list)

    @model_validator(mode='after')
    def check_lattice(self):
        if self.is_minimal_usco and not self.is_usco:
            raise ValueError('a minimal usco is usco')
        if self.is_minimal_cusco and not self.is_cusco:
            raise ValueError('a minimal cusco is cusco')
        if self.is_cusco and not self.is_usco:
            raise ValueError('a cusco is usco')
        return self

    def flags_line(self) -> str:
        def yes(flag: bool) -> str:
            return 'yes' if flag else 'no'
        return (f"usco={yes(self.is_usco)} minimal_usco={yes(self.is_minimal_usco)} "
                f"cusco={yes(self.is_cusco)} minimal_cusco={yes(self.is_minimal_cusco)}")

    def witness_pairs(self) -> List[Tuple[float, str]]:
        return [(w.breakpoint, f"{w.rule}: {w.reason}") for w in self.witnesses]


# Map metrics

class PointwiseMetric(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal['point'] = 'point'
    points: Tuple[float, ...]

    @validator('points')
    def validate_points(cls, v):
        if not v:
            raise ValueError('pointwise metric needs at least one point')
        return v

    def selector(self) -> str:
        return 'point:' + ','.join(repr(x) for x in self.points)


class UniformOnCompactMetric(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal['uc'] = 'uc'
    lo: float
    hi: float

    @model_validator(mode='after')
    def validate_bounds(self):
        if not self.lo <= self.hi:
            raise ValueError(f'compact set [{self.lo}, {self.hi}] needs lo <= hi')
        return self

    def selector(self) -> str:
        return f'uc:{self.lo!r},{self.hi!r}'


class UniformMetric(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal['uniform'] = 'uniform'

    def selector(self) -> str:
        return 'uniform'


class GraphHausdorffMetric(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal['graph'] = 'graph'

    def selector(self) -> str:
        return 'graph'


MapMetric = Annotated[
    Union[PointwiseMetric, UniformOnCompactMetric, UniformMetric, GraphHausdorffMetric],
    Field(discriminator='kind')
]


class Bracket(BaseModel):
    """Rigorous enclosure [lo, hi] of a supremum"""

    model_config = ConfigDict(frozen=True)

    lo: float = Field(ge=0.0)
    hi: float

    @model_validator(mode='after')
    def validate_order(self):
        if not self.lo <= self.hi:
            raise ValueError(f'bracket needs lo <= hi, got [{self.lo}, {self.hi}]')
        return self

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= value <= self.hi + slack

    def __str__(self):
        return f'[{self.lo:.12g}, {self.hi:.12g}]'


class ConvergenceRow(BaseModel):
    n: int
    distance: Bracket
    tol: float


class Verdict(BaseModel):
    status: VerdictStatus
    tol: float
    witness_n: Optional[int] = None
    lower_bound: Optional[float] = None

    def describe(self) -> str:
        if self.status == VerdictStatus.CONVERGES:
            return f'converges below {self.tol:.6g}'
        return f'fails at n={self.witness_n} with lower bound {self.lower_bound:.12g}'


class ConvergenceReport(BaseModel):
    metric: MapMetric
    rows: List[ConvergenceRow]
    verdict: Verdict

    @validator('rows')
    def validate_rows(cls, v):
        if not v:
            raise ValueError('a convergence report needs at least one row')
        if any(a.n >= b.n for a, b in zip(v, v[1:])):
            raise ValueError('rows must have strictly increasing n')
        return v


# Corpus

class RandomMapParams(BaseModel):
    breakpoints: int = Field(3, ge=0, le=64, description="Number of interior breakpoints")
    weights: Dict[ExpressionPool, float] = Field(
        default_factory=lambda: {ExpressionPool.CONST: 0.5, ExpressionPool.POLY: 0.3, ExpressionPool.SINRECIP: 0.2},
        description="Relative weights of the expression pool"
    )
    domain: Tuple[float, float] = (-1.0, 1.0)

    @validator('weights')
    def validate_weights(cls, v):
        if not v or any(w < 0 for w in v.values()) or sum(v.values()) <= 0:
            raise ValueError('weights must be non-negative with a positive total')
        return v


# Request Models

class MapSourceRequest(BaseModel):
    source: Optional[str] = Field(None, description="corpus:NAME[,n=K] reference")
    map_text: Optional[str] = Field(None, description="Map definition file contents")

    @model_validator(mode='after')
    def validate_source(self):
        if bool(self.source) == bool(self.map_text):
            raise ValueError('give exactly one of source or map_text')
        if self.source is not None and not self.source.strip().startswith('corpus:'):
            raise ValueError('source must be a corpus: reference')
        return self


class DistanceRequest(BaseModel):
    first: MapSourceRequest
    second: MapSourceRequest
    metric: str = Field(..., description="point:x1,x2,... | uc:u,v | uniform | graph")
    tol: float = Field(1e-6, gt=0.0)

    @validator('metric')
    def validate_metric(cls, v):
        if not v.strip():
            raise ValueError('Metric cannot be empty')
        return v.strip()


class ConvergeRequest(BaseModel):
    family: str = Field(..., description="Corpus family name, e.g. Pn or gn")
    limit: MapSourceRequest
    metric: str
    ns: str = Field(..., description="n list, e.g. 1..20 or 2,4,8")
    tol: float = Field(1e-6, gt=0.0)

    @validator('family')
    def validate_family(cls, v):
        if not v.strip():
            raise ValueError('Family cannot be empty')
        return v.strip()


# Response Models

class APIResponse(BaseModel):
    success: bool
    message: Optional[str] = None
    data: Optional[Any] = None
    error: Optional[str] = None
    timestamp: datetime = Field(default_factory=datetime.now)


class ErrorResponse(BaseModel):
    success: bool = False
    error: str
    error_code: Optional[str] = None
    details: Optional[Dict[str, Any]] = None
    timestamp: datetime = Field(default_factory=datetime.now)
