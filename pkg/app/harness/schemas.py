"""
Experiment Schemas
"""

from enum import Enum
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field, field_validator


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    REPORT_ONLY = "report-only"


class ExperimentConfig(BaseModel):
    """One named experiment: what to sweep, how many trials, and where the report goes."""

    format: Literal[1] = 1
    name: str
    params: dict[str, Any] = Field(default_factory=dict)
    n: Optional[list[int]] = Field(None, description="sweep of market sizes; the catalog default when omitted")
    trials: Optional[int] = Field(None, ge=1)
    seed: int = Field(..., ge=0, lt=2**64)
    guard: Optional[int] = Field(None, ge=1)
    workers: Optional[int] = Field(None, ge=1)
    output: Optional[str] = None

    @field_validator("n", mode="before")
    @classmethod
    def single_size(cls, value):
        return [value] if isinstance(value, int) else value

    @field_validator("n")
    @classmethod
    def positive_sizes(cls, value):
        if value is not None and (not value or any(n < 1 for n in value)):
            raise ValueError("n must be a non-empty list of positive sizes")
        return value


class Aggregate(BaseModel):
    n: int
    column: str
    count: int
    mean: float
    sd: float
    se: float


class Check(BaseModel):
    """One acceptance rule evaluated against the empirical numbers it cites."""

    name: str
    rule: str
    n: Optional[int] = None
    statistic: Optional[str] = None
    mean: Optional[float] = None
    se: Optional[float] = None
    bound: Optional[float] = None
    value: Optional[float] = None
    verdict: Verdict


class ExperimentReport(BaseModel):
    format: Literal[1] = 1
    experiment: str
    config: ExperimentConfig
    columns: list[str]
    rows: list[dict[str, Any]] = Field(default_factory=list)
    aggregates: list[Aggregate] = Field(default_factory=list)
    checks: list[Check] = Field(default_factory=list)
    notes: dict[str, Any] = Field(default_factory=dict)
    verdict: Verdict = Verdict.REPORT_ONLY

    def aggregate(self, n: int, column: str) -> Optional[Aggregate]:
        for agg in self.aggregates:
            if agg.n == n and agg.column == column:
                return agg
        return None


class SummaryPoint(BaseModel):
    experiment: str
    n: int
    statistic: str
    mean: float
    se: float
    count: int


class Summary(BaseModel):
    format: Literal[1] = 1
    points: list[SummaryPoint] = Field(default_factory=list)
    checks: list[Check] = Field(default_factory=list)
    verdict: Verdict = Verdict.REPORT_ONLY


class ExperimentInfo(BaseModel):
    name: str
    description: str
    default_n: list[int]
    default_trials: int
    default_params: dict[str, Any] = Field(default_factory=dict)
