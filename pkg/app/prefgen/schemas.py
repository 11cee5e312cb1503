"""
Preference Model Schemas
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field

from app.core.schemas import Instance


class ModelName(str, Enum):
    POPULARITY = "popularity"
    UNIFORM = "uniform"
    MASTER = "master"
    GAUSSIAN = "gaussian"
    SWAP = "swap"
    GROUPED = "grouped"
    FOLKLORE = "folklore"
    FOLKLORE_ORIGINAL = "folklore-original"


RANDOMIZED_MODELS = {
    ModelName.POPULARITY, ModelName.UNIFORM, ModelName.GAUSSIAN,
    ModelName.SWAP, ModelName.GROUPED, ModelName.FOLKLORE,
}


class ModelDescriptor(BaseModel):
    """Provenance of a generated instance; also the `gen` sidecar format."""

    format: Literal[1] = 1
    model: ModelName
    params: dict[str, Any] = Field(default_factory=dict)
    M: int = Field(..., ge=1)
    W: int = Field(..., ge=1)
    seed: Optional[int] = Field(None, ge=0)
    trial: int = Field(0, ge=0)


# ---------------------------------------------------------
# Generator models (numeric, in-process only)
# ---------------------------------------------------------
@dataclass(frozen=True, eq=False)
class LogWeights:
    """Popularity weights of one person over their acceptable set, stored as logs."""

    candidates: np.ndarray
    log_weights: np.ndarray

    def __post_init__(self):
        if self.candidates.shape != self.log_weights.shape or self.candidates.ndim != 1:
            raise ValueError("candidates and log_weights must be 1-d arrays of equal length")
        if len(self.candidates) == 0:
            raise ValueError("acceptable set must be non-empty")
        if not np.all(np.isfinite(self.log_weights)):
            raise ValueError("all popularity weights must be positive and finite")
        if len(np.unique(self.candidates)) != len(self.candidates):
            raise ValueError("duplicate candidate in acceptable set")
        self.candidates.setflags(write=False)
        self.log_weights.setflags(write=False)

    @classmethod
    def from_logs(cls, candidates, log_weights) -> "LogWeights":
        return cls(np.asarray(candidates, dtype=np.int64), np.asarray(log_weights, dtype=np.float64))

    @classmethod
    def uniform(cls, size: int) -> "LogWeights":
        return cls.from_logs(np.arange(size), np.zeros(size))

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.log_weights == self.log_weights[0]))

    def log_weight_of(self, candidate: int) -> Optional[float]:
        hits = np.flatnonzero(self.candidates == candidate)
        return float(self.log_weights[hits[0]]) if len(hits) else None


@dataclass(frozen=True, eq=False)
class PopularityModel:
    """Popularity preferences. A None entry is a person with a fixed list instead of weights."""

    M: int
    W: int
    women: tuple[Optional[LogWeights], ...]
    men: Optional[tuple[Optional[LogWeights], ...]] = None


@dataclass(frozen=True)
class GaussianModel:
    """Women score man m_i as i + Normal(0, sigma^2) noise and sort ascending."""

    M: int
    W: int
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class MasterListModel:
    M: int
    W: int


@dataclass(frozen=True, eq=False)
class BuiltInstance:
    instance: Instance
    descriptor: ModelDescriptor
    popularity: Optional[PopularityModel] = None
    gaussian: Optional[GaussianModel] = None
    master: Optional[MasterListModel] = None

    @property
    def model(self):
        return self.popularity or self.gaussian or self.master


class GenerateResponse(BaseModel):
    descriptor: ModelDescriptor
    instance: Instance
