"""
Bound Schemas: u_k sequences and samples of the dominating jump process
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from app.shared.errors import BoundDomainError


@dataclass(frozen=True)
class UkSequence:
    """u_1, u_2, ... either as a finite vector (zero beyond it) or as u_k = a * rho^k."""

    values: tuple[float, ...] = ()
    geometric: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if any(not math.isfinite(u) or u < 0 for u in self.values):
            raise BoundDomainError("u_k must be finite and non-negative")
        if self.geometric is not None:
            if self.values:
                raise BoundDomainError("give either a finite vector or a geometric descriptor, not both")
            a, rho = self.geometric
            if a < 0 or not 0 <= rho < 1:
                raise BoundDomainError(f"geometric tail needs a >= 0 and 0 <= rho < 1, got ({a}, {rho})")

    @classmethod
    def finite(cls, values) -> "UkSequence":
        return cls(values=tuple(float(u) for u in values))

    @classmethod
    def geometric_tail(cls, a: float, rho: float) -> "UkSequence":
        return cls(geometric=(float(a), float(rho)))

    @property
    def is_zero(self) -> bool:
        if self.geometric is not None:
            return self.geometric[0] == 0 or self.geometric[1] == 0
        return all(u == 0 for u in self.values)

    def value(self, k: int) -> float:
        if k < 1:
            raise BoundDomainError("u_k is defined for k >= 1")
        if self.geometric is not None:
            a, rho = self.geometric
            return a * rho**k
        return self.values[k - 1] if k <= len(self.values) else 0.0

    def first_moment(self) -> float:
        """sum_k k u_k"""
        return self.tail_first_moment(1)

    def second_moment(self) -> float:
        """sum_k k^2 u_k"""
        if self.geometric is not None:
            a, rho = self.geometric
            return a * rho * (1 + rho) / (1 - rho) ** 3
        return math.fsum(k * k * u for k, u in enumerate(self.values, start=1))

    def tail_first_moment(self, delta: int) -> float:
        """sum_{k >= delta} k u_k"""
        delta = max(delta, 1)
        if self.geometric is not None:
            a, rho = self.geometric
            if rho == 0:
                return 0.0
            return a * rho**delta * (delta - (delta - 1) * rho) / (1 - rho) ** 2
        return math.fsum(k * u for k, u in enumerate(self.values, start=1) if k >= delta)


@dataclass(frozen=True, eq=False)
class JumpDistribution:
    """Tabulated CDF of one jump: P[delta < d] = exp(-sum_{k >= d} k u_k)."""

    cdf: np.ndarray

    def draw(self, rng: np.random.Generator) -> int:
        return int(np.searchsorted(self.cdf, rng.random(), side="left"))


@dataclass(frozen=True)
class XProcessSample:
    x: int
    T: int
    deltas: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.deltas:
            assert self.deltas[-1] == 0 and all(d > 0 for d in self.deltas[:-1])
            assert self.x == sum(self.deltas) and self.T == len(self.deltas) - 1
