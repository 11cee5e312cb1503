"""
Core Schemas: instances, matchings and validation reports
"""

from enum import Enum
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator


class Side(str, Enum):
    MAN = "man"
    WOMAN = "woman"

    @property
    def other(self) -> "Side":
        return Side.WOMAN if self is Side.MAN else Side.MAN


# ---------------------------------------------------------
# Instance
# ---------------------------------------------------------
class Instance(BaseModel):
    """Per-person ordered acceptable-partner lists, most preferred first, 0-based."""

    model_config = ConfigDict(frozen=True)

    format: Literal[1] = 1
    men: tuple[tuple[int, ...], ...]
    women: tuple[tuple[int, ...], ...]

    _men_ranks: list = PrivateAttr(default_factory=list)
    _women_ranks: list = PrivateAttr(default_factory=list)

    def model_post_init(self, __context) -> None:
        # rank tables: position of each listed partner, looked up on every proposal
        self._men_ranks = [{w: r for r, w in enumerate(order)} for order in self.men]
        self._women_ranks = [{m: r for r, m in enumerate(order)} for order in self.women]

    @property
    def M(self) -> int:
        return len(self.men)

    @property
    def W(self) -> int:
        return len(self.women)

    @property
    def N(self) -> int:
        return min(self.M, self.W)

    def lists(self, side: Side) -> tuple[tuple[int, ...], ...]:
        return self.men if side is Side.MAN else self.women

    def size(self, side: Side) -> int:
        return len(self.lists(side))

    @property
    def men_ranks(self) -> list[dict[int, int]]:
        return self._men_ranks

    @property
    def women_ranks(self) -> list[dict[int, int]]:
        return self._women_ranks

    def ranks(self, side: Side) -> list[dict[int, int]]:
        return self.men_ranks if side is Side.MAN else self.women_ranks

    def transpose(self) -> "Instance":
        """Swap the roles of men and women."""
        return Instance(men=self.women, women=self.men)

    def with_list(self, side: Side, index: int, order: tuple[int, ...]) -> "Instance":
        lists = list(self.lists(side))
        lists[index] = tuple(order)
        if side is Side.MAN:
            return Instance(men=tuple(lists), women=self.women)
        return Instance(men=self.men, women=tuple(lists))


# ---------------------------------------------------------
# Matching
# ---------------------------------------------------------
class Matching(BaseModel):
    """Self-inverse pairing; None marks a single person."""

    model_config = ConfigDict(frozen=True)

    men: tuple[Optional[int], ...]
    women: tuple[Optional[int], ...]

    @model_validator(mode="after")
    def check_self_inverse(self):
        for m, w in enumerate(self.men):
            if w is not None and (not 0 <= w < len(self.women) or self.women[w] != m):
                raise ValueError(f"matching is not self-inverse at man {m}")
        for w, m in enumerate(self.women):
            if m is not None and (not 0 <= m < len(self.men) or self.men[m] != w):
                raise ValueError(f"matching is not self-inverse at woman {w}")
        return self

    @classmethod
    def from_pairs(cls, M: int, W: int, pairs) -> "Matching":
        men: list[Optional[int]] = [None] * M
        women: list[Optional[int]] = [None] * W
        for m, w in pairs:
            men[m] = w
            women[w] = m
        return cls(men=tuple(men), women=tuple(women))

    @classmethod
    def from_wives(cls, wives: list[Optional[int]], W: int) -> "Matching":
        return cls.from_pairs(len(wives), W, ((m, w) for m, w in enumerate(wives) if w is not None))

    @classmethod
    def empty(cls, M: int, W: int) -> "Matching":
        return cls(men=(None,) * M, women=(None,) * W)

    def partners(self, side: Side) -> tuple[Optional[int], ...]:
        return self.men if side is Side.MAN else self.women

    def pairs(self) -> list[tuple[int, int]]:
        return [(m, w) for m, w in enumerate(self.men) if w is not None]

    def matched(self, side: Side) -> frozenset[int]:
        return frozenset(p for p, q in enumerate(self.partners(side)) if q is not None)

    def transpose(self) -> "Matching":
        return Matching(men=self.women, women=self.men)


# ---------------------------------------------------------
# Validation
# ---------------------------------------------------------
class ViolationKind(str, Enum):
    DUPLICATE = "duplicate"
    OUT_OF_RANGE = "out_of_range"


class Violation(BaseModel):
    side: Side
    person: int
    position: int
    value: int
    kind: ViolationKind


class ValidationReport(BaseModel):
    format: Literal[1] = 1
    ok: bool
    violations: list[Violation] = Field(default_factory=list)


# ---------------------------------------------------------
# Solve output
# ---------------------------------------------------------
class SolveResult(BaseModel):
    format: Literal[1] = 1
    side: Side
    matching: Matching
    men_ranks: list[Optional[int]]
    women_ranks: list[Optional[int]]


class SolveRequest(BaseModel):
    instance: Instance
    side: Side = Side.MAN
