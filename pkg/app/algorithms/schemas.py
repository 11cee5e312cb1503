"""
Algorithm Schemas: proposal traces, husband enumerations and blocks
"""

from enum import Enum
from typing import Literal, NamedTuple, Optional

from pydantic import BaseModel, Field

from app.core.schemas import Instance


class Answer(str, Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    DISPLACED = "displaced"  # accepted, and the prior husband was sent away


class ProposalRecord(NamedTuple):
    proposer: int
    target: int
    answer: Answer


class TraceEntry(BaseModel):
    proposer: int
    target: int
    answer: Answer

    @classmethod
    def from_record(cls, record: ProposalRecord) -> "TraceEntry":
        return cls(proposer=record.proposer, target=record.target, answer=record.answer)


class Halt(str, Enum):
    UNMATCHED = "unmatched"          # w* single after the initial run
    NEVER_MATCHED = "never-matched"  # a proposal reached a woman who never held anyone
    EXHAUSTED = "exhausted"          # the proposer ran out of women
    SETTLED = "settled"              # no man left with her still ahead on his list


class HusbandEnumeration(BaseModel):
    """Stable husbands of one woman, worst first, with the proposal sequence that produced them."""

    format: Literal[1] = 1
    woman: int
    husbands: list[int] = Field(default_factory=list)
    proposals: list[int] = Field(default_factory=list, description="x_0 = mu_M(w) followed by x_1..x_K")
    initial_proposers: list[int] = Field(
        default_factory=list, description="men who proposed to her during the initial run, in order",
    )
    halt: Halt = Halt.UNMATCHED
    order: Optional[list[int]] = Field(None, description="her list, when sampled from popularity weights")
    proposal_log_weights: Optional[list[Optional[float]]] = None
    initial_log_weights: Optional[list[float]] = None

    @property
    def count(self) -> int:
        return len(self.husbands)

    @property
    def best(self) -> Optional[int]:
        return self.husbands[-1] if self.husbands else None

    @property
    def worst(self) -> Optional[int]:
        return self.husbands[0] if self.husbands else None


# ---------------------------------------------------------
# Blocks
# ---------------------------------------------------------
class Block(NamedTuple):
    """Relabeled indices l..r-1, i.e. the interval (l, r] between two prefix separators."""

    l: int
    r: int

    @property
    def span(self) -> int:
        return self.r - self.l - 1

    @property
    def size(self) -> int:
        return self.r - self.l

    def contains(self, index: int) -> bool:
        return self.l <= index < self.r


class RankGapComponents(NamedTuple):
    x: int
    block_span: int
    l: int
    r: int

    @property
    def bound(self) -> int:
        return self.x + self.block_span


class BlockReport(BaseModel):
    format: Literal[1] = 1
    separators: list[int]
    relabel: list[int] = Field(..., description="relabel[i] = wife of m_i in the augmented man-optimal matching")
    virtual: list[int] = Field(default_factory=list, description="relabeled indices whose wife is virtual")


# ---------------------------------------------------------
# Requests
# ---------------------------------------------------------
class EnumerateRequest(BaseModel):
    instance: Instance
    woman: int = Field(..., ge=0)
    weights: Optional[dict[int, float]] = Field(None, description="popularity weights over her acceptable men")
    seed: Optional[int] = Field(None, ge=0)
