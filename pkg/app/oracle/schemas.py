"""
Oracle Schemas
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Literal, Optional

from pydantic import BaseModel, Field

from app.core.schemas import Instance, Matching, Side
from app.core.service import standing


@dataclass(frozen=True)
class StableSet:
    """Every stable matching of one instance, found by exhaustive search."""

    instance: Instance
    matchings: tuple[Matching, ...]

    @cached_property
    def stable_pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset(pair for mu in self.matchings for pair in mu.pairs())

    def partners(self, side: Side, person: int) -> list[int]:
        """Stable partners of one person, most preferred first."""
        if side is Side.MAN:
            found = {w for m, w in self.stable_pairs if m == person}
        else:
            found = {m for m, w in self.stable_pairs if w == person}
        ranks = self.instance.ranks(side)[person]
        return sorted(found, key=ranks.__getitem__)

    def partner_count(self, side: Side, person: int) -> int:
        return len(self.partners(side, person))

    def best(self, side: Side, person: int) -> Optional[int]:
        found = self.partners(side, person)
        return found[0] if found else None

    def worst(self, side: Side, person: int) -> Optional[int]:
        found = self.partners(side, person)
        return found[-1] if found else None

    def optimal(self, side: Side) -> Matching:
        """The member every person of `side` likes at least as much as any other."""
        lists = self.instance.lists(side)
        ranks = self.instance.ranks(side)

        def total(mu: Matching) -> int:
            return sum(
                standing(ranks[p], len(lists[p]), q) for p, q in enumerate(mu.partners(side))
            )

        return min(self.matchings, key=total)

    def matched(self, side: Side) -> frozenset[int]:
        """Persons matched in the first member; the same set for every member."""
        return self.matchings[0].matched(side)


class StableSetExport(BaseModel):
    format: Literal[1] = 1
    M: int
    W: int
    matchings: list[Matching]
    count: int
    stable_pairs: list[tuple[int, int]]
    stable_pair_count: int
    multiplicity_fraction: float
    men_partner_counts: list[int]
    women_partner_counts: list[int]


class StableSetRequest(BaseModel):
    instance: Instance
    guard: Optional[int] = Field(None, ge=1)
