"""
Deferred Acceptance Service

Men-proposing deferred acceptance, its women-proposing dual, and the extended
run that walks one woman through all of her stable husbands.
"""

import heapq
import logging
from typing import Literal, Mapping, Optional

import numpy as np

from app.algorithms.schemas import (
    Answer, BlockReport, Halt, HusbandEnumeration, ProposalRecord, TraceEntry,
)
from app.core.schemas import Instance, Matching, Side, SolveResult
from app.core.service import core_service
from app.prefgen.schemas import LogWeights
from app.prefgen.service import prefgen_service, sample_popularity_order
from app.shared.errors import IndexOutOfRangeError, ModelParameterError
from app.shared.seeding import WOMEN, SeedStream

logger = logging.getLogger(__name__)

Schedule = Literal["lowest", "highest"]


class _ProposalState:
    """Mutable engagement state shared by the initial run and the extended phase."""

    def __init__(self, inst: Instance, record: bool = True):
        self.inst = inst
        self.record = record
        self.men = inst.men
        self.women_ranks = inst.women_ranks
        self.next_choice = [0] * inst.M
        self.wife: list[Optional[int]] = [None] * inst.M
        self.husband: list[Optional[int]] = [None] * inst.W
        self.ever_matched = [False] * inst.W
        self.received: list[list[int]] = [[] for _ in range(inst.W)]
        self.trace: list[ProposalRecord] = []

    def peek(self, m: int) -> Optional[int]:
        """Next woman m would propose to, or None once his list is exhausted."""
        order = self.men[m]
        return order[self.next_choice[m]] if self.next_choice[m] < len(order) else None

    def propose(self, m: int) -> tuple[Answer, Optional[int]]:
        """m proposes to his next woman; returns her answer and any displaced husband."""
        w = self.peek(m)
        self.next_choice[m] += 1
        self.received[w].append(m)

        ranks = self.women_ranks[w]
        current = self.husband[w]
        if m not in ranks:
            answer, displaced = Answer.REJECTED, None
        elif current is None:
            answer, displaced = Answer.ACCEPTED, None
        elif ranks[m] < ranks[current]:
            answer, displaced = Answer.DISPLACED, current
        else:
            answer, displaced = Answer.REJECTED, None

        if answer is not Answer.REJECTED:
            self.husband[w] = m
            self.wife[m] = w
            self.ever_matched[w] = True
            if displaced is not None:
                self.wife[displaced] = None
        if self.record:
            self.trace.append(ProposalRecord(m, w, answer))
        return answer, displaced

    def release(self, w: int) -> Optional[int]:
        m = self.husband[w]
        if m is not None:
            self.husband[w] = None
            self.wife[m] = None
        return m

    def matching(self) -> Matching:
        return Matching.from_wives(self.wife, self.inst.W)


def _run(inst: Instance, schedule: Schedule = "lowest", record: bool = True) -> _ProposalState:
    if schedule not in ("lowest", "highest"):
        raise ModelParameterError(f"unknown proposal schedule '{schedule}'")
    sign = 1 if schedule == "lowest" else -1
    state = _ProposalState(inst, record)
    free = [sign * m for m in range(inst.M) if inst.men[m]]
    heapq.heapify(free)

    while free:
        m = sign * free[0]
        answer, displaced = state.propose(m)
        if answer is not Answer.REJECTED:
            heapq.heappop(free)
        elif state.peek(m) is None:
            heapq.heappop(free)
        if displaced is not None and state.peek(displaced) is not None:
            heapq.heappush(free, sign * displaced)
    return state


# ---------------------------------------------------------
# Deferred acceptance
# ---------------------------------------------------------
def mpda(inst: Instance, schedule: Schedule = "lowest") -> tuple[Matching, list[ProposalRecord]]:
    """Man-optimal stable matching and the full proposal trace.

    The single man with the lowest index moves next ("highest" reverses that);
    the resulting matching does not depend on the schedule.
    """
    state = _run(inst, schedule)
    return state.matching(), state.trace


def wpda(inst: Instance) -> Matching:
    """Woman-optimal stable matching: men-proposing on the transposed instance."""
    return _run(inst.transpose(), record=False).matching().transpose()


def solve(inst: Instance, side: Side) -> Matching:
    return _run(inst, record=False).matching() if side is Side.MAN else wpda(inst)


# ---------------------------------------------------------
# Stable husbands of one woman
# ---------------------------------------------------------
def enumerate_stable_husbands(
    inst: Instance,
    woman: int,
    weights: Optional[LogWeights] = None,
    rng: Optional[np.random.Generator] = None,
) -> HusbandEnumeration:
    """Every stable husband of `woman`, from mu_M(woman) up to mu_W(woman).

    With popularity weights her whole list is drawn from them first and used in
    both phases; her acceptable set becomes the support of the weights.
    """
    if not 0 <= woman < inst.W:
        raise IndexOutOfRangeError(f"Woman index {woman} out of range (W={inst.W})")

    order = None
    if weights is not None:
        stray = [int(c) for c in weights.candidates if not 0 <= c < inst.M]
        if stray:
            raise ModelParameterError(
                f"Popularity weights name men outside 0..{inst.M - 1}: {stray}",
                details=f"the instance has M={inst.M} men",
            )
        if rng is None:
            raise ModelParameterError("popularity weights need a random generator")
        order = sample_popularity_order(weights, rng)
        inst = inst.with_list(Side.WOMAN, woman, order)

    state = _run(inst, record=False)
    ranks = inst.women_ranks[woman]
    initial = [m for m in state.received[woman] if m in ranks]
    x0 = state.husband[woman]
    result = HusbandEnumeration(woman=woman, initial_proposers=initial, order=list(order) if order else None)
    if weights is not None:
        result.initial_log_weights = [weights.log_weight_of(m) for m in initial]
    if x0 is None:
        return result

    proposals, halt = _reject_all(state, woman)

    # Phase 2: best-so-far proposals are exactly the stable husbands
    husbands = []
    best = None
    for m in proposals:
        rank = ranks.get(m)
        if rank is None:
            continue
        if best is None or rank < best:
            husbands.append(m)
            best = rank

    result.husbands = husbands
    result.proposals = proposals
    result.halt = halt
    if weights is not None:
        result.proposal_log_weights = [weights.log_weight_of(m) for m in proposals]
    logger.debug(f"Woman {woman}: {len(husbands)} stable husband(s) from {len(proposals)} proposal(s)")
    return result


def _reject_all(state: _ProposalState, woman: int) -> tuple[list[int], Halt]:
    """Phase 1: `woman` turns down everyone, including her current husband.

    Only the rejection chain moves, so this loop keeps to local lists and
    leaves the trace alone. `pending` counts men who still have her ahead of
    their next choice; at zero no further proposal can reach her.
    """
    men, women_ranks = state.men, state.women_ranks
    next_choice, husband = state.next_choice, state.husband
    pending = sum(woman in order[next_choice[m]:] for m, order in enumerate(men))

    proposals = [husband[woman]]
    proposer = state.release(woman)
    while True:
        order = men[proposer]
        k = next_choice[proposer]
        if k >= len(order):
            return proposals, Halt.EXHAUSTED
        if pending == 0:
            return proposals, Halt.SETTLED
        w = order[k]
        if w == woman:
            next_choice[proposer] = k + 1
            proposals.append(proposer)
            pending -= 1
            continue
        rank = women_ranks[w].get(proposer)
        if rank is None:
            next_choice[proposer] = k + 1
            continue
        # every other woman keeps a husband once she has held one
        current = husband[w]
        if current is None:
            return proposals, Halt.NEVER_MATCHED
        next_choice[proposer] = k + 1
        if rank < women_ranks[w][current]:
            husband[w] = proposer
            proposer = current


# ---------------------------------------------------------
# Service
# ---------------------------------------------------------
class AlgorithmsService:
    """Deferred acceptance, husband enumeration and blocks for the routers and the CLI."""

    def solve(self, inst: Instance, side: Side) -> SolveResult:
        inst = core_service.require_valid(inst)
        return core_service.describe(inst, solve(inst, side), side)

    def trace(self, inst: Instance) -> list[TraceEntry]:
        _, records = mpda(core_service.require_valid(inst))
        return [TraceEntry.from_record(record) for record in records]

    def husbands(
        self,
        inst: Instance,
        woman: int,
        weights: Optional[Mapping[int, float]] = None,
        seed: Optional[int] = None,
    ) -> HusbandEnumeration:
        """With weights, her list is drawn from the seed's stream for her, trial 0."""
        inst = core_service.require_valid(inst)
        if weights is None:
            return enumerate_stable_husbands(inst, woman)
        if seed is None:
            raise ModelParameterError("popularity weights need a seed")
        rng = SeedStream(seed).trial(0).person(WOMEN, woman)
        return enumerate_stable_husbands(inst, woman, prefgen_service.weights(weights), rng)

    def blocks(self, inst: Instance) -> BlockReport:
        from app.algorithms.blocks import block_report

        return block_report(core_service.require_valid(inst))


algorithms_service = AlgorithmsService()
