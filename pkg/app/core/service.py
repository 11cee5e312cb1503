"""
Core Service: preference ranks, blocking pairs and stability checks
"""

import logging
from typing import Optional, Sequence

from app.core.schemas import (
    Instance, Matching, Side, SolveResult, ValidationReport, Violation, ViolationKind,
)
from app.shared.errors import IndexOutOfRangeError, InvalidInstanceError

logger = logging.getLogger(__name__)


# ---------------------------------------------------------
# Ranks and preference comparisons
# ---------------------------------------------------------
def rank_of(order: Sequence[int], partner: int) -> Optional[int]:
    """0-based position of partner in order; None means NotAcceptable."""
    try:
        return list(order).index(partner)
    except ValueError:
        return None


def standing(ranks: dict[int, int], list_length: int, partner: Optional[int]) -> int:
    """Lower is better: acceptable partners by rank, then Single, then anyone unacceptable."""
    if partner is None:
        return list_length
    rank = ranks.get(partner)
    return list_length + 1 if rank is None else rank


def person_rank(inst: Instance, side: Side, person: int, partner: Optional[int]) -> Optional[int]:
    if partner is None:
        return None
    return inst.ranks(side)[person].get(partner)


def is_blocking_pair(inst: Instance, mu: Matching, m: int, w: int) -> bool:
    if not 0 <= m < inst.M:
        raise IndexOutOfRangeError(f"Man index {m} out of range (M={inst.M})")
    if not 0 <= w < inst.W:
        raise IndexOutOfRangeError(f"Woman index {w} out of range (W={inst.W})")

    w_ranks, m_ranks = inst.women_ranks[w], inst.men_ranks[m]
    w_len, m_len = len(inst.women[w]), len(inst.men[m])
    woman_prefers = standing(w_ranks, w_len, m) < standing(w_ranks, w_len, mu.women[w])
    man_prefers = standing(m_ranks, m_len, w) < standing(m_ranks, m_len, mu.men[m])
    return woman_prefers and man_prefers


def individually_rational(inst: Instance, mu: Matching) -> bool:
    """No matched person holds a partner absent from their own list."""
    for m, w in enumerate(mu.men):
        if w is not None and (w not in inst.men_ranks[m] or m not in inst.women_ranks[w]):
            return False
    return True


def blocking_pairs(inst: Instance, mu: Matching) -> list[tuple[int, int]]:
    """All man-woman blocking pairs. Only women a man ranks above his partner can block."""
    found = []
    for m, order in enumerate(inst.men):
        current = mu.men[m]
        cutoff = inst.men_ranks[m].get(current, len(order)) if current is not None else len(order)
        for w in order[:cutoff]:
            if is_blocking_pair(inst, mu, m, w):
                found.append((m, w))
    return found


def is_stable(inst: Instance, mu: Matching) -> bool:
    if len(mu.men) != inst.M or len(mu.women) != inst.W:
        return False
    return individually_rational(inst, mu) and not blocking_pairs(inst, mu)


def matching_ranks(inst: Instance, mu: Matching, side: Side) -> list[Optional[int]]:
    return [person_rank(inst, side, p, q) for p, q in enumerate(mu.partners(side))]


def solve_result(inst: Instance, mu: Matching, side: Side) -> SolveResult:
    return SolveResult(
        side=side,
        matching=mu,
        men_ranks=matching_ranks(inst, mu, Side.MAN),
        women_ranks=matching_ranks(inst, mu, Side.WOMAN),
    )


# ---------------------------------------------------------
# Validation
# ---------------------------------------------------------
def validate_instance(inst: Instance) -> list[Violation]:
    """Duplicate and out-of-range entries, with their positions. Empty list means ok."""
    violations = []
    for side in (Side.MAN, Side.WOMAN):
        bound = inst.size(side.other)
        for person, order in enumerate(inst.lists(side)):
            if not order or (len(set(order)) == len(order) and min(order) >= 0 and max(order) < bound):
                continue
            seen = set()
            for position, value in enumerate(order):
                if not 0 <= value < bound:
                    violations.append(Violation(
                        side=side, person=person, position=position,
                        value=value, kind=ViolationKind.OUT_OF_RANGE,
                    ))
                elif value in seen:
                    violations.append(Violation(
                        side=side, person=person, position=position,
                        value=value, kind=ViolationKind.DUPLICATE,
                    ))
                seen.add(value)

    if violations:
        logger.info(f"Instance has {len(violations)} violation(s)")
    return violations


def validation_report(inst: Instance) -> ValidationReport:
    violations = validate_instance(inst)
    return ValidationReport(ok=not violations, violations=violations)


def require_valid(inst: Instance) -> Instance:
    """The instance itself, or InvalidInstanceError naming its first violation."""
    violations = validate_instance(inst)
    if violations:
        first = violations[0]
        raise InvalidInstanceError(
            f"Invalid instance: {first.side.value} {first.person} has {first.kind.value} "
            f"entry {first.value} at position {first.position}",
            details=f"{len(violations)} violation(s); run validate for the full list",
        )
    return inst


# ---------------------------------------------------------
# Service
# ---------------------------------------------------------
class CoreService:
    """Validation and matching reports at the edge of the library."""

    def validate(self, inst: Instance) -> ValidationReport:
        report = validation_report(inst)
        if not report.ok:
            logger.info(f"Instance {inst.M}x{inst.W} has {len(report.violations)} violation(s)")
        return report

    def require_valid(self, inst: Instance) -> Instance:
        return require_valid(inst)

    def describe(self, inst: Instance, mu: Matching, side: Side) -> SolveResult:
        """Matching plus every person's rank of their partner."""
        return solve_result(inst, mu, side)

    def is_stable(self, inst: Instance, mu: Matching) -> bool:
        return is_stable(require_valid(inst), mu)


core_service = CoreService()
