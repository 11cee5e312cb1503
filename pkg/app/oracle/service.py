"""
Oracle Service

Exhaustive search over all matchings of a small instance. Men are assigned in
index order; a partial assignment is dropped as soon as two persons whose
partner is already final form a blocking pair, so no stable matching is lost.
"""

import logging
from typing import Optional

from app.config import settings
from app.core.schemas import Instance, Matching, Side
from app.core.service import is_blocking_pair, is_stable, require_valid
from app.oracle.schemas import StableSet, StableSetExport
from app.shared.errors import OracleGuardExceeded

logger = logging.getLogger(__name__)


def enumerate_all_stable(inst: Instance, guard: Optional[int] = None) -> StableSet:
    guard = settings.oracle_guard if guard is None else guard
    if inst.N > guard:
        raise OracleGuardExceeded(
            f"Oracle refuses instances with min(M, W) = {inst.N} > guard {guard}",
            details="raise --guard to search anyway",
        )

    wife: list[Optional[int]] = [None] * inst.M
    husband: list[Optional[int]] = [None] * inst.W
    found: list[Matching] = []

    def blocks_decided(m: int) -> bool:
        # man m just became final; so did his wife, if any
        mu = Matching.from_wives(wife[: m + 1] + [None] * (inst.M - m - 1), inst.W)
        for w in range(inst.W):
            if husband[w] is not None and is_blocking_pair(inst, mu, m, w):
                return True
        w = wife[m]
        if w is not None:
            for other in range(m):
                if is_blocking_pair(inst, mu, other, w):
                    return True
        return False

    def assign(m: int) -> None:
        if m == inst.M:
            mu = Matching.from_wives(wife, inst.W)
            if is_stable(inst, mu):
                found.append(mu)
            return
        options = [w for w in inst.men[m] if husband[w] is None and m in inst.women_ranks[w]]
        for w in options + [None]:
            wife[m] = w
            if w is not None:
                husband[w] = m
            if not blocks_decided(m):
                assign(m + 1)
            if w is not None:
                husband[w] = None
            wife[m] = None

    assign(0)
    logger.debug(f"Oracle found {len(found)} stable matching(s) for M={inst.M}, W={inst.W}")
    return StableSet(instance=inst, matchings=tuple(found))


def count_stable_pairs(ss: StableSet) -> int:
    return len(ss.stable_pairs)


def multiplicity_fraction(ss: StableSet) -> float:
    """Share of all M + W persons with at least two stable partners."""
    inst = ss.instance
    total = inst.M + inst.W
    if not total:
        return 0.0
    multiple = sum(
        1
        for side in (Side.MAN, Side.WOMAN)
        for p in range(inst.size(side))
        if ss.partner_count(side, p) >= 2
    )
    return multiple / total


def export_stable_set(ss: StableSet) -> StableSetExport:
    inst = ss.instance
    return StableSetExport(
        M=inst.M,
        W=inst.W,
        matchings=list(ss.matchings),
        count=len(ss.matchings),
        stable_pairs=sorted(ss.stable_pairs),
        stable_pair_count=count_stable_pairs(ss),
        multiplicity_fraction=multiplicity_fraction(ss),
        men_partner_counts=[ss.partner_count(Side.MAN, m) for m in range(inst.M)],
        women_partner_counts=[ss.partner_count(Side.WOMAN, w) for w in range(inst.W)],
    )


# ---------------------------------------------------------
# Service
# ---------------------------------------------------------
class OracleService:
    def stable_set(self, inst: Instance, guard: Optional[int] = None) -> StableSetExport:
        """Every stable matching of a valid instance, refusing sizes above the guard."""
        export = export_stable_set(enumerate_all_stable(require_valid(inst), guard))
        logger.info(f"Oracle found {export.count} stable matching(s) for {inst.M}x{inst.W}")
        return export


oracle_service = OracleService()
