"""
Blocks of the man-optimal matching.

Indices are relabeled so that w_i is the wife of m_i in the man-optimal matching;
relabeled index i is therefore man i. A prefix separator t means no woman among
w_0..w_{t-1} prefers any of m_t, m_{t+1}, ... to her husband.
"""

import logging

import numpy as np

from app.algorithms.schemas import Block, BlockReport, RankGapComponents
from app.algorithms.service import mpda
from app.core.schemas import Instance, Matching
from app.shared.errors import IndexOutOfRangeError, InvalidInstanceError

logger = logging.getLogger(__name__)


def augment_virtual_women(inst: Instance) -> Instance:
    """Give every man a private woman W + m at the bottom of his list, acceptable only to him."""
    men = tuple(order + (inst.W + m,) for m, order in enumerate(inst.men))
    women = inst.women + tuple((m,) for m in range(inst.M))
    return Instance(men=men, women=women)


def _check_all_matched(mu: Matching) -> None:
    single = [m for m, w in enumerate(mu.men) if w is None]
    if single:
        raise InvalidInstanceError(
            f"{len(single)} man/men single in the matching; augment with virtual women first",
        )


def _reach(inst: Instance, mu: Matching) -> np.ndarray:
    """reach[i]: largest j such that w_i prefers m_j to m_i, or -1."""
    reach = np.full(inst.M, -1, dtype=np.int64)
    for i, w in enumerate(mu.men):
        rank = inst.women_ranks[w][i]
        if rank:
            reach[i] = max(inst.women[w][:rank])
    return reach


def compute_block(inst: Instance, mu_M: Matching, n: int) -> Block:
    """The block holding relabeled index n, by a greedy left scan then a right scan."""
    _check_all_matched(mu_M)
    if not 0 <= n < inst.M:
        raise IndexOutOfRangeError(f"Index {n} out of range (matched pairs={inst.M})")
    reach = _reach(inst, mu_M)

    l = n
    while True:
        crossing = np.flatnonzero(reach[:l] >= l)
        if not crossing.size:
            break
        l = int(crossing[0])

    r = n + 1
    while True:
        furthest = int(reach[:r].max()) + 1
        if furthest <= r:
            break
        r = furthest
    return Block(l, r)


def separators(inst: Instance, mu_M: Matching) -> list[int]:
    _check_all_matched(mu_M)
    reach = _reach(inst, mu_M)
    prefix_reach = np.maximum.accumulate(reach)
    return [0] + [t for t in range(1, inst.M + 1) if prefix_reach[t - 1] < t]


def block_decomposition(inst: Instance, mu_M: Matching) -> list[Block]:
    cuts = separators(inst, mu_M)
    return [Block(l, r) for l, r in zip(cuts, cuts[1:])]


def rank_gap_components(inst: Instance, mu_M: Matching, n: int) -> RankGapComponents:
    """x and the block span around w_n; their sum bounds her stable rank gap."""
    block = compute_block(inst, mu_M, n)
    w = mu_M.men[n]
    x = 0
    seen_outside = False
    for m in inst.women[w]:
        if m == n:
            break
        if m >= block.l:
            seen_outside = True
        elif seen_outside:
            x += 1
    return RankGapComponents(x=x, block_span=block.span, l=block.l, r=block.r)


def block_report(inst: Instance) -> BlockReport:
    """Separators of the virtual-woman augmentation, flagging men whose wife is virtual."""
    augmented = augment_virtual_women(inst)
    mu, _ = mpda(augmented)
    relabel = [int(w) for w in mu.men]
    return BlockReport(
        separators=separators(augmented, mu),
        relabel=relabel,
        virtual=[i for i, w in enumerate(relabel) if w >= inst.W],
    )
