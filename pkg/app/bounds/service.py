"""
Bound Evaluators

Closed forms for every bound and exact expectation the simulations are checked
against. Popularity arithmetic stays in log-space: ratios are log differences.
"""

import logging
import math
from typing import Sequence

import numpy as np
from scipy.special import expit, logsumexp

from app.bounds.schemas import JumpDistribution, UkSequence, XProcessSample
from app.config import settings
from app.shared.errors import BoundDomainError

logger = logging.getLogger(__name__)

# log-space residue below which Q_W counts as exactly 1
LOG_Q_W_FLOOR = 1e-12


def _moments(u: UkSequence) -> tuple[float, float]:
    s1, s2 = u.first_moment(), u.second_moment()
    if not (math.isfinite(s1) and math.isfinite(s2)):
        raise BoundDomainError("sum of k u_k or k^2 u_k diverges")
    return s1, s2


def _exp(value: float) -> float:
    try:
        return math.exp(value)
    except OverflowError:
        raise BoundDomainError(f"exp({value}) overflows; the u_k sums are too large")


# ---------------------------------------------------------
# Rank gap and the dominating jump process
# ---------------------------------------------------------
def thm1_bound(u: UkSequence) -> float:
    """(1 + 2 exp(sum k u_k)) * sum k^2 u_k"""
    s1, s2 = _moments(u)
    return (1 + 2 * _exp(s1)) * s2


def meandomination_bound(u: UkSequence) -> float:
    """exp(sum k u_k) * sum k^2 u_k"""
    s1, s2 = _moments(u)
    return _exp(s1) * s2


def gaussian_uk_sequence(sigma: float) -> UkSequence:
    """u_k = 2 exp(-(k / 2 sigma)^2), truncated once a term drops below 1e-300."""
    if not sigma > 0:
        raise BoundDomainError(f"sigma must be positive, got {sigma}")
    values = []
    k = 1
    while True:
        value = 2 * math.exp(-((k / (2 * sigma)) ** 2))
        if value < 1e-300:
            break
        values.append(value)
        k += 1
    return UkSequence.finite(values)


def gaussian_thm1_closed_form(sigma: float) -> float:
    """4 sqrt(pi) sigma^3 (1 + 2 e^{4 sigma^2})"""
    if not sigma > 0:
        raise BoundDomainError(f"sigma must be positive, got {sigma}")
    return 4 * math.sqrt(math.pi) * sigma**3 * (1 + 2 * _exp(4 * sigma**2))


def jump_distribution(u: UkSequence, cutoff: float | None = None) -> JumpDistribution:
    """Tabulate P[delta <= d] for d = 0, 1, ... until the CDF passes 1 - cutoff."""
    cutoff = settings.tail_cutoff if cutoff is None else cutoff
    _moments(u)
    cdf = []
    d = 0
    while True:
        value = math.exp(-u.tail_first_moment(d + 1))
        if value > 1 - cutoff:
            cdf.append(1.0)
            break
        cdf.append(value)
        d += 1
    return JumpDistribution(cdf=np.array(cdf))


def sample_X(
    u: UkSequence, rng: np.random.Generator, jumps: JumpDistribution | None = None,
) -> XProcessSample:
    """Sum i.i.d. jumps until the first zero jump."""
    jumps = jumps or jump_distribution(u)
    deltas = []
    while True:
        delta = jumps.draw(rng)
        deltas.append(delta)
        if delta == 0:
            break
    return XProcessSample(x=sum(deltas), T=len(deltas) - 1, deltas=tuple(deltas))


# ---------------------------------------------------------
# Number of stable partners
# ---------------------------------------------------------
def thm3_rhs(d_w: int, ln_ratio_mean: float) -> float:
    """1 + ln d_w + E[ln D_w(mu_W(w)) / D_w(mu_M(w))]"""
    if d_w < 1:
        raise BoundDomainError(f"d_w must be at least 1, got {d_w}")
    return 1 + math.log(d_w) + ln_ratio_mean


def cor1_bound(N: int) -> float:
    """N (1 + ln N)"""
    if N < 1:
        raise BoundDomainError(f"N must be at least 1, got {N}")
    return N * (1 + math.log(N))


def folklore_exact_expectation(N: int, base: float) -> float:
    """sum_{i=1..N} (1 - lambda) / (1 - lambda^(N - i + 1)), with 1 - lambda^k as -expm1(k ln lambda)."""
    if N < 1:
        raise BoundDomainError(f"N must be at least 1, got {N}")
    if not 0 < base < 1:
        raise BoundDomainError(f"lambda must lie in (0, 1), got {base}")
    log_base = math.log(base)
    numerator = math.expm1(log_base)
    return math.fsum(numerator / math.expm1(k * log_base) for k in range(1, N + 1))


def thm5_log_bound(N: int, R_M: float, Q_W: float) -> float:
    """ln of (N^5 Q_W)^(1 + 4 ln N (1 + log2 N) / ln(1 + 1/R_M)); the bound itself overflows."""
    if R_M < 1 or Q_W < 1:
        raise BoundDomainError(f"R_M and Q_W must be at least 1, got ({R_M}, {Q_W})")
    return thm5_log_bound_from_logs(N, math.log(R_M), math.log(Q_W))


def thm5_log_bound_from_logs(N: int, log_R_M: float, log_Q_W: float) -> float:
    if N < 2:
        raise BoundDomainError(f"N must be at least 2, got {N}")
    if log_R_M < 0 or log_Q_W < 0:
        raise BoundDomainError("R_M and Q_W must be at least 1")
    denominator = math.log1p(math.exp(-log_R_M)) if math.isfinite(log_R_M) else 0.0
    if denominator == 0.0:
        return math.inf
    ln_n = math.log(N)
    exponent = 1 + 4 * ln_n * (1 + math.log2(N)) / denominator
    return (5 * ln_n + log_Q_W) * exponent


def cor2_bound(N: int, R_M: float, Q_W: float, c: float | None = None) -> float:
    """c * ln Q_W / ln(1 + 1/R_M) * ln^3 N, with the hidden constant c exposed."""
    c = settings.cor2_constant if c is None else c
    if N < 1 or R_M < 1 or Q_W < 1:
        raise BoundDomainError(f"need N >= 1, R_M >= 1, Q_W >= 1, got ({N}, {R_M}, {Q_W})")
    return c * math.log(Q_W) / math.log1p(1 / R_M) * math.log(N) ** 3


def cor2_report_scale(N: int, log_R_M: float, log_Q_W: float) -> tuple[float, bool]:
    """
    Divisor for the per-woman husband ratio: (ln Q_W / ln(1 + 1/R_M)) ln^3 N with
    no constant. Q_W = 1 makes it vanish, so 1 + ln N stands in; the flag says so.
    """
    if N < 2:
        raise BoundDomainError(f"N must be at least 2, got {N}")
    if log_R_M < 0 or log_Q_W < 0:
        raise BoundDomainError("R_M and Q_W must be at least 1")
    if log_Q_W <= LOG_Q_W_FLOOR:
        return 1 + math.log(N), True
    denominator = math.log1p(math.exp(-log_R_M)) if math.isfinite(log_R_M) else 0.0
    if denominator == 0.0:
        return math.inf, False
    return log_Q_W / denominator * math.log(N) ** 3, False


def thm6_bound(N: int, d_women: Sequence[int], log_r_men: Sequence[float]) -> float:
    """N + sum ln d_w + sum ln r_m (ratios passed already in log form)."""
    if any(d < 1 for d in d_women) or any(lr < 0 for lr in log_r_men):
        raise BoundDomainError("need every d_w >= 1 and every r_m >= 1")
    return N + math.fsum(math.log(d) for d in d_women) + math.fsum(log_r_men)


def thm7_bound(N: int, log_r: float, d_women: Sequence[int], d_men: Sequence[int]) -> float:
    """N (1 + ln r) + sum ln d_w / 2 + sum ln d_m / 2"""
    if log_r < 0 or any(d < 1 for d in d_women) or any(d < 1 for d in d_men):
        raise BoundDomainError("need r >= 1 and every list length >= 1")
    return (
        N * (1 + log_r)
        + math.fsum(math.log(d) for d in d_women) / 2
        + math.fsum(math.log(d) for d in d_men) / 2
    )


# ---------------------------------------------------------
# Phase-2 acceptances of the husband enumeration
# ---------------------------------------------------------
def acceptance_probability(p_new: float, p_prior_sum: float) -> float:
    """p_new / (p_new + p_prior_sum)"""
    if not (p_new > 0 and p_prior_sum > 0):
        raise BoundDomainError("weights must be positive")
    return acceptance_probability_log(math.log(p_new), math.log(p_prior_sum))


def acceptance_probability_log(log_p_new: float, log_p_prior_sum: float) -> float:
    return float(expit(log_p_new - log_p_prior_sum))


def exact_phase2_expectation(log_p_bot: float, log_proposals: Sequence[float]) -> float:
    """sum_i p_i / (p_bot + p_1 + ... + p_i): expected number of accepted proposals."""
    if not log_proposals:
        return 0.0
    logs = np.asarray(log_proposals, dtype=np.float64)
    running = np.logaddexp.accumulate(np.concatenate(([log_p_bot], logs)))[1:]
    return float(np.sum(np.exp(logs - running)))


def lemma_prel_bound(log_proposals: Sequence[float], log_initial: float) -> float:
    """ln|L_w| + ln max_{m in L_w} D_w(m) / D_w(mu_M(w))"""
    if len(log_proposals) == 0:
        raise BoundDomainError("proposal list L_w is empty")
    return math.log(len(log_proposals)) + float(np.max(log_proposals)) - log_initial


def prel_corrected_bound(log_proposals: Sequence[float], log_initial: float) -> float:
    """ln(1 + |L_w| R): what the sum-integral chain actually gives before dropping the 1."""
    return float(np.logaddexp(0.0, lemma_prel_bound(log_proposals, log_initial)))


def prel_integral_bound(log_p_bot: float, log_proposals: Sequence[float]) -> float:
    """ln(p_bot + sum p_i) - ln p_bot"""
    return float(logsumexp(np.concatenate(([log_p_bot], np.asarray(log_proposals, dtype=np.float64))))) - log_p_bot


# ---------------------------------------------------------
# Descriptive asymptotics for uniform markets
# ---------------------------------------------------------
def uniform_expected_husbands(N: int) -> float:
    """~ ln N stable husbands per woman; descriptive only."""
    return math.log(N)


def uniform_expected_matchings(N: int) -> float:
    """~ e^{-1} N ln N stable matchings; descriptive only."""
    return math.exp(-1) * N * math.log(N)


# ---------------------------------------------------------
# Service
# ---------------------------------------------------------
class BoundsService:
    """Bound values as the experiment reports quote them."""

    def cor2_ratio(self, N: int, log_R_M: float, log_Q_W: float, husbands: float) -> dict:
        scale, fallback = cor2_report_scale(N, log_R_M, log_Q_W)
        if fallback:
            logger.debug(f"Q_W = 1 at N={N}; quoting husbands against 1 + ln N")
        return {"cor2_scale": scale, "cor2_ratio": husbands / scale, "cor2_fallback": fallback}

    def folklore(self, N: int, base: float) -> dict:
        """Exact expected husbands of w_0 in the cyclic instance, and its (1 - lambda) N floor."""
        return {"exact": folklore_exact_expectation(N, base), "floor": (1 - base) * N}


bounds_service = BoundsService()
