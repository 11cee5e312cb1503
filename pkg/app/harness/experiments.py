"""
Experiment catalog.

Each trial function is a pure function of its TrialTask: it derives its own
stream from (seed, point, trial), so rows do not depend on which worker ran them.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Optional

import numpy as np
from scipy.special import logsumexp

from app.algorithms.blocks import (
    augment_virtual_women, block_decomposition, compute_block, rank_gap_components, separators,
)
from app.algorithms.service import enumerate_stable_husbands, solve, wpda
from app.bounds.schemas import UkSequence
from app.bounds.service import (
    bounds_service, cor1_bound, exact_phase2_expectation, gaussian_thm1_closed_form,
    gaussian_uk_sequence, jump_distribution, lemma_prel_bound, meandomination_bound,
    prel_corrected_bound, prel_integral_bound, sample_X, thm1_bound, thm3_rhs, thm5_log_bound_from_logs,
    thm6_bound, thm7_bound, uniform_expected_husbands, uniform_expected_matchings,
)
from app.core.schemas import Instance, Matching, Side
from app.harness.schemas import Aggregate, Check, Verdict
from app.harness.utils import (
    aggregate, exact_check, log_frequency_slope, lower_bound_check, report_only, upper_bound_check,
    zero_check,
)
from app.oracle.service import enumerate_all_stable
from app.prefgen.analytics import (
    compute_idpop_log_ratios, compute_log_RM_QW, compute_symmetry_log_ratio,
)
from app.prefgen.schemas import ModelDescriptor, ModelName, PopularityModel
from app.prefgen.service import (
    build_folklore_cyclic, build_from_descriptor, build_gaussian, build_geometric_popularity,
    build_grouped_incomplete, build_swap_pairs, build_uniform, popularity_model_from_params,
    realize_popularity,
)
from app.shared.seeding import SeedStream, TrialStream

logger = logging.getLogger(__name__)

# relative slack for deterministic floating-point inequalities
EPS = 1e-9


@dataclass(frozen=True)
class TrialTask:
    experiment: str
    params: dict
    n: int
    point: int
    trial: int
    seed: int
    guard: int

    @property
    def stream(self) -> TrialStream:
        return SeedStream(self.seed).trial(self.trial, self.point)

    def descriptor(self, model: ModelName, params: Optional[dict] = None) -> ModelDescriptor:
        return ModelDescriptor(
            model=model, params=params if params is not None else self.params,
            M=self.n, W=self.n, seed=self.seed, trial=self.trial,
        )


@dataclass
class CheckContext:
    params: dict
    sizes: list[int]
    rows: list[dict]
    tolerance: float

    def values(self, n: int, column: str) -> list:
        return [row[column] for row in self.rows if row["n"] == n]

    def agg(self, n: int, column: str) -> Aggregate:
        return aggregate(n, column, self.values(n, column))


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    description: str
    columns: list[str]
    statistic: str
    trial: Callable[[TrialTask], list[dict]]
    checks: Callable[[CheckContext], tuple[list[Check], dict]]
    default_n: list[int]
    default_trials: int
    default_params: dict = field(default_factory=dict)
    aggregate_columns: Optional[list[str]] = None
    trend: Optional[str] = None

    @property
    def aggregated(self) -> list[str]:
        return self.aggregate_columns or [self.statistic]


# ---------------------------------------------------------
# Shared statistics
# ---------------------------------------------------------
def _rank(inst: Instance, side: Side, person: int, partner: int) -> int:
    return inst.ranks(side)[person][partner]


def _optimal_pair(inst: Instance) -> tuple[Matching, Matching]:
    return solve(inst, Side.MAN), wpda(inst)


def _multiple_counts(mu_m: Matching, mu_w: Matching) -> tuple[int, int]:
    """Persons whose best and worst stable partners differ, i.e. who have several."""
    women = sum(1 for a, b in zip(mu_m.women, mu_w.women) if a != b)
    men = sum(1 for a, b in zip(mu_m.men, mu_w.men) if a != b)
    return women, men


def _husbands(inst: Instance, mu_m: Matching, mu_w: Matching, w: int) -> list[int]:
    if mu_m.women[w] is None:
        return []
    if mu_m.women[w] == mu_w.women[w]:
        return [mu_m.women[w]]
    return enumerate_stable_husbands(inst, w).husbands


def _popularity(task: TrialTask) -> tuple[PopularityModel, Instance]:
    model = popularity_model_from_params(task.n, task.n, task.params)
    built = realize_popularity(model, task.stream, task.descriptor(ModelName.POPULARITY))
    return model, built.instance


def _multiplicity_row(task: TrialTask, inst: Instance) -> list[dict]:
    mu_m, mu_w = _optimal_pair(inst)
    women, men = _multiple_counts(mu_m, mu_w)
    return [{
        "n": task.n, "trial": task.trial,
        "multiplicity": (women + men) / (inst.M + inst.W),
        "women_multiple": women, "men_multiple": men,
    }]


def _report_multiplicity(ctx: CheckContext) -> tuple[list[Check], dict]:
    return [report_only("multiplicity", ctx.agg(n, "multiplicity")) for n in ctx.sizes], {}


# ---------------------------------------------------------
# oracle-sweep
# ---------------------------------------------------------
def oracle_sweep_trial(task: TrialTask) -> list[dict]:
    params = dict(task.params)
    model = ModelName(params.pop("model", "uniform"))
    inst = build_from_descriptor(task.descriptor(model, params), task.stream).instance
    ss = enumerate_all_stable(inst, task.guard)
    mu_m, mu_w = _optimal_pair(inst)

    mpda_ok = mu_m in ss.matchings and mu_m == ss.optimal(Side.MAN)
    wpda_ok = mu_w in ss.matchings and mu_w == ss.optimal(Side.WOMAN)
    rural_ok = len({(mu.matched(Side.MAN), mu.matched(Side.WOMAN)) for mu in ss.matchings}) == 1
    husbands_ok = all(
        enumerate_stable_husbands(inst, w).husbands == ss.partners(Side.WOMAN, w)[::-1]
        for w in range(inst.W)
    )

    augmented = augment_virtual_women(inst)
    mu_a = solve(augmented, Side.MAN)
    blocks = block_decomposition(augmented, mu_a)
    block_of = {i: block for block in blocks for i in range(block.l, block.r)}
    blocks_ok = (
        blocks[0].l == 0 and blocks[-1].r == inst.M
        and all(a.r == b.l for a, b in zip(blocks, blocks[1:]))
        and all(compute_block(augmented, mu_a, i) == block_of[i] for i in range(inst.M))
        and all(block_of[mu_m.women[w]].contains(m) for m, w in ss.stable_pairs)
    )
    separators_ok = all(
        len({frozenset(mu.men[:t]) for mu in ss.matchings}) == 1 for t in separators(augmented, mu_a)
    )

    rank_gap_ok = True
    for w in range(inst.W):
        h = mu_m.women[w]
        if h is None:
            continue
        partners = ss.partners(Side.WOMAN, w)
        gap = _rank(inst, Side.WOMAN, w, partners[-1]) - _rank(inst, Side.WOMAN, w, partners[0])
        rank_gap_ok &= gap <= rank_gap_components(augmented, mu_a, h).bound

    flags = {
        "mpda_ok": mpda_ok, "wpda_ok": wpda_ok, "rural_ok": rural_ok, "husbands_ok": husbands_ok,
        "blocks_ok": blocks_ok, "separators_ok": separators_ok, "rank_gap_ok": rank_gap_ok,
    }
    return [{
        "n": task.n, "trial": task.trial,
        "stable_matchings": len(ss.matchings), "stable_pairs": len(ss.stable_pairs),
        **flags, "discrepancies": sum(not ok for ok in flags.values()),
    }]


def oracle_sweep_checks(ctx: CheckContext) -> tuple[list[Check], dict]:
    checks = [
        zero_check("oracle-discrepancies", "discrepancies", sum(ctx.values(n, "discrepancies")), n)
        for n in ctx.sizes
    ]
    if ctx.params.get("model") == ModelName.MASTER.value:
        checks += [
            zero_check(
                "master-unique", "stable_matchings",
                sum(count != 1 for count in ctx.values(n, "stable_matchings")), n,
            )
            for n in ctx.sizes
        ]
    return checks, {}


# ---------------------------------------------------------
# rank-gap
# ---------------------------------------------------------
def _rank_gap_uk(params: dict) -> UkSequence:
    if params["women"] == "gaussian":
        return gaussian_uk_sequence(float(params["sigma"]))
    return UkSequence.geometric_tail(1.0, float(params["lambda"]))


def rank_gap_trial(task: TrialTask) -> list[dict]:
    params = task.params
    if params["women"] == "gaussian":
        sigma = float(params["sigma"])
        desc = task.descriptor(ModelName.GAUSSIAN, {"sigma": sigma})
        inst = build_gaussian(task.n, task.n, sigma, task.stream, desc).instance
    else:
        model = build_geometric_popularity(task.n, task.n, float(params["lambda"]))
        inst = realize_popularity(model, task.stream, task.descriptor(ModelName.POPULARITY)).instance

    mu_m, mu_w = _optimal_pair(inst)
    gaps = [
        _rank(inst, Side.WOMAN, w, mu_m.women[w]) - _rank(inst, Side.WOMAN, w, mu_w.women[w])
        for w in range(inst.W) if mu_m.women[w] is not None
    ]
    return [{
        "n": task.n, "trial": task.trial, "matched": len(gaps),
        "mean_gap": float(np.mean(gaps)) if gaps else 0.0,
        "max_gap": max(gaps, default=0),
    }]


def rank_gap_checks(ctx: CheckContext) -> tuple[list[Check], dict]:
    bound = thm1_bound(_rank_gap_uk(ctx.params))
    checks = [upper_bound_check("rank-gap-bound", ctx.agg(n, "mean_gap"), bound, ctx.tolerance) for n in ctx.sizes]
    notes: dict[str, Any] = {"bound": bound}
    if ctx.params["women"] == "gaussian":
        closed = gaussian_thm1_closed_form(float(ctx.params["sigma"]))
        notes["closed_form_bound"] = closed
        checks += [
            upper_bound_check("rank-gap-closed-form", ctx.agg(n, "mean_gap"), closed, ctx.tolerance)
            for n in ctx.sizes
        ]
    return checks, notes


# ---------------------------------------------------------
# multiplicity and its counterexamples
# ---------------------------------------------------------
def multiplicity_trial(task: TrialTask) -> list[dict]:
    model = build_geometric_popularity(task.n, task.n, float(task.params["lambda"]))
    inst = realize_popularity(model, task.stream, task.descriptor(ModelName.POPULARITY)).instance
    return _multiplicity_row(task, inst)


def swap_trial(task: TrialTask) -> list[dict]:
    return _multiplicity_row(task, build_swap_pairs(task.n, task.stream, task.descriptor(ModelName.SWAP, {})).instance)


def grouped_trial(task: TrialTask) -> list[dict]:
    desc = task.descriptor(ModelName.GROUPED, {})
    return _multiplicity_row(task, build_grouped_incomplete(task.n, task.stream, desc).instance)


# ---------------------------------------------------------
# stable-pairs
# ---------------------------------------------------------
def _stable_pair_bounds(model: PopularityModel, n: int) -> dict[str, float]:
    d = [n] * n
    return {
        "cor1": cor1_bound(n),
        "thm6": thm6_bound(n, d, compute_idpop_log_ratios(model).tolist()),
        "thm7": thm7_bound(n, compute_symmetry_log_ratio(model), d, d),
    }


def stable_pairs_trial(task: TrialTask) -> list[dict]:
    _, inst = _popularity(task)
    mu_m, mu_w = _optimal_pair(inst)
    total = sum(len(_husbands(inst, mu_m, mu_w, w)) for w in range(inst.W))
    return [{"n": task.n, "trial": task.trial, "stable_pairs": total}]


def stable_pairs_checks(ctx: CheckContext) -> tuple[list[Check], dict]:
    checks, notes = [], {}
    for n in ctx.sizes:
        bounds = _stable_pair_bounds(popularity_model_from_params(n, n, ctx.params), n)
        notes[str(n)] = bounds
        agg = ctx.agg(n, "stable_pairs")
        checks += [upper_bound_check(f"stable-pairs-{name}", agg, bound, ctx.tolerance) for name, bound in bounds.items()]
    return checks, notes


# ---------------------------------------------------------
# folklore-lb
# ---------------------------------------------------------
def folklore_trial(task: TrialTask) -> list[dict]:
    base = float(task.params["lambda"])
    desc = task.descriptor(ModelName.FOLKLORE, {"lambda": base})
    inst = build_folklore_cyclic(task.n, base, task.stream, desc).instance
    return [{"n": task.n, "trial": task.trial, "husbands": enumerate_stable_husbands(inst, 0).count}]


def folklore_checks(ctx: CheckContext) -> tuple[list[Check], dict]:
    base = float(ctx.params["lambda"])
    checks, notes = [], {}
    for n in ctx.sizes:
        agg = ctx.agg(n, "husbands")
        notes[str(n)] = expected = bounds_service.folklore(n, base)
        checks.append(exact_check("folklore-exact", agg, expected["exact"], ctx.tolerance))
        checks.append(lower_bound_check("folklore-floor", agg, expected["floor"]))
    return checks, notes


# ---------------------------------------------------------
# x-process
# ---------------------------------------------------------
@lru_cache(maxsize=16)
def _geometric_jumps(a: float, rho: float):
    u = UkSequence.geometric_tail(a, rho)
    return u, jump_distribution(u)


def x_process_trial(task: TrialTask) -> list[dict]:
    u, jumps = _geometric_jumps(float(task.params["a"]), float(task.params["rho"]))
    sample = sample_X(u, task.stream.aux(), jumps)
    return [{
        "n": task.n, "trial": task.trial, "x": sample.x, "T": sample.T,
        "first_jump_zero": sample.deltas[0] == 0,
    }]


def x_process_checks(ctx: CheckContext) -> tuple[list[Check], dict]:
    u = UkSequence.geometric_tail(float(ctx.params["a"]), float(ctx.params["rho"]))
    bound = meandomination_bound(u)
    p_zero = math.exp(-u.first_moment())
    checks = []
    for n in ctx.sizes:
        checks.append(upper_bound_check("x-mean", ctx.agg(n, "x"), bound, ctx.tolerance))
        checks.append(exact_check("x-first-jump-zero", ctx.agg(n, "first_jump_zero"), p_zero, ctx.tolerance))
    return checks, {"meandomination_bound": bound, "p_first_jump_zero": p_zero}


# ---------------------------------------------------------
# block-tail
# ---------------------------------------------------------
def block_tail_trial(task: TrialTask) -> list[dict]:
    model = build_geometric_popularity(task.n, task.n, float(task.params["lambda"]))
    inst = realize_popularity(model, task.stream, task.descriptor(ModelName.POPULARITY)).instance
    augmented = augment_virtual_women(inst)
    mu_a = solve(augmented, Side.MAN)
    return [
        {"n": task.n, "trial": task.trial, "block": index, "size": block.size}
        for index, block in enumerate(block_decomposition(augmented, mu_a))
    ]


def block_tail_checks(ctx: CheckContext) -> tuple[list[Check], dict]:
    checks, notes = [], {}
    for n in ctx.sizes:
        slope = log_frequency_slope(ctx.values(n, "size"))
        notes[str(n)] = {"log_frequency_slope": slope}
        if slope is None:
            checks.append(report_only("block-tail-slope", ctx.agg(n, "size")))
        else:
            agg = ctx.agg(n, "size")
            checks.append(Check(
                name="block-tail-slope", rule="log-frequency slope < 0", n=n, statistic="size",
                mean=agg.mean, se=agg.se, value=slope, bound=0.0,
                verdict=Verdict.PASS if slope < 0 else Verdict.FAIL,
            ))
    return checks, notes


# ---------------------------------------------------------
# thm5-ratio
# ---------------------------------------------------------
def thm5_trial(task: TrialTask) -> list[dict]:
    model, inst = _popularity(task)
    log_R_M, log_Q_W = compute_log_RM_QW(model)
    bound = thm5_log_bound_from_logs(task.n, log_R_M, log_Q_W)
    mu_m, mu_w = _optimal_pair(inst)

    worst = 0.0
    most = 0
    for w in range(inst.W):
        husbands = _husbands(inst, mu_m, mu_w, w)
        most = max(most, len(husbands))
        if len(husbands) > 1:
            logs = [model.women[w].log_weight_of(m) for m in husbands]
            worst = max(worst, max(logs) - min(logs))
    return [{
        "n": task.n, "trial": task.trial, "max_log_ratio": worst,
        "log_bound": bound, "violation": worst > bound,
        "max_husbands": most, **bounds_service.cor2_ratio(task.n, log_R_M, log_Q_W, most),
    }]


def thm5_checks(ctx: CheckContext) -> tuple[list[Check], dict]:
    checks, notes = [], {}
    for n in ctx.sizes:
        violations = ctx.values(n, "violation")
        checks.append(zero_check("thm5-violations", "violation", sum(violations), n))
        checks.append(report_only(
            "thm5-violation-frequency", ctx.agg(n, "max_log_ratio"),
            bound=2 / n**2, value=sum(violations) / len(violations),
        ))
        ratio = ctx.agg(n, "cor2_ratio")
        fallback = any(ctx.values(n, "cor2_fallback"))
        checks.append(report_only("cor2-ratio", ratio, bound=ctx.values(n, "cor2_scale")[0]))
        notes[str(n)] = {"cor2_ratio_mean": ratio.mean, "cor2_fallback": fallback}
    return checks, notes


# ---------------------------------------------------------
# prel-diagnostic
# ---------------------------------------------------------
def prel_trial(task: TrialTask) -> list[dict]:
    model, inst = _popularity(task)
    checked = literal = corrected = integral = 0
    max_excess = -math.inf
    for w in range(inst.W):
        result = enumerate_stable_husbands(inst, w)
        weights = model.women[w]
        later = [weights.log_weight_of(m) for m in result.proposals[1:]]
        later = [lw for lw in later if lw is not None]
        if not later:
            continue
        log_p_bot = float(logsumexp([weights.log_weight_of(m) for m in result.initial_proposers]))
        log_initial = weights.log_weight_of(result.proposals[0])
        exact = exact_phase2_expectation(log_p_bot, later)

        checked += 1
        literal_bound = lemma_prel_bound(later, log_initial)
        max_excess = max(max_excess, exact - literal_bound)
        literal += exact > literal_bound + EPS
        corrected += exact > prel_corrected_bound(later, log_initial) + EPS
        integral += exact > prel_integral_bound(log_p_bot, later) + EPS

    if literal:
        logger.warning(f"Trial {task.trial}: {literal} woman/women exceed ln|L| + ln R")
    return [{
        "n": task.n, "trial": task.trial, "women_checked": checked,
        "literal_violations": literal, "corrected_violations": corrected,
        "integral_violations": integral,
        "max_literal_excess": max_excess if checked else 0.0,
    }]


def prel_checks(ctx: CheckContext) -> tuple[list[Check], dict]:
    checks = []
    for n in ctx.sizes:
        checks.append(zero_check("prel-corrected", "corrected_violations", sum(ctx.values(n, "corrected_violations")), n))
        checks.append(zero_check("prel-integral", "integral_violations", sum(ctx.values(n, "integral_violations")), n))
        checks.append(report_only(
            "prel-literal", ctx.agg(n, "max_literal_excess"), value=float(sum(ctx.values(n, "literal_violations"))),
        ))
    return checks, {}


# ---------------------------------------------------------
# uniform-baseline and thm3-per-woman
# ---------------------------------------------------------
def uniform_baseline_trial(task: TrialTask) -> list[dict]:
    inst = build_uniform(task.n, task.n, True, task.stream, task.descriptor(ModelName.UNIFORM, {"complete": True})).instance
    mu_m, mu_w = _optimal_pair(inst)
    total = sum(len(_husbands(inst, mu_m, mu_w, w)) for w in range(inst.W))
    return [{"n": task.n, "trial": task.trial, "stable_pairs": total, "husbands_per_woman": total / inst.W}]


def uniform_baseline_checks(ctx: CheckContext) -> tuple[list[Check], dict]:
    checks, notes = [], {}
    for n in ctx.sizes:
        checks.append(report_only("uniform-husbands", ctx.agg(n, "husbands_per_woman"), bound=uniform_expected_husbands(n)))
        notes[str(n)] = {"ln_n": uniform_expected_husbands(n), "expected_matchings": uniform_expected_matchings(n)}
    return checks, notes


def thm3_trial(task: TrialTask) -> list[dict]:
    model, inst = _popularity(task)
    w = int(task.params.get("woman", 0))
    mu_m, mu_w = _optimal_pair(inst)
    husbands = _husbands(inst, mu_m, mu_w, w)
    weights = model.women[w]
    log_ratio = weights.log_weight_of(husbands[-1]) - weights.log_weight_of(husbands[0]) if husbands else 0.0
    return [{
        "n": task.n, "trial": task.trial, "husbands": len(husbands),
        "log_ratio": log_ratio, "d_w": len(inst.women[w]),
    }]


def thm3_checks(ctx: CheckContext) -> tuple[list[Check], dict]:
    checks, notes = [], {}
    for n in ctx.sizes:
        d_w = max(ctx.values(n, "d_w"))
        rhs = thm3_rhs(d_w, ctx.agg(n, "log_ratio").mean)
        notes[str(n)] = {"rhs": rhs}
        checks.append(upper_bound_check("thm3-per-woman", ctx.agg(n, "husbands"), rhs, ctx.tolerance))
    return checks, notes


# ---------------------------------------------------------
# Registry
# ---------------------------------------------------------
MULTIPLICITY_COLUMNS = ["n", "trial", "multiplicity", "women_multiple", "men_multiple"]

CATALOG: dict[str, ExperimentSpec] = {spec.name: spec for spec in [
    ExperimentSpec(
        name="oracle-sweep",
        description="deferred acceptance, husband enumeration and blocks against exhaustive search",
        columns=["n", "trial", "stable_matchings", "stable_pairs", "mpda_ok", "wpda_ok", "rural_ok",
                 "husbands_ok", "blocks_ok", "separators_ok", "rank_gap_ok", "discrepancies"],
        statistic="discrepancies", trial=oracle_sweep_trial, checks=oracle_sweep_checks,
        default_n=[2, 3, 4, 5, 6], default_trials=500, default_params={"model": "uniform", "complete": False},
        aggregate_columns=["discrepancies", "stable_matchings", "stable_pairs"],
    ),
    ExperimentSpec(
        name="rank-gap",
        description="mean rank gap between best and worst stable husband against the u_k bound",
        columns=["n", "trial", "matched", "mean_gap", "max_gap"],
        statistic="mean_gap", trial=rank_gap_trial, checks=rank_gap_checks,
        default_n=[100], default_trials=200,
        default_params={"women": "gaussian", "sigma": 1.0, "lambda": 0.5},
        aggregate_columns=["mean_gap", "max_gap"],
    ),
    ExperimentSpec(
        name="multiplicity",
        description="fraction of persons with several stable partners under geometric popularity",
        columns=MULTIPLICITY_COLUMNS, statistic="multiplicity",
        trial=multiplicity_trial, checks=_report_multiplicity,
        default_n=[50, 100, 200], default_trials=100, default_params={"lambda": 0.5}, trend="decreasing",
    ),
    ExperimentSpec(
        name="counterexample-swap",
        description="multiplicity when adjacent pairs are swapped by fair coins",
        columns=MULTIPLICITY_COLUMNS, statistic="multiplicity",
        trial=swap_trial, checks=_report_multiplicity,
        default_n=[200], default_trials=100, trend="floor",
    ),
    ExperimentSpec(
        name="counterexample-grouped",
        description="multiplicity in a market split into independent 2x2 groups",
        columns=MULTIPLICITY_COLUMNS, statistic="multiplicity",
        trial=grouped_trial, checks=_report_multiplicity,
        default_n=[200], default_trials=100, trend="floor",
    ),
    ExperimentSpec(
        name="stable-pairs",
        description="total stable pairs under intrinsic or symmetric popularity",
        columns=["n", "trial", "stable_pairs"], statistic="stable_pairs",
        trial=stable_pairs_trial, checks=stable_pairs_checks,
        default_n=[50], default_trials=200, default_params={"lambda": 0.9, "kind": "intrinsic"},
    ),
    ExperimentSpec(
        name="folklore-lb",
        description="stable husbands of w_0 in the cyclic instance against the exact expectation",
        columns=["n", "trial", "husbands"], statistic="husbands",
        trial=folklore_trial, checks=folklore_checks,
        default_n=[200], default_trials=2000, default_params={"lambda": 0.99},
    ),
    ExperimentSpec(
        name="x-process",
        description="dominating jump process against its mean bound",
        columns=["n", "trial", "x", "T", "first_jump_zero"], statistic="x",
        trial=x_process_trial, checks=x_process_checks,
        default_n=[1], default_trials=100000, default_params={"a": 1.0, "rho": 0.5},
        aggregate_columns=["x", "T", "first_jump_zero"],
    ),
    ExperimentSpec(
        name="block-tail",
        description="block size distribution under geometric popularity",
        columns=["n", "trial", "block", "size"], statistic="size",
        trial=block_tail_trial, checks=block_tail_checks,
        default_n=[100], default_trials=200, default_params={"lambda": 0.5},
    ),
    ExperimentSpec(
        name="thm5-ratio",
        description="largest popularity ratio between two stable husbands against its log bound",
        columns=[
            "n", "trial", "max_log_ratio", "log_bound", "violation",
            "max_husbands", "cor2_scale", "cor2_ratio", "cor2_fallback",
        ],
        statistic="max_log_ratio",
        trial=thm5_trial, checks=thm5_checks,
        default_n=[30], default_trials=500, default_params={"lambda": 0.9, "kind": "intrinsic"},
        aggregate_columns=["max_log_ratio", "violation", "cor2_ratio"],
    ),
    ExperimentSpec(
        name="prel-diagnostic",
        description="exact expected phase-2 acceptances against the proposal-list bounds",
        columns=["n", "trial", "women_checked", "literal_violations", "corrected_violations",
                 "integral_violations", "max_literal_excess"],
        statistic="max_literal_excess", trial=prel_trial, checks=prel_checks,
        default_n=[30], default_trials=500, default_params={"lambda": 0.9, "kind": "intrinsic"},
        aggregate_columns=["max_literal_excess", "literal_violations", "corrected_violations"],
    ),
    ExperimentSpec(
        name="uniform-baseline",
        description="stable husbands per woman in uniform markets (descriptive)",
        columns=["n", "trial", "stable_pairs", "husbands_per_woman"], statistic="husbands_per_woman",
        trial=uniform_baseline_trial, checks=uniform_baseline_checks,
        default_n=[50, 100], default_trials=100,
    ),
    ExperimentSpec(
        name="thm3-per-woman",
        description="stable husbands of one popularity woman against her per-woman bound",
        columns=["n", "trial", "husbands", "log_ratio", "d_w"], statistic="husbands",
        trial=thm3_trial, checks=thm3_checks,
        default_n=[30], default_trials=500,
        default_params={"lambda": 0.9, "kind": "intrinsic", "woman": 0},
        aggregate_columns=["husbands", "log_ratio"],
    ),
]}


def run_trial(task: TrialTask) -> list[dict]:
    logger.debug(f"{task.experiment}: n={task.n} trial={task.trial}")
    return CATALOG[task.experiment].trial(task)
