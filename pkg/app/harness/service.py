"""
Experiment Runner

Expands a config into (size, trial) tasks, runs them on a process pool when
more than one worker is asked for, and assembles the report in task order.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable, Optional

from app.config import settings
from app.harness.experiments import CATALOG, CheckContext, ExperimentSpec, TrialTask, run_trial
from app.harness.schemas import (
    ExperimentConfig, ExperimentInfo, ExperimentReport, Summary, SummaryPoint, Verdict,
)
from app.harness.utils import aggregate, overall, trend_check
from app.shared.errors import UnknownExperimentError
from app.shared.io import write_csv

logger = logging.getLogger(__name__)


def get_experiment(name: str) -> ExperimentSpec:
    spec = CATALOG.get(name)
    if spec is None:
        raise UnknownExperimentError(
            f"Unknown experiment '{name}'",
            details="available: " + ", ".join(sorted(CATALOG)),
        )
    return spec


def list_experiments() -> list[ExperimentInfo]:
    return [
        ExperimentInfo(
            name=spec.name, description=spec.description, default_n=spec.default_n,
            default_trials=spec.default_trials, default_params=spec.default_params,
        )
        for spec in CATALOG.values()
    ]


def _execute(tasks: list[TrialTask], workers: int) -> list[dict]:
    if workers <= 1 or len(tasks) <= 1:
        batches = map(run_trial, tasks)
        return [row for batch in batches for row in batch]
    chunksize = max(1, len(tasks) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [row for batch in pool.map(run_trial, tasks, chunksize=chunksize) for row in batch]


# ---------------------------------------------------------
# Run
# ---------------------------------------------------------
def run_experiment(cfg: ExperimentConfig, workers: Optional[int] = None) -> ExperimentReport:
    spec = get_experiment(cfg.name)
    sizes = cfg.n or spec.default_n
    trials = cfg.trials or spec.default_trials
    params = {**spec.default_params, **cfg.params}
    guard = cfg.guard or settings.oracle_guard
    workers = workers or cfg.workers or settings.workers

    logger.info(f"Running {spec.name}: n={sizes}, trials={trials}, seed={cfg.seed}, workers={workers}")
    tasks = [
        TrialTask(experiment=spec.name, params=params, n=n, point=point, trial=trial, seed=cfg.seed, guard=guard)
        for point, n in enumerate(sizes)
        for trial in range(trials)
    ]
    rows = _execute(tasks, workers)

    ctx = CheckContext(params=params, sizes=sizes, rows=rows, tolerance=settings.stat_tolerance_se)
    checks, notes = spec.checks(ctx)
    report = ExperimentReport(
        experiment=spec.name,
        config=cfg.model_copy(update={"n": sizes, "trials": trials, "params": params, "guard": guard}),
        columns=spec.columns,
        rows=rows,
        aggregates=[ctx.agg(n, column) for n in sizes for column in spec.aggregated],
        checks=checks,
        notes=notes,
    )
    report.checks += summarize([report]).checks
    report.verdict = overall(report.checks)
    logger.info(f"Finished {spec.name}: verdict {report.verdict.value}")

    if cfg.output:
        write_report(report, cfg.output)
    return report


def summarize(reports: Iterable[ExperimentReport]) -> Summary:
    """Headline statistic per (experiment, n), plus the trend rule of each experiment across its sizes."""
    summary = Summary()
    by_experiment: dict[str, list] = {}
    for report in reports:
        spec = get_experiment(report.experiment)
        for n in report.config.n or []:
            agg = report.aggregate(n, spec.statistic)
            if agg is None:
                agg = aggregate(n, spec.statistic, [row[spec.statistic] for row in report.rows if row["n"] == n])
            summary.points.append(SummaryPoint(
                experiment=spec.name, n=n, statistic=spec.statistic,
                mean=agg.mean, se=agg.se, count=agg.count,
            ))
            by_experiment.setdefault(spec.name, []).append(agg)

    for name, points in by_experiment.items():
        rule = CATALOG[name].trend
        if rule is not None:
            summary.checks.append(trend_check(f"{name}-trend", points, rule, settings.multiplicity_floor))
    summary.verdict = overall(summary.checks) if summary.checks else Verdict.REPORT_ONLY
    return summary


# ---------------------------------------------------------
# Output
# ---------------------------------------------------------
def summary_path(path: str | Path) -> Path:
    return Path(path).with_suffix(".summary.json")


def write_report(report: ExperimentReport, path: str | Path) -> tuple[Path, Path]:
    """Per-trial CSV at `path`; everything but the rows in the sibling .summary.json."""
    target = write_csv(path, report.columns, report.rows)
    side = summary_path(target)
    side.write_text(report.model_dump_json(exclude={"rows"}) + "\n")
    logger.info(f"Wrote {target} and {side}")
    return target, side


class HarnessService:
    """Experiment catalog, runs and report files for the routers and the CLI."""

    def catalog(self) -> list[ExperimentInfo]:
        return list_experiments()

    def run(self, cfg: ExperimentConfig, workers: Optional[int] = None) -> ExperimentReport:
        return run_experiment(cfg, workers)

    def summarize(self, reports: Iterable[ExperimentReport]) -> Summary:
        return summarize(reports)

    def write(self, report: ExperimentReport, path: str | Path) -> tuple[Path, Path]:
        return write_report(report, path)


harness_service = HarnessService()
