import json
import math
import time

import pytest
from pydantic import ValidationError

from app.harness.schemas import Aggregate, ExperimentConfig, ExperimentReport, Verdict
from app.harness.service import (
    get_experiment, harness_service, list_experiments, run_experiment, summarize, summary_path,
    write_report,
)
from app.harness.utils import aggregate, log_frequency_slope, overall, trend_check, upper_bound_check
from app.shared.errors import UnknownExperimentError

SEED = 20240601


def run(name: str, n, trials: int, **params) -> ExperimentReport:
    return run_experiment(ExperimentConfig(name=name, n=n, trials=trials, seed=SEED, params=params))


def verdicts(report: ExperimentReport, name: str) -> set[Verdict]:
    return {check.verdict for check in report.checks if check.name == name}


class TestCatalog:
    def test_every_experiment_is_listed(self):
        names = {info.name for info in list_experiments()}
        assert names == {
            "oracle-sweep", "rank-gap", "multiplicity", "counterexample-swap", "counterexample-grouped",
            "stable-pairs", "folklore-lb", "x-process", "block-tail", "thm5-ratio", "prel-diagnostic",
            "uniform-baseline", "thm3-per-woman",
        }

    def test_unknown(self):
        with pytest.raises(UnknownExperimentError):
            get_experiment("nope")

    def test_config_accepts_single_size(self):
        assert ExperimentConfig(name="x-process", n=5, seed=1).n == [5]
        with pytest.raises(ValidationError):
            ExperimentConfig(name="x-process", n=[0], seed=1)


class TestUtils:
    def test_aggregate(self):
        agg = aggregate(3, "v", [1.0, 2.0, 3.0])
        assert (agg.count, agg.mean, agg.sd) == (3, 2.0, 1.0)
        assert agg.se == pytest.approx(1 / 3**0.5)
        assert aggregate(3, "v", [4.0]).sd == 0.0

    def test_upper_bound_uses_tolerance(self):
        agg = Aggregate(n=1, column="v", count=4, mean=10.5, sd=1.0, se=0.5)
        assert upper_bound_check("c", agg, 10.0, 3.0).verdict is Verdict.PASS
        assert upper_bound_check("c", agg, 10.0, 0.5).verdict is Verdict.FAIL

    def test_trend_rules(self):
        def points(*means):
            return [Aggregate(n=10 * (i + 1), column="m", count=1, mean=m, sd=0, se=0) for i, m in enumerate(means)]

        assert trend_check("t", points(0.3, 0.2, 0.1), "decreasing").verdict is Verdict.PASS
        assert trend_check("t", points(0.3, 0.3), "decreasing").verdict is Verdict.FAIL
        assert trend_check("t", points(0.3), "decreasing").verdict is Verdict.REPORT_ONLY
        assert trend_check("t", points(0.2, 0.06), "floor", 0.05).verdict is Verdict.PASS
        assert trend_check("t", points(0.2, 0.01), "floor", 0.05).verdict is Verdict.FAIL
        with pytest.raises(ValueError):
            trend_check("t", points(0.1), "sideways")

    def test_overall(self):
        assert overall([]) is Verdict.REPORT_ONLY
        agg = Aggregate(n=1, column="v", count=1, mean=0.0, sd=0, se=0)
        passing = upper_bound_check("a", agg, 1.0, 0.0)
        failing = upper_bound_check("b", agg, -1.0, 0.0)
        assert overall([passing]) is Verdict.PASS
        assert overall([passing, failing]) is Verdict.FAIL

    def test_log_frequency_slope(self):
        assert log_frequency_slope([1, 1, 1]) is None
        assert log_frequency_slope([1] * 8 + [2] * 4 + [3] * 2) < 0


class TestSmallRuns:
    def test_oracle_sweep(self):
        report = run("oracle-sweep", [3, 4], 25)
        assert report.verdict is Verdict.PASS
        assert all(row["discrepancies"] == 0 for row in report.rows)
        assert len(report.rows) == 50

    def test_oracle_sweep_master(self):
        report = run("oracle-sweep", [4], 10, model="master")
        assert verdicts(report, "master-unique") == {Verdict.PASS}

    def test_rank_gap(self):
        gaussian = run("rank-gap", [15], 10)
        assert gaussian.verdict is Verdict.PASS
        assert "closed_form_bound" in gaussian.notes
        geometric = run("rank-gap", [15], 10, women="geometric", **{"lambda": 0.5})
        assert geometric.notes["bound"] == pytest.approx(94.67, abs=0.01)
        assert geometric.verdict is Verdict.PASS

    def test_folklore(self):
        report = run("folklore-lb", [20], 400, **{"lambda": 0.9})
        assert verdicts(report, "folklore-floor") == {Verdict.PASS}
        assert verdicts(report, "folklore-exact") == {Verdict.PASS}

    @pytest.mark.parametrize("name", ["counterexample-swap", "counterexample-grouped"])
    def test_counterexamples_keep_multiplicity(self, name):
        report = run(name, [20], 50)
        assert verdicts(report, f"{name}-trend") == {Verdict.PASS}
        assert report.aggregate(20, "multiplicity").mean > 0.05

    def test_x_process(self):
        report = run("x-process", [1], 3000)
        assert verdicts(report, "x-mean") == {Verdict.PASS}
        assert report.notes["meandomination_bound"] == pytest.approx(44.33, abs=0.01)

    def test_prel_diagnostic(self):
        report = run("prel-diagnostic", [8], 20)
        assert verdicts(report, "prel-corrected") == {Verdict.PASS}
        assert verdicts(report, "prel-integral") == {Verdict.PASS}
        assert verdicts(report, "prel-literal") == {Verdict.REPORT_ONLY}

    def test_thm5(self):
        report = run("thm5-ratio", [8], 20)
        assert verdicts(report, "thm5-violations") == {Verdict.PASS}
        assert all(row["log_bound"] > 0 for row in report.rows)

    def test_thm5_quotes_cor2_with_fallback_for_intrinsic(self):
        report = run("thm5-ratio", [8], 10, kind="intrinsic", **{"lambda": 0.9})
        for row in report.rows:
            assert row["cor2_fallback"] is True
            assert row["cor2_scale"] == pytest.approx(1 + math.log(8))
            assert row["cor2_ratio"] == pytest.approx(row["max_husbands"] / (1 + math.log(8)))
            assert row["max_husbands"] >= 1
        assert verdicts(report, "cor2-ratio") == {Verdict.REPORT_ONLY}
        assert report.notes["8"]["cor2_fallback"] is True
        assert "cor2_ratio" in report.columns

    def test_stable_pairs(self):
        report = run("stable-pairs", [10], 20)
        assert report.verdict is Verdict.PASS
        assert set(report.notes["10"]) == {"cor1", "thm6", "thm7"}

    def test_stable_pairs_symmetric(self):
        report = run("stable-pairs", [8], 10, kind="symmetric", **{"lambda": 0.8})
        assert report.verdict is Verdict.PASS

    def test_block_tail(self):
        report = run("block-tail", [30], 20)
        assert report.verdict is not Verdict.FAIL
        assert {row["n"] for row in report.rows} == {30}
        for trial in range(20):
            assert sum(row["size"] for row in report.rows if row["trial"] == trial) == 30

    def test_uniform_baseline_is_descriptive(self):
        report = run("uniform-baseline", [10], 5)
        assert report.verdict is Verdict.REPORT_ONLY

    def test_thm3(self):
        report = run("thm3-per-woman", [10], 40)
        assert verdicts(report, "thm3-per-woman") == {Verdict.PASS}


class TestDeterminism:
    def test_same_seed_same_rows(self):
        assert run("oracle-sweep", [3], 10).rows == run("oracle-sweep", [3], 10).rows

    def test_worker_count_does_not_matter(self):
        cfg = ExperimentConfig(name="folklore-lb", n=[10, 12], trials=12, seed=SEED)
        assert run_experiment(cfg, workers=1).rows == run_experiment(cfg, workers=2).rows

    def test_seed_changes_rows(self):
        first = run_experiment(ExperimentConfig(name="block-tail", n=[20], trials=5, seed=1))
        second = run_experiment(ExperimentConfig(name="block-tail", n=[20], trials=5, seed=2))
        assert first.rows != second.rows


class TestOutput:
    def test_write_report(self, tmp_path):
        target = tmp_path / "reports" / "x.csv"
        cfg = ExperimentConfig(name="x-process", n=[1], trials=20, seed=SEED, output=str(target))
        report = run_experiment(cfg)
        lines = target.read_text().splitlines()
        assert lines[0] == "n,trial,x,T,first_jump_zero"
        assert len(lines) == 21
        summary = json.loads(summary_path(target).read_text())
        assert summary_path(target).name == "x.summary.json"
        assert "rows" not in summary
        assert summary["verdict"] == report.verdict.value

    def test_write_report_returns_paths(self, tmp_path):
        report = run("uniform-baseline", [4], 2)
        csv_path, side = write_report(report, tmp_path / "u.csv")
        assert csv_path.exists() and side.exists()


class TestSummary:
    def test_trend_across_reports(self):
        report = run("multiplicity", [10], 3)
        summary = summarize([report])
        assert [point.n for point in summary.points] == [10]
        assert summary.checks[0].name == "multiplicity-trend"
        assert summary.checks[0].verdict is Verdict.REPORT_ONLY

    def test_decreasing_sweep(self):
        report = run("multiplicity", [10], 3)
        report.config.n = [10, 40]
        report.aggregates = [
            Aggregate(n=10, column="multiplicity", count=3, mean=0.4, sd=0.0, se=0.0),
            Aggregate(n=40, column="multiplicity", count=3, mean=0.2, sd=0.0, se=0.0),
        ]
        assert summarize([report]).verdict is Verdict.PASS


class TestHarnessService:
    def test_catalog_matches_listing(self):
        assert [info.name for info in harness_service.catalog()] == [info.name for info in list_experiments()]

    def test_run_and_write(self, tmp_path):
        report = harness_service.run(ExperimentConfig(name="x-process", n=[5], trials=4, seed=SEED))
        csv_path, side = harness_service.write(report, tmp_path / "x.csv")
        assert csv_path.read_text().splitlines()[0].startswith("n,trial")
        assert json.loads(side.read_text())["experiment"] == "x-process"
        assert harness_service.summarize([report]).points[0].n == 5


@pytest.mark.slow
class TestAcceptance:
    @pytest.mark.parametrize("name", [
        "oracle-sweep", "rank-gap", "counterexample-swap", "counterexample-grouped", "stable-pairs",
        "folklore-lb", "x-process", "thm5-ratio", "prel-diagnostic", "thm3-per-woman",
    ])
    def test_default_run_passes(self, name):
        report = run_experiment(ExperimentConfig(name=name, seed=SEED), workers=4)
        assert report.verdict is Verdict.PASS

    def test_multiplicity_decreases(self):
        report = run_experiment(ExperimentConfig(name="multiplicity", seed=SEED), workers=4)
        assert verdicts(report, "multiplicity-trend") == {Verdict.PASS}

    def test_symmetric_stable_pairs(self):
        cfg = ExperimentConfig(name="stable-pairs", seed=SEED, params={"kind": "symmetric"})
        assert run_experiment(cfg, workers=4).verdict is Verdict.PASS

    def test_master_list_uniqueness(self):
        cfg = ExperimentConfig(name="oracle-sweep", seed=SEED, trials=200, params={"model": "master"})
        report = run_experiment(cfg, workers=4)
        assert verdicts(report, "master-unique") == {Verdict.PASS}

    def test_folklore_default_size_is_quick(self):
        cfg = ExperimentConfig(name="folklore-lb", n=[200], trials=2000, seed=1, params={"lambda": 0.99})
        started = time.perf_counter()
        report = run_experiment(cfg, workers=1)
        assert time.perf_counter() - started < 120
        assert report.verdict is Verdict.PASS

    def test_geometric_rank_gap(self):
        cfg = ExperimentConfig(name="rank-gap", n=[100], seed=SEED, params={"women": "geometric", "lambda": 0.5})
        report = run_experiment(cfg, workers=4)
        assert verdicts(report, "rank-gap-bound") == {Verdict.PASS}
        assert report.aggregate(100, "mean_gap").mean <= report.notes["bound"]
        assert report.verdict is Verdict.PASS

    def test_byte_identical_csv(self, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path, workers in zip(paths, (1, 4)):
            run_experiment(ExperimentConfig(name="x-process", seed=SEED, trials=2000, output=str(path)), workers=workers)
        assert paths[0].read_bytes() == paths[1].read_bytes()
