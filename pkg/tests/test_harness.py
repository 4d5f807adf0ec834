"""Monte-Carlo experiment harness: error tables, coverage tables, timing."""

import json
import os

import numpy as np
import pytest

from gldfit import (
    BENCHMARK_SETTINGS,
    EstimatorHandle,
    ExperimentConfig,
    FitResult,
    Functional,
    GldParams,
    ProbabilityGrid,
    pdq_estimator,
    run_coverage_experiment,
    run_error_experiment,
    run_timing,
)
from gldfit.errors import DataError
from gldfit.harness import (
    BootstrapOptions,
    load_config,
    run_experiment_from_config,
    write_metric_rows,
)

SETTING = GldParams(0.0, 1.0, 1.5, 1.5)


def small_cfg(**kw):
    base = dict(
        metric="error-bias",
        true_params=SETTING,
        sample_sizes=(100,),
        replications=5,
        seed=123,
    )
    base.update(kw)
    return ExperimentConfig(**base)


class TestBenchmarkRegistry:
    def test_four_settings(self):
        shapes = [(p.lambda3, p.lambda4) for p in BENCHMARK_SETTINGS]
        assert shapes == [(1.5, 1.5), (2.5, 1.5), (2.0, 0.5), (0.5, 0.6)]
        assert all(p.lambda1 == 0.0 and p.lambda2 == 1.0 for p in BENCHMARK_SETTINGS)


class TestErrorExperiment:
    def test_row_layout(self):
        rows = run_error_experiment(small_cfg(sample_sizes=(100, 250)), pdq_estimator())
        assert len(rows) == 8
        assert [r.parameter for r in rows[:4]] == ["lambda1", "lambda2", "lambda3", "lambda4"]
        assert {r.n for r in rows} == {100, 250}

    def test_single_replication_has_zero_spread(self):
        rows = run_error_experiment(small_cfg(replications=1), pdq_estimator())
        assert all(r.se == 0.0 for r in rows)

    def test_deterministic(self):
        a = run_error_experiment(small_cfg(), pdq_estimator())
        b = run_error_experiment(small_cfg(), pdq_estimator())
        assert a == b

    def test_custom_estimator_plugs_in(self):
        fixed = GldParams(0.0, 1.0, 1.0, 1.0)
        est = EstimatorHandle(
            name="oracle",
            procedure=lambda s: FitResult(
                params=fixed, objective=0.0, start_pair=(1.0, 1.0), iterations=0,
                grid=ProbabilityGrid(2), elapsed=0.0,
            ),
        )
        rows = run_error_experiment(
            small_cfg(true_params=fixed, replications=3), est
        )
        assert all(r.se == 0.0 and r.abs_bias == 0.0 for r in rows)
        assert all(r.estimator == "oracle" for r in rows)


class TestCoverageExperiment:
    def test_widths_positive_and_coverage_bounded(self):
        cfg = small_cfg(
            metric="coverage",
            replications=10,
            bootstrap=BootstrapOptions(method="percentile", b_count=100, level=0.95),
        )
        rows = run_coverage_experiment(cfg, pdq_estimator(), Functional.location())
        (row,) = rows
        assert row.mean_width > 0.0
        assert 0.0 <= row.coverage <= 1.0
        assert row.parameter == "lambda1"

    def test_level_monotonicity(self):
        rows = {}
        for level in (0.5, 0.95):
            cfg = small_cfg(
                metric="coverage",
                replications=30,
                bootstrap=BootstrapOptions(method="percentile", b_count=100, level=level),
            )
            rows[level] = run_coverage_experiment(cfg, pdq_estimator(), Functional.location())[0]
        assert rows[0.5].coverage < rows[0.95].coverage

    def test_requires_bootstrap_section(self):
        with pytest.raises(DataError):
            small_cfg(metric="coverage")


class TestTiming:
    def test_rejects_zero_reps(self):
        with pytest.raises(ValueError):
            run_timing(pdq_estimator(), [100], reps=0, seed=1)

    def test_rows_and_monotone_cost(self):
        rows = run_timing(pdq_estimator(), [100, 10_000], reps=2, seed=1)
        assert [n for n, _ in rows] == [100, 10_000]
        assert all(t > 0 for _, t in rows)
        # large fits may not cost more per-fit in lockstep, but 100x the data
        # should never be faster than 90% of the small-fit time
        assert rows[1][1] >= 0.9 * rows[0][1]


class TestConfigIO:
    def test_unknown_metric_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({
            "metric": "mse",
            "true_params": [0, 1, 1, 1],
            "sample_sizes": [100],
        }))
        with pytest.raises(DataError):
            load_config(str(path))

    def test_roundtrip(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({
            "metric": "error-bias",
            "true_params": [0, 1, 1.5, 1.5],
            "sample_sizes": [100, 250],
            "replications": 4,
            "seed": 99,
        }))
        cfg = load_config(str(path))
        assert cfg.metric == "error-bias"
        assert cfg.true_params == GldParams(0.0, 1.0, 1.5, 1.5)
        assert cfg.sample_sizes == (100, 250)
        assert cfg.replications == 4
        assert cfg.seed == 99

    def test_bad_params_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({
            "metric": "error-bias",
            "true_params": [0, -1, 1, 1],
            "sample_sizes": [100],
        }))
        with pytest.raises(DataError):
            load_config(str(path))


class TestRunFromConfig:
    def test_writes_results_and_metadata(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "metric": "error-bias",
            "true_params": [0, 1, 1.5, 1.5],
            "sample_sizes": [100],
            "replications": 3,
            "seed": 7,
        }))
        out = tmp_path / "out"
        meta = run_experiment_from_config(str(cfg), str(out))
        assert (out / "results.csv").exists()
        assert (out / "run_metadata.json").exists()
        assert meta["seed"] == 7
        assert len(meta["config_sha256"]) == 64

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "metric": "error-bias",
            "true_params": [0, 1, 0.5, 0.6],
            "sample_sizes": [100],
            "replications": 3,
            "seed": 11,
        }))
        out1, out2 = tmp_path / "a", tmp_path / "b"
        run_experiment_from_config(str(cfg), str(out1))
        run_experiment_from_config(str(cfg), str(out2))
        assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()

    def test_timing_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "metric": "timing",
            "true_params": [0, 1, 0.5, 0.6],
            "sample_sizes": [100, 1000],
            "replications": 1,
            "seed": 3,
        }))
        out = tmp_path / "t"
        run_experiment_from_config(str(cfg), str(out))
        lines = (out / "timing.csv").read_text().strip().splitlines()
        assert lines[0] == "n,mean_seconds"
        assert len(lines) == 3


class TestMetricRowCsv:
    def test_float_formatting_roundtrips(self, tmp_path):
        from gldfit import MetricRow

        rows = [MetricRow("pdq", 100, "lambda1", 1.0 / 3.0, 0.1234567890123456789)]
        path = tmp_path / "rows.csv"
        write_metric_rows(rows, str(path))
        text = path.read_text().splitlines()
        _, _, _, se, bias, cov, width = text[1].split(",")
        assert float(se) == 1.0 / 3.0
        assert cov == "" and width == ""
