import numpy as np
import pytest

from addcomp import functions
from addcomp.bases import haar_eval
from addcomp.exceptions import ConfigurationError
from addcomp.simulation import (
    DEFAULT_C_GRID,
    ExperimentConfig,
    figure_data,
    generate_dataset,
    run_baseline_comparison,
    run_ratio_experiment,
)


class TestExperimentConfig:
    def test_defaults_mirror_study_setup(self):
        cfg = ExperimentConfig()
        assert cfg.n == 512
        assert cfg.sigma2 == 1.0
        assert cfg.replications == 500
        assert DEFAULT_C_GRID == tuple(0.5 * i for i in range(11))

    def test_default_nuisance_ids(self):
        assert ExperimentConfig(K=3).resolved_t_ids() == ("f1", "f2", "f3")

    def test_bad_noise_rejected(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(noise="t:1.5")
        with pytest.raises(ConfigurationError):
            ExperimentConfig(noise="cauchy")

    def test_wrong_t_ids_length(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(K=2, t_ids=("f1",)).resolved_t_ids()


class TestGenerateDataset:
    def test_noiseless_without_nuisance(self):
        cfg = ExperimentConfig(n=32, K=0, sigma2=0.0, replications=1)
        rng = np.random.default_rng(0)
        x, ys, z, s_true = generate_dataset(cfg, rng)
        np.testing.assert_array_equal(z, s_true)
        assert ys.shape == (32, 0)

    def test_seed_determinism(self):
        cfg = ExperimentConfig(n=64, K=2, replications=1, seed=9)
        a = generate_dataset(cfg, np.random.default_rng(42))
        b = generate_dataset(cfg, np.random.default_rng(42))
        for left, right in zip(a, b):
            np.testing.assert_array_equal(left, right)

    def test_noise_variance_gaussian(self):
        cfg = ExperimentConfig(n=100_000, K=0, sigma2=1.0, replications=1)
        rng = np.random.default_rng(1)
        x, ys, z, s_true = generate_dataset(cfg, rng)
        assert np.var(z - s_true) == pytest.approx(1.0, rel=0.02)

    def test_noise_variance_student_t(self):
        cfg = ExperimentConfig(n=100_000, K=0, sigma2=1.0, noise="t:10", replications=1)
        rng = np.random.default_rng(2)
        x, ys, z, s_true = generate_dataset(cfg, rng)
        assert np.var(z - s_true) == pytest.approx(1.0, rel=0.02)

    def test_additive_structure(self):
        cfg = ExperimentConfig(n=64, K=2, sigma2=0.0, t_ids=("f2", "f5"), replications=1)
        rng = np.random.default_rng(3)
        x, ys, z, s_true = generate_dataset(cfg, rng)
        expected = (
            functions.evaluate("f1", x)
            + functions.evaluate("f2", ys[:, 0])
            + functions.evaluate("f5", ys[:, 1])
        )
        np.testing.assert_allclose(z, expected, atol=1e-12)
        np.testing.assert_allclose(s_true, functions.evaluate("f1", x), atol=1e-12)


class TestRunRatioExperiment:
    def test_report_layout_and_determinism(self):
        cfg = ExperimentConfig(n=512, K=1, C_grid=(0.5, 2.0), replications=3, seed=3)
        a = run_ratio_experiment(cfg, threads=1)
        b = run_ratio_experiment(cfg, threads=2)
        assert [c.C for c in a.cells] == [0.5, 2.0]
        assert all(c.K == 1 for c in a.cells)
        assert a.to_table() == b.to_table()
        assert all(c.ratio > 0 for c in a.cells)
        assert all(c.stderr >= 0 for c in a.cells)

    def test_noiseless_limit_in_span(self):
        # a target that is itself a basis function: with negligible noise both
        # the risk and the benchmark collapse at the same rate
        functions.register("haar10", lambda x: haar_eval(1, 0, np.asarray(x, dtype=float)))
        try:
            cfg = ExperimentConfig(
                n=128, K=0, s_id="haar10", sigma2=1e-12, C_grid=(1.5,), replications=20, seed=4
            )
            report = run_ratio_experiment(cfg, threads=1)
            assert report.cells[0].ratio == pytest.approx(1.0, abs=0.1)
        finally:
            functions._RAW.pop("haar10")
            functions.centering_constant.cache_clear()

    def test_estimated_variance_recorded(self):
        cfg = ExperimentConfig(n=512, K=1, variance="estimated", C_grid=(1.5,), replications=3, seed=5)
        report = run_ratio_experiment(cfg, threads=1)
        assert report.mean_sigma2_used is not None
        assert report.mean_sigma2_used > 0

    def test_cell_lookup(self):
        cfg = ExperimentConfig(n=512, K=1, C_grid=(0.5, 2.0), replications=3, seed=6)
        report = run_ratio_experiment(cfg, threads=1)
        assert report.cell(1, 2.0).C == 2.0
        with pytest.raises(KeyError):
            report.cell(1, 3.0)


class TestBaselineComparison:
    def test_trivial_when_no_nuisance_dimensions(self):
        # without nuisance covariates the two procedures share data and
        # models; on the well-penalized plateau, where the multiplier
        # difference between the trace and dimension penalties stops
        # mattering, they make the same choices
        cfg = ExperimentConfig(n=128, K=0, C_grid=(4.0,), replications=30, seed=7)
        report = run_baseline_comparison(cfg, threads=1)
        assert report.cells[0].ratio == pytest.approx(1.0, abs=0.1)

    def test_zero_components_forced(self):
        cfg = ExperimentConfig(n=512, K=2, C_grid=(1.5,), replications=3, seed=8, t_ids=("f2", "f3"))
        report = run_baseline_comparison(cfg, threads=1)
        assert report.kind == "baseline-comparison"
        assert report.cells[0].n_reps >= 1

    def test_determinism(self):
        cfg = ExperimentConfig(n=512, K=1, C_grid=(1.5, 3.0), replications=3, seed=9)
        assert (
            run_baseline_comparison(cfg, threads=2).to_table()
            == run_baseline_comparison(cfg, threads=1).to_table()
        )


class TestFigureData:
    def test_row_count_and_columns(self):
        cfg = ExperimentConfig(n=512, K=1, C_grid=(1.5,), replications=1, seed=10)
        meta, rows = figure_data(cfg)
        assert rows.shape == (512, 5)
        assert np.all(np.diff(rows[:, 0]) >= 0)
        assert {"rho", "rho2", "sigma2_used"} <= set(meta)

    def test_noiseless_recovery_in_span(self):
        functions.register("haar10", lambda x: haar_eval(1, 0, np.asarray(x, dtype=float)))
        try:
            cfg = ExperimentConfig(
                n=128, K=0, s_id="haar10", sigma2=0.0, C_grid=(1.5,), replications=1, seed=11
            )
            meta, rows = figure_data(cfg)
            np.testing.assert_allclose(rows[:, 4], rows[:, 1], atol=1e-6)
        finally:
            functions._RAW.pop("haar10")
            functions.centering_constant.cache_clear()
