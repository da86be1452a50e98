"""
End-to-end properties on synthetic data with a known generating process.

The slow cases fit thousand-tree forests on full-size samples and only run
with RUN_BENCHMARKS=1.
"""
import os
import time
import unittest

import numpy as np

from src.contracts.analysis_contracts import RatioBasis
from src.contracts.forest_contracts import ForestConfig
from src.contracts.synth_contracts import DgpConfig
from src.oil_forest.model.analysis import (
    forecast_study, importance, min_split_sweep, partial_effect_1d, render_forecast_table, side_slopes,
)
from src.oil_forest.model.forest import evaluate, fit_forest, predict
from src.oil_forest.model.linear import fit_ols
from src.oil_forest.model.synthgen import TrueFunction, generate

BENCHMARKS = os.environ.get("RUN_BENCHMARKS") == "1"
SWEEP_P = [4, 5, 6, 8, 10, 20, 30, 40]


class TestOlsExactness(unittest.TestCase):
    def test_noiseless_linear_data(self):
        sample = generate(DgpConfig.linear_only(n_rows=1000, seed=5))
        model = fit_ols(sample.dataset)
        np.testing.assert_allclose(model.coefficients, sample.config.linear, rtol=0, atol=1e-8)
        self.assertLessEqual(model.rmse_in_sample, 1e-10)

    def test_nested_models_never_fit_worse(self):
        """Adding regressors cannot raise the in-sample RMSE."""
        d = generate(DgpConfig(n_rows=400, seed=9)).dataset
        rng = np.random.default_rng(21)
        names = list(d.feature_names)
        for case in range(50):
            k = int(rng.integers(1, len(names)))
            larger = sorted(rng.choice(len(names), size=k + 1, replace=False).tolist())
            smaller = larger[:-1]
            with self.subTest(case=case):
                big = fit_ols(d.select_features([names[j] for j in larger])).rmse_in_sample
                small = fit_ols(d.select_features([names[j] for j in smaller])).rmse_in_sample
                self.assertLessEqual(big, small + 1e-12)


class TestImportanceNormalization(unittest.TestCase):
    def test_reports_sum_to_one(self):
        d = generate(DgpConfig(n_rows=400, seed=2)).dataset
        for p in (4, 10, 40):
            with self.subTest(p=p):
                report = importance(fit_forest(d, ForestConfig(n_trees=20, min_split_size=p, seed=p)))
                self.assertAlmostEqual(sum(report.normalized), 1.0, delta=1e-12)
                self.assertTrue(all(v >= 0.0 for v in report.normalized))

    @unittest.skipUnless(BENCHMARKS, "set RUN_BENCHMARKS=1")
    def test_absent_feature_scores_low(self):
        """cesi_eme has no term in the generating process."""
        cfg = DgpConfig(seed=31, autocorrelation=0.0, noise_std=0.005)
        d = generate(cfg).dataset
        report = importance(fit_forest(d, ForestConfig(n_trees=200, seed=31)))
        self.assertLess(report.score("cesi_eme"), 0.02)


@unittest.skipUnless(BENCHMARKS, "set RUN_BENCHMARKS=1")
class TestBenchmarks(unittest.TestCase):
    def test_min_split_pattern(self):
        """In-sample RMSE grows with p and the out-of-bag RMSE stays above it."""
        d = generate(DgpConfig(seed=20220131)).dataset
        table, _ = min_split_sweep(d, SWEEP_P, ForestConfig(n_trees=100, seed=20220131))
        in_sample = [r.rmse_in_sample for r in table.rows]
        self.assertEqual([r.min_split_size for r in table.rows], SWEEP_P)
        self.assertEqual(in_sample, sorted(in_sample))
        for row in table.rows:
            with self.subTest(p=row.min_split_size):
                self.assertGreaterEqual(row.rmse_oob, row.rmse_in_sample)

    def test_nonlinear_gain(self):
        """With the signal mostly in the hinge and the interaction, the forest clearly beats OLS."""
        cfg = DgpConfig(seed=77, linear=[0.005] * 11, hinge_coef=0.2, interaction_coef=-0.1, noise_std=0.01)
        d = generate(cfg).dataset
        m = fit_forest(d, ForestConfig(n_trees=1000, seed=77))
        metrics = evaluate(m, d)
        ols = fit_ols(d).rmse_in_sample
        self.assertLessEqual(metrics.rmse_oob, 0.8 * ols)
        self.assertLessEqual(metrics.rmse_in_sample / ols, 0.5)

    def test_forecast_ordering(self):
        """Out-of-bag forest errors stay below both linear baselines at every horizon."""
        sample = generate(DgpConfig(seed=20220131))
        table = forecast_study(sample.dataset, sample.price, [22, 44, 66], ForestConfig(n_trees=200, seed=4))
        self.assertEqual(table.basis, RatioBasis.out_of_sample)
        for row in table.rows:
            with self.subTest(horizon=row.horizon):
                self.assertLess(row.rmse_oob, row.baseline_ar1)
                self.assertLess(row.rmse_oob, row.baseline_ols)
        header = [c.strip() for c in render_forecast_table(table).splitlines()[0].split("|")]
        self.assertEqual(header, ["forecast horizon", "in sample", "out of sample", "AR(1)", "OLS"])

    def test_partial_effect_asymmetry(self):
        """The fitted effect of covid is steep below zero and flat above it, as the hinge says."""
        cfg = DgpConfig(seed=13, autocorrelation=0.0, hinge_coef=0.1, noise_std=0.005)
        d = generate(cfg).dataset
        m = fit_forest(d, ForestConfig(n_trees=200, min_split_size=5, mtry=11, seed=13))
        grid = np.linspace(-2.0, 2.0, 41)
        curve = partial_effect_1d(m, d, "covid", grid)
        negative, positive = side_slopes(curve.grids[0], curve.effects)
        true_negative, _ = TrueFunction(cfg).slopes("covid")
        self.assertGreaterEqual(abs(negative), 3 * abs(positive))
        self.assertAlmostEqual(negative, true_negative, delta=0.3 * abs(true_negative))

    def test_benchmark_fit_time(self):
        """A thousand trees at p = 10 on the full-size sample fit in under a minute on one worker."""
        d = generate(DgpConfig(seed=20220131)).dataset
        start = time.perf_counter()
        m = fit_forest(d, ForestConfig(seed=20220131))
        self.assertLess(time.perf_counter() - start, 60.0)
        self.assertEqual((m.n_trees, m.config.min_split_size), (1000, 10))

    @unittest.skipUnless((os.cpu_count() or 1) >= 4, "needs four cores")
    def test_benchmark_worker_scaling(self):
        d = generate(DgpConfig(seed=20220131)).dataset
        cfg = ForestConfig(seed=20220131)

        start = time.perf_counter()
        serial = fit_forest(d, cfg)
        serial_seconds = time.perf_counter() - start

        start = time.perf_counter()
        parallel = fit_forest(d, cfg, workers=4, pool="process")
        parallel_seconds = time.perf_counter() - start

        self.assertGreaterEqual(serial_seconds / parallel_seconds, 3.0)
        rows = np.random.default_rng(0).standard_normal((1000, d.n_features))
        np.testing.assert_array_equal(predict(parallel, rows), predict(serial, rows))


if __name__ == "__main__":
    unittest.main()
