import json
import unittest

import numpy as np

from src.contracts.analysis_contracts import EvalRow, EvalTable, ForecastSpec, RatioBasis
from src.contracts.forest_contracts import ForestConfig
from src.contracts.synth_contracts import DgpConfig
from src.oil_forest.model.analysis import compare, eval_row, render_fit_table, render_forecast_table, render_table, rmse_ratio
from src.oil_forest.model.forest import evaluate, fit_forest
from src.oil_forest.model.linear import fit_ar1, fit_ols
from src.oil_forest.model.synthgen import generate

OLS_RMSE = 0.0745
AR1_RMSE = 0.1070
# (min split size, trees, in sample, out of bag, reference ratio to OLS)
FIT_GRID = [
    (4, 100, 0.0232, 0.0433, 0.312), (5, 100, 0.0236, 0.0427, 0.317), (6, 100, 0.0242, 0.0430, 0.325),
    (8, 100, 0.0250, 0.0437, 0.336), (10, 100, 0.0266, 0.0448, 0.356), (20, 100, 0.0327, 0.0477, 0.439),
    (30, 100, 0.0386, 0.0517, 0.518), (40, 100, 0.0425, 0.0543, 0.571), (4, 1000, 0.0230, 0.0421, 0.308),
    (5, 1000, 0.0235, 0.0424, 0.315), (6, 1000, 0.0240, 0.0424, 0.323), (8, 1000, 0.0250, 0.0430, 0.336),
    (10, 1000, 0.0262, 0.0436, 0.351), (20, 1000, 0.0327, 0.0476, 0.440), (30, 1000, 0.0385, 0.0511, 0.517),
    (40, 1000, 0.0420, 0.0532, 0.564),
]


def _fit_table() -> EvalTable:
    rows = [eval_row("random forest", ins, oob, OLS_RMSE, AR1_RMSE, min_split_size=p, n_trees=n)
            for p, n, ins, oob, _ in FIT_GRID]
    return EvalTable(basis=RatioBasis.in_sample, rows=rows)


class TestRmseRatio(unittest.TestCase):
    def test_benchmark_rows(self):
        """Every in-sample RMSE over the OLS RMSE reproduces the rounded reference ratio."""
        for p, n, in_sample, _, reference in FIT_GRID:
            with self.subTest(p=p, n_trees=n):
                self.assertAlmostEqual(rmse_ratio(in_sample, OLS_RMSE), reference, delta=0.002)

    def test_shallow_forest_row(self):
        self.assertEqual(round(rmse_ratio(0.0420, 0.0745), 3), 0.564)

    def test_identical(self):
        self.assertEqual(rmse_ratio(0.05, 0.05), 1.0)

    def test_undefined(self):
        for numerator, denominator in ((0.1, 0.0), (None, 0.1), (0.1, None), (0.1, float("inf"))):
            with self.subTest(numerator=numerator, denominator=denominator):
                self.assertIsNone(rmse_ratio(numerator, denominator))


class TestEvalRow(unittest.TestCase):
    def test_in_sample_basis(self):
        row = eval_row("random forest", 0.0262, 0.0436, OLS_RMSE, AR1_RMSE)
        self.assertEqual(row.ratio_ols, 0.0262 / OLS_RMSE)
        self.assertEqual(row.ratio_ar1, 0.0262 / AR1_RMSE)
        self.assertEqual(row.flags, [])

    def test_out_of_sample_basis(self):
        row = eval_row("random forest", 0.030, 0.048, 0.0972, 0.1071, RatioBasis.out_of_sample, horizon=22)
        self.assertEqual(row.ratio_ols, 0.048 / 0.0972)
        self.assertEqual(row.horizon, 22)

    def test_missing_oob_is_flagged(self):
        row = eval_row("random forest", 0.03, None, 0.07, 0.1, RatioBasis.out_of_sample)
        self.assertIsNone(row.ratio_ols)
        self.assertIn("no out-of-sample RMSE; ratios not computed", row.flags)

    def test_zero_denominator_is_flagged(self):
        row = eval_row("random forest", 0.03, 0.04, 0.0, 0.1)
        self.assertIsNone(row.ratio_ols)
        self.assertEqual(row.ratio_ar1, 0.03 / 0.1)
        self.assertEqual(row.flags, ["zero OLS RMSE; ratio not computed"])


class TestCompare(unittest.TestCase):
    def setUp(self):
        self.d = generate(DgpConfig.test_value()).dataset
        self.m = fit_forest(self.d, ForestConfig(n_trees=20, min_split_size=10, seed=6))
        self.ols = fit_ols(self.d)
        self.ar1 = fit_ar1(self.d)

    def test_rows_and_ratios(self):
        table = compare(self.m, self.ols, self.ar1, self.d)
        self.assertEqual([r.model for r in table.rows], ["random forest", "OLS", "AR(1)"])
        forest = table.rows[0]
        metrics = evaluate(self.m, self.d)
        self.assertEqual(forest.rmse_in_sample, metrics.rmse_in_sample)
        self.assertEqual(forest.rmse_oob, metrics.rmse_oob)
        self.assertEqual(forest.n_trees, 20)
        self.assertEqual(forest.min_split_size, 10)
        for row in table.rows:
            with self.subTest(model=row.model):
                numerator = row.rmse_in_sample
                self.assertAlmostEqual(row.ratio_ols, numerator / row.baseline_ols, delta=1e-12)
                self.assertAlmostEqual(row.ratio_ar1, numerator / row.baseline_ar1, delta=1e-12)
        self.assertEqual(table.rows[1].ratio_ols, 1.0)
        self.assertEqual(table.rows[2].ratio_ar1, 1.0)

    def test_nested_baselines(self):
        """OLS contains the AR(1) regressor, so it fits at least as well in sample."""
        table = compare(self.m, self.ols, self.ar1, self.d)
        self.assertLessEqual(table.rows[1].rmse_in_sample, table.rows[2].rmse_in_sample + 1e-12)

    def test_forecast_basis_uses_oob(self):
        table = compare(self.m, self.ols, self.ar1, self.d, RatioBasis.out_of_sample, horizon=22,
                        include_baselines=False)
        self.assertEqual(len(table.rows), 1)
        row = table.rows[0]
        self.assertAlmostEqual(row.ratio_ols, row.rmse_oob / row.baseline_ols, delta=1e-12)

    def test_json_round_trip(self):
        table = compare(self.m, self.ols, None, self.d)
        self.assertEqual(len(table.rows), 2)
        back = EvalTable.model_validate(json.loads(table.model_dump_json()))
        self.assertEqual(back, table)


class TestRenderTables(unittest.TestCase):
    def test_fit_table_layout(self):
        lines = render_fit_table(_fit_table()).splitlines()
        self.assertEqual([c.strip() for c in lines[0].split("|")],
                         ["min obs / splitting node", "no. of reg. trees", "AR(1)", "OLS",
                          "in sample", "out of bag", "RMSE ratio (rel. OLS)"])
        self.assertEqual(len(lines), 1 + len(FIT_GRID))
        last = [c.strip() for c in lines[-1].split("|")]
        self.assertEqual(last, ["40", "1000", "0.1070", "0.0745", "0.0420", "0.0532", "0.564"])

    def test_forecast_table_layout(self):
        rows = [eval_row("random forest", ins, oos, ols, ar1, RatioBasis.out_of_sample, horizon=h, n_trees=1000)
                for h, ins, oos, ols, ar1 in ((22, 0.030, 0.048, 0.0972, 0.1071),
                                              (44, 0.028, 0.052, 0.1529, 0.1600),
                                              (66, 0.034, 0.059, 0.1855, 0.1987))]
        table = EvalTable(basis=RatioBasis.out_of_sample, rows=rows)
        lines = render_forecast_table(table).splitlines()
        self.assertEqual([c.strip() for c in lines[0].split("|")],
                         ["forecast horizon", "in sample", "out of sample", "AR(1)", "OLS"])
        self.assertEqual([line.split("|")[0].strip() for line in lines[1:]],
                         ["1 month ahead", "2 months ahead", "3 months ahead"])
        first = [c.strip() for c in lines[1].split("|")]
        self.assertEqual(first[1:3], ["0.030", "0.048"])
        self.assertEqual(first[3], f"{0.048 / 0.1071:.3f}")
        self.assertEqual(render_table(table), render_forecast_table(table))

    def test_missing_cells(self):
        table = EvalTable(rows=[EvalRow(model="random forest", rmse_in_sample=0.02, min_split_size=10, n_trees=5)])
        last = [c.strip() for c in render_table(table).splitlines()[-1].split("|")]
        self.assertEqual(last[2:], ["n/a", "n/a", "0.0200", "n/a", "n/a"])

    def test_horizon_label(self):
        self.assertEqual(ForecastSpec(horizon=22).label(), "1 month ahead")
        self.assertEqual(ForecastSpec(horizon=66).label(), "3 months ahead")
        self.assertEqual(ForecastSpec(horizon=5).label(), "5 rows ahead")


if __name__ == "__main__":
    unittest.main()
