import json
import shutil
import tempfile
import unittest
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import ValidationError

from src.contracts.analysis_contracts import ImportanceReport, LinearModel, PartialEffectGrid
from src.contracts.dataset_contracts import Dataset, RawSeries, TransformKind, TransformSpec
from src.contracts.errors import ConfigError, ContractViolation, SchemaError, StageError, EXIT_CONFIG, EXIT_DATA
from src.contracts.experiment_contracts import ExperimentConfig, PdpRequest
from src.contracts.forest_contracts import ForestConfig
from src.contracts.synth_contracts import DgpConfig


class TestTransformSpec(unittest.TestCase):
    def setUp(self):
        self.tmpdir = Path(tempfile.mkdtemp(prefix="oilforest_spec_"))

    def tearDown(self):
        shutil.rmtree(self.tmpdir, ignore_errors=True)

    def test_shipped_catalogue(self):
        """The bundled spec declares Brent and WTI as targets and turns momentum on."""
        spec = TransformSpec.from_json(Path(__file__).resolve().parents[3] / "data" / "transform_spec.json")
        self.assertEqual(spec.window, 22)
        self.assertTrue(spec.momentum)
        self.assertEqual(spec.targets(), ["brent", "wti"])
        self.assertEqual(spec.resolve_target("wti"), "wti")
        with self.assertRaises(ConfigError):
            spec.resolve_target(None)
        self.assertEqual(spec.variables["ust2y"].transform, TransformKind.level)
        self.assertEqual(spec.variables["covid"].transform, TransformKind.zero_safe_log)
        self.assertNotIn("wti", spec.feature_variables("brent"))

    def test_dict_round_trip(self):
        spec = TransformSpec.test_value()
        self.assertEqual(TransformSpec.from_dict(spec.to_dict()), spec)

    def test_reserved_name(self):
        with self.assertRaises(ConfigError):
            TransformSpec.from_dict({"momentum": {"transform": "log"}})

    def test_unknown_transform(self):
        with self.assertRaises(ConfigError):
            TransformSpec.from_dict({"brent": {"transform": "sqrt", "role": "target"}})

    def test_unreadable_file(self):
        path = self.tmpdir / "spec.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with self.assertRaises(ConfigError):
            TransformSpec.from_json(path)
        with self.assertRaises(ConfigError):
            TransformSpec.from_json(self.tmpdir / "missing.json")


class TestDataTypes(unittest.TestCase):
    def test_dataset_shape_checks(self):
        dates = pd.bdate_range("2020-01-01", periods=3)
        cases = [
            (("a",), np.ones((3, 2)), np.ones(3)),
            (("a",), np.ones((3, 1)), np.ones(2)),
            (("a", "a"), np.ones((3, 2)), np.ones(3)),
            (("a",), np.array([[1.0], [np.nan], [2.0]]), np.ones(3)),
        ]
        for names, X, y in cases:
            with self.subTest(names=names, shape=X.shape):
                with self.assertRaises(ContractViolation):
                    Dataset(dates, names, X, y)

    def test_raw_series_order(self):
        with self.assertRaises(SchemaError):
            RawSeries("x", pd.DatetimeIndex(["2020-01-02", "2020-01-01"]), np.ones(2))

    def test_select_and_take(self):
        d = Dataset.test_value()
        self.assertEqual(d.take(np.array([1, 2])).y.tolist(), [0.0, 1.0])
        with self.assertRaises(ContractViolation):
            d.select_features(["nope"])


class TestForestConfig(unittest.TestCase):
    def test_inbag_size_is_exact(self):
        """Two thirds of 3k rows is exactly 2k despite 2/3 not being representable."""
        cfg = ForestConfig()
        for k in (1, 100, 1000, 1048):
            with self.subTest(k=k):
                self.assertEqual(cfg.inbag_size(3 * k), 2 * k)

    def test_default_mtry(self):
        cfg = ForestConfig()
        self.assertEqual(cfg.resolve_mtry(11), 4)
        self.assertEqual(cfg.resolve_mtry(1), 1)
        with self.assertRaises(ConfigError):
            ForestConfig(mtry=5).resolve_mtry(3)

    def test_bounds(self):
        for kwargs in ({"n_trees": 0}, {"min_split_size": 1}, {"subsample_fraction": 0.0},
                       {"subsample_fraction": 1.5}, {"seed": -1}):
            with self.subTest(**kwargs):
                with self.assertRaises(ValidationError):
                    ForestConfig(**kwargs)

    def test_summary(self):
        self.assertEqual(ForestConfig().summary(), "N=1000 p=10 mtry=d/3 f=0.6667 subsample")


class TestAnalysisTypes(unittest.TestCase):
    def test_importance_lengths(self):
        with self.assertRaises(ValidationError):
            ImportanceReport(feature_names=["a"], raw=[1.0, 2.0])
        with self.assertRaises(ValidationError):
            ImportanceReport(feature_names=["a"], raw=[-1.0])

    def test_grid_must_increase(self):
        with self.assertRaises(ValidationError):
            PartialEffectGrid(features=["a"], grids=[[1.0, 1.0]], effects=[0.0, 0.0], baseline={})

    def test_linear_report(self):
        report = LinearModel.test_value().report()
        self.assertEqual(report, {"x1": 2.0, "x2": -1.0, "intercept": 0.0, "rmse": 0.0})


class TestDgpConfig(unittest.TestCase):
    def test_invalid_terms(self):
        cases = [
            {"linear": [0.1]},
            {"hinge_feature": "oil"},
            {"interaction": ("vix", "vix")},
            {"regime_feature": "vix"},
            {"regime_feature": "vix", "regime_start": 5000},
            {"noise_std": -0.1},
        ]
        for kwargs in cases:
            with self.subTest(**{k: str(v) for k, v in kwargs.items()}):
                with self.assertRaises(ValidationError):
                    DgpConfig(**kwargs)

    def test_linear_only(self):
        cfg = DgpConfig.linear_only()
        self.assertIsNone(cfg.hinge_feature)
        self.assertIsNone(cfg.interaction)
        self.assertEqual(cfg.noise_std, 0.0)


class TestExperimentConfig(unittest.TestCase):
    def test_defaults(self):
        cfg = ExperimentConfig.test_value()
        self.assertEqual(ExperimentConfig(synth=DgpConfig()).horizons, [22, 44, 66])
        self.assertEqual(cfg.checkpoints(), [1, 5, 8])

    def test_zero_horizon(self):
        with self.assertRaisesRegex(ConfigError, "horizon"):
            ExperimentConfig.from_dict({"synth": {}, "horizons": [0]})

    def test_exactly_one_source(self):
        for payload in ({}, {"synth": {}, "dataset_csv": "d.csv"}):
            with self.subTest(payload=payload):
                with self.assertRaises(ConfigError):
                    ExperimentConfig.from_dict(payload)

    def test_duplicate_range_names(self):
        ranges = [{"name": "a", "start": "2010-01-01", "end": "2011-01-01"}] * 2
        with self.assertRaises(ConfigError):
            ExperimentConfig.from_dict({"synth": {}, "date_ranges": ranges})

    def test_manifest_is_unwrapped(self):
        cfg = ExperimentConfig.test_value()
        manifest = {"manifest_version": 1, "config": cfg.model_dump(mode="json"), "seed": 3}
        self.assertEqual(ExperimentConfig.from_dict(json.loads(json.dumps(manifest))), cfg)

    def test_seed_override_reaches_the_generator(self):
        cfg = ExperimentConfig.test_value().with_overrides(seed=42, output_dir="elsewhere")
        self.assertEqual(cfg.forest.seed, 42)
        self.assertEqual(cfg.synth.seed, 42)
        self.assertEqual(cfg.output_dir, "elsewhere")

    def test_explicit_checkpoints(self):
        cfg = ExperimentConfig.from_dict({"synth": {}, "forest": {"n_trees": 50},
                                          "mse_checkpoints": [100, 10, 1, 10]})
        self.assertEqual(cfg.checkpoints(), [1, 10])

    def test_pdp_request(self):
        self.assertEqual(PdpRequest(features=["vix", "ust2y"]).file_stem(), "pdp_vix__ust2y")
        with self.assertRaises(ValidationError):
            PdpRequest(features=["vix", "vix"])
        with self.assertRaises(ValidationError):
            PdpRequest(features=["vix"], grid2=[0.0])


class TestErrors(unittest.TestCase):
    def test_stage_error_keeps_cause_exit_code(self):
        err = StageError("data", SchemaError("bad header"))
        self.assertEqual(err.exit_code, EXIT_DATA)
        self.assertIn("stage 'data' failed", str(err))
        self.assertEqual(StageError("fit", ConfigError("x")).exit_code, EXIT_CONFIG)


if __name__ == "__main__":
    unittest.main()
