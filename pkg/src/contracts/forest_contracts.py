import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field

from .errors import ConfigError
from .tree_contracts import RegressionTree, TreeConfig


class SamplingScheme(str, Enum):
    subsample = "subsample"      # without replacement
    bootstrap = "bootstrap"      # with replacement


class OobMode(str, Enum):
    per_tree = "per_tree"
    fixed_holdout = "fixed_holdout"


class ForestConfig(BaseModel):
    n_trees: int = Field(1000, ge=1)
    min_split_size: int = Field(10, ge=2)
    mtry: int | None = Field(None, ge=1, description="Defaults to ceil(d / 3)")
    subsample_fraction: float = Field(2.0 / 3.0, gt=0.0, le=1.0)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    sampling: SamplingScheme = SamplingScheme.subsample
    oob_mode: OobMode = OobMode.per_tree

    def resolve_mtry(self, n_features: int) -> int:
        mtry = self.mtry if self.mtry is not None else math.ceil(n_features / 3)
        if not 1 <= mtry <= n_features:
            raise ConfigError(f"mtry={mtry} must lie in [1, {n_features}]")
        return mtry

    def inbag_size(self, n_rows: int) -> int:
        # 2/3 is not representable; nudge so floor(2/3 * 3k) == 2k
        return int(math.floor(self.subsample_fraction * n_rows + 1e-9))

    def tree_config(self, n_features: int) -> TreeConfig:
        return TreeConfig(min_split_size=self.min_split_size, mtry=self.resolve_mtry(n_features),
                          rng_seed=self.seed)

    def summary(self) -> str:
        mtry = "d/3" if self.mtry is None else str(self.mtry)
        return (f"N={self.n_trees} p={self.min_split_size} mtry={mtry} "
                f"f={self.subsample_fraction:.4g} {self.sampling.value}")

    @staticmethod
    def test_value() -> "ForestConfig":
        return ForestConfig(n_trees=5, min_split_size=5, seed=11)


@dataclass(frozen=True)
class TrainingFingerprint:
    n_rows: int
    seed: int
    digest: str


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[RegressionTree, ...]
    inbag: tuple[np.ndarray, ...]
    config: ForestConfig
    feature_names: tuple[str, ...]
    fingerprint: TrainingFingerprint

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)


class EvalMetrics(BaseModel):
    rmse_in_sample: float = Field(..., ge=0.0)
    rmse_oob: float | None = Field(None, ge=0.0, description="Absent when no row has an out-of-bag tree")
    oob_coverage: float = Field(..., ge=0.0, le=1.0)

    @staticmethod
    def test_value() -> "EvalMetrics":
        return EvalMetrics(rmse_in_sample=0.0262, rmse_oob=0.0436, oob_coverage=1.0)
