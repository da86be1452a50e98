from dataclasses import dataclass
from datetime import date
from typing import Callable

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

from .dataset_contracts import Dataset

DEFAULT_FEATURES = [
    "dollar", "vix", "ust2y", "cesi_ae", "cesi_eme", "pmi_ae",
    "pmi_eme", "pce_core", "pnfc", "covid", "momentum",
]
# cesi_eme has no term in the default process
DEFAULT_LINEAR = [-0.020, -0.008, 0.015, 0.004, 0.0, 0.008, 0.010, 0.005, 0.012, 0.0, 0.006]


class DgpConfig(BaseModel):
    """Known data-generating process: linear terms, one hinge, one interaction, Gaussian noise."""
    n_rows: int = Field(3144, ge=2)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    feature_names: list[str] = Field(default_factory=lambda: list(DEFAULT_FEATURES))
    linear: list[float] = Field(default_factory=lambda: list(DEFAULT_LINEAR))
    hinge_feature: str | None = Field("covid", description="Adds hinge_coef * max(0, -x)")
    hinge_coef: float = 0.04
    interaction: tuple[str, str] | None = ("vix", "ust2y")
    interaction_coef: float = -0.015
    noise_std: float = Field(0.02, ge=0.0)
    autocorrelation: float = Field(0.98, ge=0.0, lt=1.0, description="AR(1) coefficient of every feature")
    regime_feature: str | None = Field(None, description="Feature whose effect switches on at regime_start")
    regime_start: int | None = Field(None, ge=0)
    regime_coef: float = 0.0
    start_date: date = date(2010, 1, 4)
    window: int = Field(22, ge=1, description="Rows per target change of the log price")
    price_start: float = Field(80.0, gt=0.0)

    @model_validator(mode="after")
    def _check_terms(self) -> "DgpConfig":
        names = self.feature_names
        if not names or len(set(names)) != len(names):
            raise ValueError("feature names must be non-empty and unique")
        if len(self.linear) != len(names):
            raise ValueError(f"{len(self.linear)} linear coefficients for {len(names)} features")
        referenced = [self.hinge_feature, self.regime_feature, *(self.interaction or ())]
        unknown = [r for r in referenced if r is not None and r not in names]
        if unknown:
            raise ValueError(f"unknown features {unknown}")
        if self.interaction is not None and self.interaction[0] == self.interaction[1]:
            raise ValueError("interaction needs two distinct features")
        if (self.regime_feature is None) != (self.regime_start is None):
            raise ValueError("regime_feature and regime_start go together")
        if self.regime_start is not None and self.regime_start >= self.n_rows:
            raise ValueError("regime_start lies beyond the sample")
        return self

    def index(self, name: str) -> int:
        return self.feature_names.index(name)

    @staticmethod
    def linear_only(n_rows: int = 200, seed: int = 0) -> "DgpConfig":
        return DgpConfig(n_rows=n_rows, seed=seed, hinge_feature=None, hinge_coef=0.0,
                         interaction=None, interaction_coef=0.0, noise_std=0.0)

    @staticmethod
    def test_value() -> "DgpConfig":
        return DgpConfig(n_rows=300, seed=7)


@dataclass(frozen=True)
class SyntheticSample:
    """A generated dataset with its noiseless truth, the realized noise and a matching price path."""
    dataset: Dataset
    true_function: Callable[..., np.ndarray]
    noise: np.ndarray
    price: pd.Series
    config: DgpConfig
