import math
from enum import Enum

from pydantic import BaseModel, Field, model_validator

MONTH_ROWS = 22


class ImportanceReport(BaseModel):
    """Split-based (SSE reduction) importance per feature."""
    feature_names: list[str]
    raw: list[float]
    normalized: list[float] | None = Field(None, description="Absent when no tree ever split")
    degenerate: bool = False

    @model_validator(mode="after")
    def _check_lengths(self) -> "ImportanceReport":
        if len(self.raw) != len(self.feature_names):
            raise ValueError("raw scores and feature names differ in length")
        if self.normalized is not None and len(self.normalized) != len(self.feature_names):
            raise ValueError("normalized scores and feature names differ in length")
        if any(r < 0 for r in self.raw):
            raise ValueError("raw importance must be non-negative")
        return self

    def score(self, feature: str) -> float:
        values = self.normalized if self.normalized is not None else [0.0] * len(self.raw)
        return values[self.feature_names.index(feature)]

    def ranked(self) -> list[tuple[str, float, float]]:
        """(feature, raw, normalized) sorted descending by normalized score, ties by name."""
        values = self.normalized if self.normalized is not None else [0.0] * len(self.raw)
        rows = list(zip(self.feature_names, self.raw, values))
        return sorted(rows, key=lambda r: (-r[2], r[0]))

    @staticmethod
    def test_value() -> "ImportanceReport":
        return ImportanceReport(feature_names=["a", "b", "c"], raw=[2.0, 1.0, 1.0],
                                normalized=[0.5, 0.25, 0.25])


class PartialEffectGrid(BaseModel):
    features: list[str] = Field(..., min_length=1, max_length=2)
    grids: list[list[float]]
    effects: list[float] | list[list[float]]
    baseline: dict[str, float]

    @model_validator(mode="after")
    def _check_grid(self) -> "PartialEffectGrid":
        if len(self.grids) != len(self.features):
            raise ValueError("one grid per feature is required")
        for grid in self.grids:
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError("grid must be strictly increasing")
        flat = [v for row in self.effects for v in (row if isinstance(row, list) else [row])]
        if not all(math.isfinite(v) for v in flat):
            raise ValueError("partial effects must be finite")
        return self

    @property
    def is_2d(self) -> bool:
        return len(self.features) == 2


class ForecastSpec(BaseModel):
    horizon: int = Field(MONTH_ROWS, ge=1, description="Rows ahead; 22, 44, 66 are the one-to-three month cases")

    def label(self) -> str:
        if self.horizon % MONTH_ROWS == 0:
            months = self.horizon // MONTH_ROWS
            return f"{months} month{'s' if months > 1 else ''} ahead"
        return f"{self.horizon} rows ahead"


class RatioBasis(str, Enum):
    in_sample = "in_sample"          # fit comparison: ML in-sample over baseline
    out_of_sample = "out_of_sample"  # forecasting: ML out-of-sample over baseline


class EvalRow(BaseModel):
    model: str
    config: str = ""
    rmse_in_sample: float = Field(..., ge=0.0)
    rmse_oob: float | None = None
    baseline_ols: float | None = None
    baseline_ar1: float | None = None
    ratio_ols: float | None = None
    ratio_ar1: float | None = None
    min_split_size: int | None = None
    n_trees: int | None = None
    horizon: int | None = None
    flags: list[str] = Field(default_factory=list)


class EvalTable(BaseModel):
    basis: RatioBasis = RatioBasis.in_sample
    rows: list[EvalRow] = Field(default_factory=list)

    def forest_rows(self) -> list[EvalRow]:
        return [r for r in self.rows if r.n_trees is not None]


class LinearModel(BaseModel):
    feature_names: list[str]
    coefficients: list[float]
    intercept: float
    rmse_in_sample: float = Field(..., ge=0.0)
    n_rows: int = 0

    @model_validator(mode="after")
    def _check_lengths(self) -> "LinearModel":
        if len(self.coefficients) != len(self.feature_names):
            raise ValueError("coefficient count must equal feature count")
        return self

    def report(self) -> dict[str, float]:
        out = dict(zip(self.feature_names, self.coefficients))
        out["intercept"] = self.intercept
        out["rmse"] = self.rmse_in_sample
        return out

    @staticmethod
    def test_value() -> "LinearModel":
        return LinearModel(feature_names=["x1", "x2"], coefficients=[2.0, -1.0], intercept=0.0,
                           rmse_in_sample=0.0, n_rows=10)
