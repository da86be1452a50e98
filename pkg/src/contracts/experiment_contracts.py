import json
from datetime import date
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError
from .forest_contracts import ForestConfig
from .synth_contracts import DgpConfig

DEFAULT_SWEEP_SIZES = [4, 5, 6, 8, 10, 20, 30, 40]
MANIFEST_VERSION = 1


class DateRange(BaseModel):
    name: str
    start: date
    end: date

    @model_validator(mode="after")
    def _check_order(self) -> "DateRange":
        if self.start > self.end:
            raise ValueError(f"range '{self.name}' starts after it ends")
        return self


class PdpRequest(BaseModel):
    """One or two features; a missing grid means 41 points over the observed range."""
    features: list[str] = Field(..., min_length=1, max_length=2)
    grid: list[float] | None = None
    grid2: list[float] | None = None

    @model_validator(mode="after")
    def _check_features(self) -> "PdpRequest":
        if len(self.features) == 2 and self.features[0] == self.features[1]:
            raise ValueError("a 2D partial effect needs two distinct features")
        if len(self.features) == 1 and self.grid2 is not None:
            raise ValueError("grid2 is only meaningful for a 2D request")
        return self

    def file_stem(self) -> str:
        return "pdp_" + "__".join(self.features)


class SeriesSource(BaseModel):
    """Raw series files (variable name -> CSV path) plus the transform spec that turns them into a dataset."""
    files: dict[str, str] = Field(..., min_length=1)
    transform_spec: str
    calendar_source: str

    @model_validator(mode="after")
    def _check_calendar(self) -> "SeriesSource":
        if self.calendar_source not in self.files:
            raise ValueError(f"calendar source '{self.calendar_source}' has no series file")
        return self


class ExperimentConfig(BaseModel):
    series: SeriesSource | None = None
    synth: DgpConfig | None = None
    dataset_csv: str | None = None
    price_csv: str | None = Field(None, description="Target price levels for forecasting from a dataset CSV")
    target: str | None = Field(None, description="Overrides the transform spec's target, e.g. wti")
    forest: ForestConfig = Field(default_factory=ForestConfig)
    date_ranges: list[DateRange] = Field(default_factory=list)
    horizons: list[int] = Field(default_factory=lambda: [22, 44, 66])
    forecast_mode: Literal["oob", "holdout"] = "oob"
    holdout_fraction: float = Field(0.2, gt=0.0, lt=1.0)
    pdp: list[PdpRequest] = Field(default_factory=list)
    sweep_p: list[int] = Field(default_factory=lambda: list(DEFAULT_SWEEP_SIZES))
    sweep_trees: list[int] | None = None
    mse_checkpoints: list[int] | None = None
    output_dir: str = "out"
    model_path: str | None = Field(None, description="Serialized forest to reuse instead of refitting")

    @field_validator("horizons")
    @classmethod
    def _check_horizons(cls, horizons: list[int]) -> list[int]:
        bad = [h for h in horizons if h < 1]
        if bad:
            raise ValueError(f"forecast horizons must be positive row counts, got {bad}")
        return horizons

    @field_validator("sweep_p")
    @classmethod
    def _check_sweep(cls, p_values: list[int]) -> list[int]:
        if any(p < 2 for p in p_values):
            raise ValueError("minimum splitting-node sizes must be at least 2")
        return p_values

    @model_validator(mode="after")
    def _one_source(self) -> "ExperimentConfig":
        sources = [s for s in (self.series, self.synth, self.dataset_csv) if s is not None]
        if len(sources) != 1:
            raise ValueError("exactly one data source (series, synth or dataset_csv) is required")
        names = [r.name for r in self.date_ranges]
        if len(set(names)) != len(names):
            raise ValueError("date range names must be unique")
        return self

    def checkpoints(self) -> list[int]:
        if self.mse_checkpoints is not None:
            return sorted(set(c for c in self.mse_checkpoints if 1 <= c <= self.forest.n_trees))
        n = self.forest.n_trees
        steps = [c for c in (1, 5, 10, 25, 50, 100, 200, 300, 500, 750, 1000, 2000, 5000) if c < n]
        return steps + [n]

    def with_overrides(self, seed: int | None = None, output_dir: str | None = None) -> "ExperimentConfig":
        payload = self.model_dump(mode="json")
        if seed is not None:
            payload["forest"]["seed"] = seed
            if payload.get("synth") is not None:
                payload["synth"]["seed"] = seed
        if output_dir is not None:
            payload["output_dir"] = output_dir
        return ExperimentConfig.from_dict(payload)

    @staticmethod
    def from_dict(payload: dict[str, Any]) -> "ExperimentConfig":
        # a run manifest wraps the config it was produced from
        if "manifest_version" in payload and "config" in payload:
            payload = payload["config"]
        try:
            return ExperimentConfig.model_validate(payload)
        except ValidationError as e:
            raise ConfigError(f"invalid experiment config: {e}") from e

    @staticmethod
    def from_json(path: Path | str) -> "ExperimentConfig":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        if not isinstance(payload, dict):
            raise ConfigError("experiment config must be a JSON object")
        return ExperimentConfig.from_dict(payload)

    @staticmethod
    def test_value() -> "ExperimentConfig":
        return ExperimentConfig(
            synth=DgpConfig(n_rows=240, seed=3),
            forest=ForestConfig(n_trees=8, min_split_size=10, seed=3),
            horizons=[22],
            sweep_p=[5, 20],
        )
