import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError, model_validator

from .errors import ConfigError, ContractViolation, SchemaError

MOMENTUM_FEATURE = "momentum"
TARGET_COLUMN = "target"


class TransformKind(str, Enum):
    """How a raw level is turned into a window change."""
    log = "log"
    level = "level"
    zero_safe_log = "zero_safe_log"


class VariableRole(str, Enum):
    feature = "feature"
    target = "target"


class VariableSpec(BaseModel):
    transform: TransformKind
    role: VariableRole = VariableRole.feature
    frequency: Literal["daily", "monthly"] | None = Field(
        None, description="Sampling frequency; inferred from observation spacing when absent")


class TransformSpec(BaseModel):
    """Per-variable transforms plus the change window and the momentum switch."""
    variables: dict[str, VariableSpec]
    window: int = Field(22, ge=1)
    momentum: bool = True

    @model_validator(mode="after")
    def _check_names(self) -> "TransformSpec":
        if not self.variables:
            raise ValueError("transform spec declares no variables")
        if MOMENTUM_FEATURE in self.variables:
            raise ValueError(f"'{MOMENTUM_FEATURE}' is reserved for the lagged target change")
        return self

    def targets(self) -> list[str]:
        return [name for name, v in self.variables.items() if v.role == VariableRole.target]

    def resolve_target(self, target: str | None) -> str:
        if target is not None:
            if target not in self.variables:
                raise ConfigError(f"target '{target}' is not declared in the transform spec")
            return target
        declared = self.targets()
        if len(declared) != 1:
            raise ConfigError(f"transform spec must declare exactly one target, found {declared}")
        return declared[0]

    def feature_variables(self, target: str) -> list[str]:
        # every other declared target (e.g. WTI while Brent is modelled) stays out of the features
        return [name for name, v in self.variables.items()
                if name != target and v.role == VariableRole.feature]

    @staticmethod
    def from_dict(payload: dict[str, Any]) -> "TransformSpec":
        payload = dict(payload)
        window = payload.pop("window", 22)
        momentum = payload.pop("momentum", True)
        try:
            return TransformSpec(variables=payload, window=window, momentum=momentum)
        except ValidationError as e:
            raise ConfigError(f"invalid transform spec: {e}") from e

    @staticmethod
    def from_json(path: Path | str) -> "TransformSpec":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read transform spec {path}: {e}") from e
        if not isinstance(payload, dict):
            raise ConfigError("transform spec must be a JSON object")
        return TransformSpec.from_dict(payload)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {name: v.model_dump(mode="json", exclude_none=True)
                               for name, v in self.variables.items()}
        out["window"] = self.window
        out["momentum"] = self.momentum
        return out

    @staticmethod
    def test_value() -> "TransformSpec":
        return TransformSpec(
            variables={
                "dollar": VariableSpec(transform=TransformKind.log),
                "ust2y": VariableSpec(transform=TransformKind.level),
                "brent": VariableSpec(transform=TransformKind.log, role=VariableRole.target),
            },
            window=22,
            momentum=True,
        )


def _as_day_array(dates) -> np.ndarray:
    return np.asarray(pd.DatetimeIndex(dates).values.astype("datetime64[D]"))


@dataclass(frozen=True)
class RawSeries:
    name: str
    dates: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        dates = _as_day_array(self.dates)
        values = np.asarray(self.values, dtype=float)
        if dates.shape != values.shape:
            raise ContractViolation(f"series '{self.name}': dates and values differ in length")
        steps = np.diff(dates.astype(np.int64))
        if np.any(steps == 0):
            dup = dates[1:][steps == 0]
            raise SchemaError(f"series '{self.name}' has duplicate date {dup[0]}")
        if np.any(steps < 0):
            raise SchemaError(f"series '{self.name}' dates are not increasing")
        if not np.all(np.isfinite(values)):
            raise SchemaError(f"series '{self.name}' contains non-finite values")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.dates)

    def to_pandas(self) -> pd.Series:
        return pd.Series(self.values, index=pd.DatetimeIndex(self.dates), name=self.name)


@dataclass(frozen=True)
class DailyPanel:
    """Business-day calendar with every raw variable aligned to it."""
    frame: pd.DataFrame

    def __post_init__(self):
        if not isinstance(self.frame.index, pd.DatetimeIndex):
            raise ContractViolation("panel index must be a DatetimeIndex")
        if self.frame.isna().to_numpy().any():
            missing = self.frame.columns[self.frame.isna().any()].tolist()
            raise ContractViolation(f"panel has missing values in {missing}")

    @property
    def calendar(self) -> np.ndarray:
        return _as_day_array(self.frame.index)

    @property
    def columns(self) -> dict[str, np.ndarray]:
        return {name: self.frame[name].to_numpy(dtype=float) for name in self.frame.columns}

    def column(self, name: str) -> np.ndarray:
        if name not in self.frame.columns:
            raise ContractViolation(f"panel has no column '{name}'")
        return self.frame[name].to_numpy(dtype=float)

    def __len__(self) -> int:
        return len(self.frame)


@dataclass(frozen=True)
class Dataset:
    dates: np.ndarray
    feature_names: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    target_name: str = TARGET_COLUMN

    def __post_init__(self):
        dates = _as_day_array(self.dates)
        X = np.ascontiguousarray(self.X, dtype=float)
        y = np.ascontiguousarray(self.y, dtype=float)
        names = tuple(self.feature_names)
        if X.ndim != 2 or X.shape[1] != len(names):
            raise ContractViolation(f"X has shape {X.shape} but {len(names)} feature names were given")
        if not (X.shape[0] == y.shape[0] == dates.shape[0]):
            raise ContractViolation("rows of X, y and dates differ")
        if len(set(names)) != len(names):
            raise ContractViolation("feature names are not unique")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ContractViolation("dataset contains non-finite entries")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def feature_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise ContractViolation(f"unknown feature '{name}'") from None

    def take(self, rows: np.ndarray) -> "Dataset":
        return Dataset(self.dates[rows], self.feature_names, self.X[rows], self.y[rows], self.target_name)

    def with_target(self, y: np.ndarray, target_name: str | None = None) -> "Dataset":
        return Dataset(self.dates, self.feature_names, self.X, y, target_name or self.target_name)

    def select_features(self, names: list[str]) -> "Dataset":
        cols = [self.feature_index(n) for n in names]
        return Dataset(self.dates, tuple(names), self.X[:, cols], self.y, self.target_name)

    @staticmethod
    def test_value() -> "Dataset":
        dates = pd.bdate_range("2010-01-04", periods=4)
        return Dataset(dates, ("x",), np.array([[1.0], [2.0], [3.0], [4.0]]),
                       np.array([0.0, 0.0, 1.0, 1.0]), "brent")


class ColumnStats(BaseModel):
    mean: float
    std: float = Field(..., ge=0.0)
    min: float
    max: float


class SummaryStats(BaseModel):
    """Per-column moments of a dataset (features first, then the target)."""
    n_rows: int
    columns: dict[str, ColumnStats] = Field(default_factory=dict)

    def render(self) -> str:
        width = max([len(c) for c in self.columns] + [8])
        lines = [f"{'variable':<{width}}  {'mean':>12}  {'std':>12}  {'min':>12}  {'max':>12}"]
        for name, s in self.columns.items():
            lines.append(f"{name:<{width}}  {s.mean:>12.4f}  {s.std:>12.4f}  {s.min:>12.4f}  {s.max:>12.4f}")
        return "\n".join(lines) + "\n"

