import logging

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.contracts.dataset_contracts import (
    DailyPanel,
    Dataset,
    MOMENTUM_FEATURE,
    TransformKind,
    TransformSpec,
)
from src.contracts.errors import ContractViolation, CoverageError, DomainError

logger = logging.getLogger(__name__)

MOVING_AVERAGE_DAYS = 7


def zero_safe_covid_transform(deaths) -> np.ndarray:
    """ln(1 + mean of the trailing 7 panel rows); rows before the seventh average what is available.

    The window counts rows of the business-day panel, not calendar days, so it
    spans about nine calendar days and a holiday carried forward by the panel
    counts as its own row.
    """
    deaths = np.asarray(deaths, dtype=float)
    if deaths.size and (not np.all(np.isfinite(deaths)) or np.any(deaths < 0)):
        raise DomainError("casualty counts must be finite and non-negative")
    if deaths.size == 0:
        return deaths.copy()
    padded = np.concatenate([np.full(MOVING_AVERAGE_DAYS - 1, np.nan), deaths])
    windows = sliding_window_view(padded, MOVING_AVERAGE_DAYS)
    moving_average = np.nanmean(windows, axis=1)
    return np.log1p(moving_average)


def _transformed_level(panel: DailyPanel, name: str, kind: TransformKind) -> np.ndarray:
    values = panel.column(name)
    if kind == TransformKind.log:
        bad = values <= 0
        if np.any(bad):
            first = panel.calendar[np.flatnonzero(bad)[0]]
            raise DomainError(f"variable '{name}' is non-positive on {first}; cannot take logs")
        return np.log(values)
    if kind == TransformKind.zero_safe_log:
        try:
            return zero_safe_covid_transform(values)
        except DomainError:
            first = panel.calendar[np.flatnonzero(values < 0)[0]]
            raise DomainError(f"variable '{name}' is negative on {first}") from None
    return values


def _window_change(level: np.ndarray, window: int) -> np.ndarray:
    change = np.full(level.shape, np.nan)
    change[window:] = level[window:] - level[:-window]
    return change


def build_features(panel: DailyPanel, spec: TransformSpec, target: str | None = None) -> Dataset:
    """Turn aligned levels into window changes; row t pairs features with the target change.

    Changes are taken over `spec.window` panel rows. With momentum on, the
    target's own change from t-2w to t-w is appended as the last feature.
    Leading rows without every lag are dropped.
    """
    target = spec.resolve_target(target)
    features = spec.feature_variables(target)
    missing = [v for v in features + [target] if v not in panel.frame.columns]
    if missing:
        raise ContractViolation(f"panel lacks variables {missing}")

    window = spec.window
    first_row = window * (2 if spec.momentum else 1)
    if len(panel) <= first_row:
        raise CoverageError(f"panel has {len(panel)} rows; at least {first_row + 1} are needed "
                            f"for window {window}{' with momentum' if spec.momentum else ''}")

    target_level = _transformed_level(panel, target, spec.variables[target].transform)
    target_change = _window_change(target_level, window)

    columns = []
    for name in features:
        level = _transformed_level(panel, name, spec.variables[name].transform)
        columns.append(_window_change(level, window)[first_row:])
    names = list(features)
    if spec.momentum:
        columns.append(target_change[first_row - window:len(panel) - window])
        names.append(MOMENTUM_FEATURE)

    X = np.column_stack(columns) if columns else np.empty((len(panel) - first_row, 0))
    logger.info(f"built {X.shape[0]} rows x {X.shape[1]} features for target '{target}'")
    return Dataset(
        dates=panel.calendar[first_row:],
        feature_names=tuple(names),
        X=X,
        y=target_change[first_row:],
        target_name=target,
    )
