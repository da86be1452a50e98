import logging
import math
from typing import Literal, Sequence

import numpy as np
import pandas as pd

from src.contracts.analysis_contracts import EvalTable, ForecastSpec, RatioBasis
from src.contracts.dataset_contracts import Dataset, MOMENTUM_FEATURE
from src.contracts.errors import ContractViolation, CoverageError, DomainError
from src.contracts.forest_contracts import ForestConfig
from ..forest.random_forest import PoolKind, fit_forest, predict
from ..linear.least_squares import fit_ar1, fit_ols, rmse
from .comparison import FOREST, compare, eval_row

logger = logging.getLogger(__name__)

ForecastMode = Literal["oob", "holdout"]


def make_forecast_dataset(d: Dataset, spec: ForecastSpec, price: pd.Series) -> Dataset:
    """Keep the features at row t and replace the target with ln P(t+h) - ln P(t).

    `price` is the raw target level on the panel calendar; t+h counts calendar rows,
    so rows whose t+h falls past the end of the calendar are dropped.
    """
    price = price.sort_index()
    if (price <= 0).any():
        bad = price.index[price <= 0][0]
        raise DomainError(f"non-positive price {price[bad]} on {bad.date()} under log")
    positions = price.index.get_indexer(pd.DatetimeIndex(d.dates))
    if (positions < 0).any():
        raise CoverageError("price series lacks dataset dates", list(d.dates[positions < 0]))
    log_p = np.log(price)
    forward = (log_p.shift(-spec.horizon) - log_p).to_numpy()[positions]
    keep = ~np.isnan(forward)
    if not keep.any():
        raise CoverageError(f"horizon {spec.horizon} exceeds the {len(price)}-row panel")
    shifted = d.take(np.flatnonzero(keep))
    return shifted.with_target(forward[keep])


def holdout_split(d: Dataset, fraction: float) -> tuple[Dataset, Dataset]:
    """Chronological split: the last `fraction` of rows are held out."""
    n_test = int(math.ceil(fraction * d.n_rows))
    if not 0 < n_test < d.n_rows:
        raise ContractViolation(f"holdout fraction {fraction} leaves an empty side for {d.n_rows} rows")
    cut = d.n_rows - n_test
    return d.take(np.arange(cut)), d.take(np.arange(cut, d.n_rows))


def _rmse(residuals: np.ndarray) -> float:
    return float(np.sqrt(np.mean(residuals * residuals)))


def forecast_study(d: Dataset, price: pd.Series, horizons: Sequence[int], cfg: ForestConfig,
                   mode: ForecastMode = "oob", holdout_fraction: float = 0.2,
                   workers: int = 1, pool: PoolKind = "process") -> EvalTable:
    """One forest per horizon, compared against OLS and AR(1) fitted on the same shifted rows.

    In "oob" mode the out-of-sample RMSE is the per-tree out-of-bag estimate and the
    baselines are scored in sample. In "holdout" mode every model is fitted on the first
    part of the sample and scored on the held-out tail.
    """
    rows = []
    for h in horizons:
        spec = ForecastSpec(horizon=h)
        dh = make_forecast_dataset(d, spec, price)
        logger.info(f"forecast {spec.label()}: {dh.n_rows} rows, mode={mode}")
        if mode == "oob":
            m = fit_forest(dh, cfg, workers, pool)
            ar1 = fit_ar1(dh) if MOMENTUM_FEATURE in dh.feature_names else None
            table = compare(m, fit_ols(dh), ar1, dh, RatioBasis.out_of_sample,
                            horizon=h, include_baselines=False)
            rows.extend(table.rows)
            continue
        if mode != "holdout":
            raise ContractViolation(f"unknown forecast mode '{mode}'")
        train, test = holdout_split(dh, holdout_fraction)
        m = fit_forest(train, cfg, workers, pool)
        rows.append(eval_row(
            FOREST,
            rmse_in_sample=_rmse(predict(m, train.X) - train.y),
            rmse_oob=_rmse(predict(m, test.X) - test.y),
            baseline_ols=rmse(fit_ols(train), test),
            baseline_ar1=rmse(fit_ar1(train), test) if MOMENTUM_FEATURE in train.feature_names else None,
            basis=RatioBasis.out_of_sample,
            config=f"{cfg.summary()} holdout={holdout_fraction:g}",
            min_split_size=cfg.min_split_size,
            n_trees=cfg.n_trees,
            horizon=h,
        ))
    return EvalTable(basis=RatioBasis.out_of_sample, rows=rows)
