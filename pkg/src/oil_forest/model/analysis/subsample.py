import logging
from datetime import date
from typing import Mapping, Sequence

from src.contracts.analysis_contracts import EvalTable, ImportanceReport, RatioBasis
from src.contracts.dataset_contracts import Dataset, MOMENTUM_FEATURE
from src.contracts.errors import EmptyRangeError
from src.contracts.forest_contracts import ForestConfig
from ..dataio.dataset_io import filter_dates
from ..forest.random_forest import PoolKind, evaluate, fit_forest
from ..linear.least_squares import fit_ar1, fit_ols
from .comparison import FOREST, eval_row
from .importance import importance

logger = logging.getLogger(__name__)


def subsample_study(d: Dataset, ranges: Mapping[str, tuple[date, date]], cfg: ForestConfig,
                    workers: int = 1, pool: PoolKind = "process") -> dict[str, ImportanceReport]:
    """Refit the forest on each named date range and report its importance; empty ranges are skipped."""
    reports = {}
    for name, (start, end) in ranges.items():
        try:
            part = filter_dates(d, start, end)
        except EmptyRangeError as e:
            logger.warning(f"skipping range '{name}': {e}")
            continue
        logger.info(f"range '{name}': {part.n_rows} rows from {part.dates[0]} to {part.dates[-1]}")
        reports[name] = importance(fit_forest(part, cfg, workers, pool))
    return reports


def min_split_sweep(d: Dataset, p_values: Sequence[int], cfg: ForestConfig,
                    tree_counts: Sequence[int] | None = None, workers: int = 1,
                    pool: PoolKind = "process") -> tuple[EvalTable, dict[str, ImportanceReport]]:
    """One forest per (tree count, p), ordered by tree count then p, against fixed linear baselines.

    The importance reports are keyed "p = <p>" and come from the last tree count swept.
    """
    ols_rmse = fit_ols(d).rmse_in_sample
    ar1_rmse = fit_ar1(d).rmse_in_sample if MOMENTUM_FEATURE in d.feature_names else None
    rows, reports = [], {}
    for n_trees in (tree_counts or [cfg.n_trees]):
        for p in p_values:
            cfg_p = ForestConfig.model_validate({**cfg.model_dump(), "n_trees": int(n_trees), "min_split_size": int(p)})
            m = fit_forest(d, cfg_p, workers, pool)
            metrics = evaluate(m, d)
            rows.append(eval_row(FOREST, metrics.rmse_in_sample, metrics.rmse_oob, ols_rmse, ar1_rmse,
                                 RatioBasis.in_sample, config=cfg_p.summary(),
                                 min_split_size=int(p), n_trees=int(n_trees)))
            reports[f"p = {p}"] = importance(m)
    return EvalTable(basis=RatioBasis.in_sample, rows=rows), reports
