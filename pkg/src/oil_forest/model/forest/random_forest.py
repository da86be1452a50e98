import hashlib
import logging
import time
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from typing import Literal, Sequence

import numpy as np

from src.contracts.dataset_contracts import Dataset
from src.contracts.errors import ConfigError, ContractViolation
from src.contracts.forest_contracts import (
    EvalMetrics,
    ForestConfig,
    ForestModel,
    OobMode,
    SamplingScheme,
    TrainingFingerprint,
)
from src.contracts.tree_contracts import RegressionTree, TreeConfig
from ..cart.regression_tree import grow_tree_arrays, predict_tree_matrix

logger = logging.getLogger(__name__)

PoolKind = Literal["thread", "process"]


def tree_rng(seed: int, tree_index: int) -> np.random.Generator:
    """Stream for tree `tree_index`; depends only on (seed, index), never on scheduling."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(tree_index,)))


def data_digest(X: np.ndarray, y: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(X, dtype=float).tobytes())
    h.update(np.ascontiguousarray(y, dtype=float).tobytes())
    return h.hexdigest()


def fixed_holdout_inbag(n_rows: int, cfg: ForestConfig) -> np.ndarray:
    """One training set shared by every tree; its complement is the global holdout."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed))
    return np.sort(rng.choice(n_rows, size=cfg.inbag_size(n_rows), replace=False))


def draw_inbag(rng: np.random.Generator, n_rows: int, cfg: ForestConfig) -> np.ndarray:
    size = cfg.inbag_size(n_rows)
    if cfg.sampling == SamplingScheme.bootstrap:
        return np.sort(rng.integers(0, n_rows, size=size))
    return np.sort(rng.choice(n_rows, size=size, replace=False))


def _grow_batch(X: np.ndarray, y: np.ndarray, cfg: ForestConfig, tree_cfg: TreeConfig,
                indices: Sequence[int], shared_inbag: np.ndarray | None) -> list[tuple[RegressionTree, np.ndarray]]:
    grown = []
    for index in indices:
        rng = tree_rng(cfg.seed, index)
        inbag = shared_inbag if shared_inbag is not None else draw_inbag(rng, X.shape[0], cfg)
        grown.append((grow_tree_arrays(X, y, inbag, tree_cfg, rng), inbag))
    return grown


def _make_executor(workers: int, pool: PoolKind) -> Executor:
    if pool == "thread":
        return ThreadPoolExecutor(max_workers=workers)
    return ProcessPoolExecutor(max_workers=workers)


def fit_forest(d: Dataset, cfg: ForestConfig, workers: int = 1, pool: PoolKind = "process") -> ForestModel:
    """Grow `cfg.n_trees` trees, each on its own seeded subsample of `d`.

    Tree i draws its in-bag rows and its per-split feature subsets from
    tree_rng(cfg.seed, i), so the fitted model is identical for any worker
    count or pool kind.
    """
    n = d.n_rows
    if n == 0 or d.n_features == 0:
        raise ContractViolation("cannot fit a forest on an empty dataset")
    if n < cfg.min_split_size:
        raise ConfigError(f"{n} rows is fewer than min_split_size={cfg.min_split_size}")
    if cfg.inbag_size(n) < 1:
        raise ConfigError(f"subsample_fraction={cfg.subsample_fraction} leaves no in-bag rows for n={n}")
    tree_cfg = cfg.tree_config(d.n_features)
    shared = fixed_holdout_inbag(n, cfg) if cfg.oob_mode == OobMode.fixed_holdout else None

    start = time.time()
    workers = max(1, int(workers))
    if workers == 1:
        grown = _grow_batch(d.X, d.y, cfg, tree_cfg, range(cfg.n_trees), shared)
    else:
        batches = np.array_split(np.arange(cfg.n_trees), min(cfg.n_trees, workers * 4))
        grown = []
        with _make_executor(workers, pool) as ex:
            futures = [ex.submit(_grow_batch, d.X, d.y, cfg, tree_cfg, batch.tolist(), shared)
                       for batch in batches]
            for future in futures:
                grown.extend(future.result())
                logger.debug(f"collected {len(grown)}/{cfg.n_trees} trees")

    logger.info(f"fitted {cfg.n_trees} trees on {n} rows x {d.n_features} features "
                f"(p={cfg.min_split_size}, mtry={tree_cfg.mtry}) in {time.time() - start:.2f}s")
    return ForestModel(
        trees=tuple(t for t, _ in grown),
        inbag=tuple(b for _, b in grown),
        config=cfg,
        feature_names=d.feature_names,
        fingerprint=TrainingFingerprint(n_rows=n, seed=cfg.seed, digest=data_digest(d.X, d.y)),
    )


def predict(m: ForestModel, rows: np.ndarray) -> np.ndarray:
    """Arithmetic mean of every tree's prediction."""
    rows = np.asarray(rows, dtype=float)
    if rows.ndim == 1:
        rows = rows.reshape(1, -1)
    if rows.shape[1] != m.n_features:
        raise ContractViolation(f"model expects {m.n_features} columns, got {rows.shape[1]}")
    total = np.zeros(rows.shape[0])
    for tree in m.trees:
        total += predict_tree_matrix(tree, rows)
    return total / m.n_trees


def _check_fingerprint(m: ForestModel, d: Dataset) -> None:
    fp = m.fingerprint
    if d.n_rows != fp.n_rows or data_digest(d.X, d.y) != fp.digest:
        raise ContractViolation("dataset is not the one this forest was trained on")


def _oob_accumulate(m: ForestModel, d: Dataset) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Per tree: the out-of-bag row indices and the tree's predictions for them."""
    _check_fingerprint(m, d)
    rows, preds = [], []
    for tree, inbag in zip(m.trees, m.inbag):
        out = np.ones(d.n_rows, dtype=bool)
        out[inbag] = False
        idx = np.flatnonzero(out)
        rows.append(idx)
        preds.append(predict_tree_matrix(tree, d.X[idx]) if idx.size else np.empty(0))
    return rows, preds


def oob_predict(m: ForestModel, d: Dataset) -> tuple[np.ndarray, float]:
    """Out-of-bag predictions (NaN where no tree left the row out) and the covered fraction."""
    rows, preds = _oob_accumulate(m, d)
    total = np.zeros(d.n_rows)
    counts = np.zeros(d.n_rows, dtype=np.int64)
    for idx, p in zip(rows, preds):
        total[idx] += p
        counts[idx] += 1
    covered = counts > 0
    out = np.full(d.n_rows, np.nan)
    out[covered] = total[covered] / counts[covered]
    return out, float(covered.mean())


def _rmse(residuals: np.ndarray) -> float:
    return float(np.sqrt(np.mean(residuals * residuals)))


def evaluate(m: ForestModel, d: Dataset) -> EvalMetrics:
    oob, coverage = oob_predict(m, d)
    covered = ~np.isnan(oob)
    rmse_oob = _rmse(oob[covered] - d.y[covered]) if covered.any() else None
    return EvalMetrics(
        rmse_in_sample=_rmse(predict(m, d.X) - d.y),
        rmse_oob=rmse_oob,
        oob_coverage=coverage,
    )


def mse_curve_from_model(m: ForestModel, d: Dataset, checkpoints: Sequence[int]) -> list[tuple[int, float | None]]:
    """OOB MSE of the first N' trees for each checkpoint N', reusing the fitted trees."""
    checkpoints = [int(c) for c in checkpoints]
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ContractViolation("checkpoints must be strictly increasing")
    if checkpoints and (checkpoints[0] < 1 or checkpoints[-1] > m.n_trees):
        raise ContractViolation(f"checkpoints must lie in [1, {m.n_trees}]")
    rows, preds = _oob_accumulate(m, d)
    total = np.zeros(d.n_rows)
    counts = np.zeros(d.n_rows, dtype=np.int64)
    curve = []
    pending = iter(checkpoints)
    target = next(pending, None)
    for i, (idx, p) in enumerate(zip(rows, preds), start=1):
        if target is None:
            break
        total[idx] += p
        counts[idx] += 1
        if i == target:
            covered = counts > 0
            residual = total[covered] / counts[covered] - d.y[covered]
            curve.append((i, float(np.mean(residual * residual)) if covered.any() else None))
            target = next(pending, None)
    return curve


def mse_curve(d: Dataset, cfg: ForestConfig, checkpoints: Sequence[int], workers: int = 1,
              pool: PoolKind = "process") -> list[tuple[int, float | None]]:
    if checkpoints and max(checkpoints) > cfg.n_trees:
        raise ContractViolation(f"checkpoint beyond n_trees={cfg.n_trees}")
    return mse_curve_from_model(fit_forest(d, cfg, workers, pool), d, checkpoints)
