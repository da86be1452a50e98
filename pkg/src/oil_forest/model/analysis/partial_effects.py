"""Partial effects: forest predictions on synthetic rows that vary one or two features
while every other feature sits at its sample mean."""
import logging
from typing import Sequence

import numpy as np

from src.contracts.analysis_contracts import PartialEffectGrid
from src.contracts.dataset_contracts import Dataset
from src.contracts.errors import ContractViolation
from src.contracts.forest_contracts import ForestModel
from ..forest.random_forest import predict

logger = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 41
RANGE_MARGIN = 0.10


def _feature_column(m: ForestModel, d: Dataset, feature: str) -> int:
    if tuple(d.feature_names) != tuple(m.feature_names):
        raise ContractViolation("dataset features do not match the model's")
    if feature not in m.feature_names:
        raise ContractViolation(f"unknown feature '{feature}'")
    return m.feature_names.index(feature)


def default_grid(d: Dataset, feature: str, n_points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Equally spaced points spanning the observed range of `feature`."""
    col = d.X[:, d.feature_index(feature)]
    lo, hi = float(col.min()), float(col.max())
    if hi == lo:
        return np.array([lo])
    return np.linspace(lo, hi, n_points)


def _check_grid(d: Dataset, j: int, grid: Sequence[float]) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ContractViolation("grid must be a non-empty sequence")
    if np.any(np.diff(grid) <= 0):
        raise ContractViolation("grid must be strictly increasing")
    col = d.X[:, j]
    lo, hi = float(col.min()), float(col.max())
    margin = RANGE_MARGIN * (hi - lo)
    if grid[0] < lo - margin or grid[-1] > hi + margin:
        raise ContractViolation(f"grid for '{d.feature_names[j]}' leaves the observed range "
                                f"[{lo:.6g}, {hi:.6g}] extended by 10%")
    return grid


def _baseline(d: Dataset) -> np.ndarray:
    return d.X.mean(axis=0)


def partial_effect_1d(m: ForestModel, d: Dataset, feature: str,
                      grid: Sequence[float] | None = None) -> PartialEffectGrid:
    j = _feature_column(m, d, feature)
    grid = _check_grid(d, j, default_grid(d, feature) if grid is None else grid)
    means = _baseline(d)
    rows = np.tile(means, (grid.size, 1))
    rows[:, j] = grid
    effects = predict(m, rows)
    return PartialEffectGrid(
        features=[feature],
        grids=[grid.tolist()],
        effects=effects.tolist(),
        baseline=dict(zip(m.feature_names, means.tolist())),
    )


def partial_effect_2d(m: ForestModel, d: Dataset, f1: str, f2: str,
                      grid1: Sequence[float] | None = None,
                      grid2: Sequence[float] | None = None) -> PartialEffectGrid:
    """effects[i][j] is the prediction with f1 = grid1[i] and f2 = grid2[j]; the full product is evaluated."""
    if f1 == f2:
        raise ContractViolation("a 2D partial effect needs two distinct features")
    j1, j2 = _feature_column(m, d, f1), _feature_column(m, d, f2)
    grid1 = _check_grid(d, j1, default_grid(d, f1) if grid1 is None else grid1)
    grid2 = _check_grid(d, j2, default_grid(d, f2) if grid2 is None else grid2)
    means = _baseline(d)
    g1, g2 = np.meshgrid(grid1, grid2, indexing="ij")
    rows = np.tile(means, (g1.size, 1))
    rows[:, j1] = g1.ravel()
    rows[:, j2] = g2.ravel()
    effects = predict(m, rows).reshape(g1.shape)
    logger.debug(f"2D partial effect {f1} x {f2} on {g1.shape[0]}x{g1.shape[1]} grid")
    return PartialEffectGrid(
        features=[f1, f2],
        grids=[grid1.tolist(), grid2.tolist()],
        effects=effects.tolist(),
        baseline=dict(zip(m.feature_names, means.tolist())),
    )


def side_slopes(grid: Sequence[float], effects: Sequence[float], pivot: float = 0.0) -> tuple[float, float]:
    """Least-squares slopes of the curve left and right of `pivot` (each side needs two points)."""
    grid = np.asarray(grid, dtype=float)
    effects = np.asarray(effects, dtype=float)
    slopes = []
    for mask in (grid <= pivot, grid >= pivot):
        if mask.sum() < 2:
            raise ContractViolation(f"fewer than two grid points on one side of {pivot}")
        slopes.append(float(np.polyfit(grid[mask], effects[mask], 1)[0]))
    return slopes[0], slopes[1]


def effect_rows(pd_grid: PartialEffectGrid) -> list[tuple[float, ...]]:
    """Long-form rows: (grid, effect) in 1D, (g1, g2, effect) in 2D."""
    if not pd_grid.is_2d:
        return list(zip(pd_grid.grids[0], pd_grid.effects))
    return [(a, b, pd_grid.effects[i][k])
            for i, a in enumerate(pd_grid.grids[0])
            for k, b in enumerate(pd_grid.grids[1])]
