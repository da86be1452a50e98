from typing import Iterable

import numpy as np

from src.contracts.errors import ContractViolation
from src.contracts.tree_contracts import SplitCandidate

# relative to the parent SSE: gains below this are treated as no gain, sums within it as ties
SSE_TOLERANCE = 1e-10


def node_sse(values: np.ndarray) -> float:
    centred = values - values.mean()
    return float(centred @ centred)


def _midpoint(lower: float, upper: float) -> float:
    threshold = (lower + upper) / 2.0
    # adjacent doubles: the midpoint rounds onto `upper`, which would send it left
    return lower if threshold >= upper else threshold


def presort(X: np.ndarray, rows: np.ndarray, features: np.ndarray | None = None) -> np.ndarray:
    """Row indices of `rows` ordered by each feature, one row of the result per feature.

    The sort is stable, so equal values keep their order in `rows`.
    """
    rows = np.asarray(rows, dtype=np.int64)
    values = X[rows] if features is None else X[np.ix_(rows, features)]
    return rows[np.argsort(values.T, axis=1, kind="stable")]


def best_split_sorted(X: np.ndarray, y: np.ndarray, rows: np.ndarray, order: np.ndarray,
                      features: np.ndarray) -> SplitCandidate | None:
    """Score every cut of the ascending `features` at once.

    `order[i]` lists the node's rows sorted by `features[i]`. Running sums of
    the centred targets score all midpoints between consecutive distinct values
    of all features in one pass.
    """
    n = rows.size
    if n == 0:
        raise ContractViolation("best_split needs at least one row")
    if n < 2:
        return None

    targets = y[rows]
    mean = targets.mean()
    centred = targets - mean
    parent_sse = float(centred @ centred)
    if parent_sse <= 0.0:
        return None
    tolerance = SSE_TOLERANCE * parent_sse
    total = float(centred.sum())

    xs = X[order, features[:, None]]
    distinct = xs[:, 1:] > xs[:, :-1]
    ys = y[order] - mean
    left_sum = np.cumsum(ys, axis=1)[:, :-1]
    left_sq = np.cumsum(ys * ys, axis=1)[:, :-1]
    left_counts = np.arange(1, n, dtype=float)
    right_sum = total - left_sum
    sse_left = np.maximum(left_sq - left_sum * left_sum / left_counts, 0.0)
    sse_right = np.maximum((parent_sse - left_sq) - right_sum * right_sum / (n - left_counts), 0.0)
    after = np.where(distinct, sse_left + sse_right, np.inf)

    lowest = after.min(axis=1)
    best_sse = float(lowest.min())
    if not np.isfinite(best_sse) or parent_sse - best_sse <= tolerance:
        return None
    i = int(np.flatnonzero(lowest <= best_sse + tolerance)[0])
    k = int(np.flatnonzero(after[i] <= lowest[i] + tolerance)[0])
    sse_after = float(after[i, k])
    return SplitCandidate(feature=int(features[i]), threshold=_midpoint(float(xs[i, k]), float(xs[i, k + 1])),
                          sse_after=sse_after, sse_reduction=parent_sse - sse_after)


def best_split(X: np.ndarray, y: np.ndarray, rows: np.ndarray,
               allowed_features: Iterable[int]) -> SplitCandidate | None:
    """Exhaustive CART split search over `allowed_features` for the node holding `rows`.

    Ties go to the lowest feature index, then the lowest threshold.
    """
    rows = np.asarray(rows, dtype=np.int64)
    features = np.unique(np.fromiter((int(f) for f in allowed_features), dtype=np.int64))
    return best_split_sorted(X, y, rows, presort(X, rows, features), features)
