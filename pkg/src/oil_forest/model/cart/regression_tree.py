import logging
from typing import Sequence

import numpy as np

from src.contracts.dataset_contracts import Dataset
from src.contracts.errors import ContractViolation
from src.contracts.tree_contracts import LEAF, RegressionTree, TreeConfig
from .split_search import best_split_sorted, presort

logger = logging.getLogger(__name__)


class _TreeBuilder:
    """Depth-first CART growth into flat node lists."""

    def __init__(self, X: np.ndarray, y: np.ndarray, cfg: TreeConfig, rng: np.random.Generator):
        self.X = X
        self.y = y
        self.cfg = cfg
        self.rng = rng
        self.n_features = X.shape[1]
        self._goes_left = np.zeros(X.shape[0], dtype=bool)
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []
        self.count: list[int] = []
        self.sse: list[float] = []

    def _add_node(self, rows: np.ndarray, parent: int, is_left: bool) -> int:
        node = len(self.feature)
        targets = self.y[rows]
        mean = float(targets.mean())
        centred = targets - mean
        self.feature.append(LEAF)
        self.threshold.append(np.nan)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(mean)
        self.count.append(int(rows.size))
        self.sse.append(float(centred @ centred))
        if parent >= 0:
            if is_left:
                self.left[parent] = node
            else:
                self.right[parent] = node
        return node

    def build(self, rows: np.ndarray) -> RegressionTree:
        # each feature is sorted once; splits stable-partition the sorted orders
        # right child pushed first so the left subtree is numbered first (pre-order)
        stack: list[tuple[np.ndarray, np.ndarray, int, bool]] = [(rows, presort(self.X, rows), -1, True)]
        while stack:
            node_rows, order, parent, is_left = stack.pop()
            node = self._add_node(node_rows, parent, is_left)
            if node_rows.size < self.cfg.min_split_size:
                continue
            allowed = np.sort(self.rng.choice(self.n_features, size=self.cfg.mtry, replace=False))
            split = best_split_sorted(self.X, self.y, node_rows, order[allowed], allowed)
            if split is None:
                continue
            goes_left = self.X[node_rows, split.feature] <= split.threshold
            self._goes_left[node_rows] = goes_left
            flags = self._goes_left[order]
            n_left = int(goes_left.sum())
            self.feature[node] = split.feature
            self.threshold[node] = split.threshold
            stack.append((node_rows[~goes_left], order[~flags].reshape(self.n_features, -1), node, False))
            stack.append((node_rows[goes_left], order[flags].reshape(self.n_features, n_left), node, True))
        return self._finish()

    def _finish(self) -> RegressionTree:
        feature = np.asarray(self.feature, dtype=np.int64)
        left = np.asarray(self.left, dtype=np.int64)
        right = np.asarray(self.right, dtype=np.int64)
        sse = np.asarray(self.sse, dtype=float)
        reduction = np.zeros(self.n_features)
        internal = np.flatnonzero(feature != LEAF)
        gains = np.maximum(sse[internal] - sse[left[internal]] - sse[right[internal]], 0.0)
        np.add.at(reduction, feature[internal], gains)
        return RegressionTree(
            feature=feature,
            threshold=np.asarray(self.threshold, dtype=float),
            left=left,
            right=right,
            value=np.asarray(self.value, dtype=float),
            count=np.asarray(self.count, dtype=np.int64),
            sse=sse,
            n_features=self.n_features,
            feature_sse_reduction=reduction,
        )


def grow_tree_arrays(X: np.ndarray, y: np.ndarray, rows: np.ndarray, cfg: TreeConfig,
                     rng: np.random.Generator | None = None) -> RegressionTree:
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        raise ContractViolation("cannot grow a tree on zero rows")
    cfg.check_against(X.shape[1])
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    return _TreeBuilder(X, y, cfg, rng).build(rows)


def grow_tree(data: Dataset, rows: np.ndarray, cfg: TreeConfig,
              rng: np.random.Generator | None = None) -> RegressionTree:
    """Grow one CART tree on `rows` of `data`.

    A node holding at least `cfg.min_split_size` rows is split on the best of
    `cfg.mtry` features drawn from `rng`; anything smaller, or without an
    SSE-reducing split, becomes a leaf predicting the mean of its targets.
    """
    return grow_tree_arrays(data.X, data.y, rows, cfg, rng)


def predict_tree(tree: RegressionTree, x: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (tree.n_features,):
        raise ContractViolation(f"expected {tree.n_features} features, got shape {x.shape}")
    node = 0
    while tree.feature[node] != LEAF:
        node = tree.left[node] if x[tree.feature[node]] <= tree.threshold[node] else tree.right[node]
    return float(tree.value[node])


def predict_tree_matrix(tree: RegressionTree, X: np.ndarray) -> np.ndarray:
    """Route all rows at once, one tree level per pass."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != tree.n_features:
        raise ContractViolation(f"expected (*, {tree.n_features}) rows, got shape {X.shape}")
    node = np.zeros(X.shape[0], dtype=np.int64)
    active = np.arange(X.shape[0])
    while active.size:
        features = tree.feature[node[active]]
        internal = features != LEAF
        active, features = active[internal], features[internal]
        if not active.size:
            break
        current = node[active]
        goes_left = X[active, features] <= tree.threshold[current]
        node[active] = np.where(goes_left, tree.left[current], tree.right[current])
    return tree.value[node]


def dump_tree(tree: RegressionTree, feature_names: Sequence[str] | None = None) -> str:
    names = list(feature_names) if feature_names is not None else [f"x{j}" for j in range(tree.n_features)]
    lines = []
    stack = [(0, 0)]
    while stack:
        node, depth = stack.pop()
        pad = "  " * depth
        stats = f"n={int(tree.count[node])}, sse={tree.sse[node]:.6g}"
        if tree.is_leaf(node):
            lines.append(f"{pad}leaf: predict {tree.value[node]:.6g} ({stats})")
            continue
        name = names[int(tree.feature[node])]
        lines.append(f"{pad}{name} <= {tree.threshold[node]:.6g} ({stats}, mean={tree.value[node]:.6g})")
        stack.append((int(tree.right[node]), depth + 1))
        stack.append((int(tree.left[node]), depth + 1))
    return "\n".join(lines) + "\n"
