from dataclasses import dataclass
from typing import Any

import numpy as np
from pydantic import BaseModel, Field

from .errors import ContractViolation

LEAF = -1


class TreeConfig(BaseModel):
    """Growth controls for a single regression tree."""
    min_split_size: int = Field(10, ge=2, description="Smallest node that may still be split (p)")
    mtry: int = Field(..., ge=1, description="Features drawn without replacement at each split")
    rng_seed: int = Field(0, ge=0, lt=2 ** 64)

    def check_against(self, n_features: int) -> None:
        if self.mtry > n_features:
            raise ContractViolation(f"mtry={self.mtry} exceeds the {n_features} available features")

    @staticmethod
    def test_value() -> "TreeConfig":
        return TreeConfig(min_split_size=2, mtry=1, rng_seed=7)


@dataclass(frozen=True)
class SplitCandidate:
    feature: int
    threshold: float
    sse_after: float
    sse_reduction: float


@dataclass(frozen=True)
class RegressionTree:
    """Flat node arrays; node 0 is the root and children follow in pre-order.

    Leaves carry feature == LEAF; every node keeps the mean, count and SSE of its
    training targets so the dump and the importance tally need nothing else.

    A split threshold lies strictly between the largest value sent left and the
    smallest value sent right. The one exception is two adjacent doubles, which
    have no double between them: the threshold is then the lower value itself,
    which still sends it left.
    """
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    count: np.ndarray
    sse: np.ndarray
    n_features: int
    feature_sse_reduction: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    @property
    def leaves(self) -> np.ndarray:
        return np.flatnonzero(self.feature == LEAF)

    def is_leaf(self, node: int) -> bool:
        return int(self.feature[node]) == LEAF

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for node in range(self.n_nodes):
            if not self.is_leaf(node):
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max()) if self.n_nodes else 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_features": self.n_features,
            "feature": self.feature.tolist(),
            "threshold": [None if np.isnan(t) else float(t) for t in self.threshold],
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": [float(v) for v in self.value],
            "count": self.count.tolist(),
            "sse": [float(s) for s in self.sse],
            "feature_sse_reduction": [float(s) for s in self.feature_sse_reduction],
        }

    @staticmethod
    def from_dict(payload: dict[str, Any]) -> "RegressionTree":
        try:
            return RegressionTree(
                feature=np.asarray(payload["feature"], dtype=np.int64),
                threshold=np.asarray([np.nan if t is None else t for t in payload["threshold"]], dtype=float),
                left=np.asarray(payload["left"], dtype=np.int64),
                right=np.asarray(payload["right"], dtype=np.int64),
                value=np.asarray(payload["value"], dtype=float),
                count=np.asarray(payload["count"], dtype=np.int64),
                sse=np.asarray(payload["sse"], dtype=float),
                n_features=int(payload["n_features"]),
                feature_sse_reduction=np.asarray(payload["feature_sse_reduction"], dtype=float),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ContractViolation(f"malformed tree document: {e}") from e
