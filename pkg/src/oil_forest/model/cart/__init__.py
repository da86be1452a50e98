from .split_search import best_split, best_split_sorted, node_sse, presort, SSE_TOLERANCE
from .regression_tree import dump_tree, grow_tree, grow_tree_arrays, predict_tree, predict_tree_matrix

__all__ = [
    "best_split",
    "best_split_sorted",
    "presort",
    "node_sse",
    "SSE_TOLERANCE",
    "grow_tree",
    "grow_tree_arrays",
    "predict_tree",
    "predict_tree_matrix",
    "dump_tree",
]
