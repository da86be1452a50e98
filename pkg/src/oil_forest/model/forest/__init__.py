from .random_forest import (
    draw_inbag,
    evaluate,
    fit_forest,
    mse_curve,
    mse_curve_from_model,
    oob_predict,
    predict,
    tree_rng,
)
from .serializers import dumps_json, forest_from_document, forest_to_document, load_forest, save_forest

__all__ = [
    "draw_inbag",
    "evaluate",
    "fit_forest",
    "mse_curve",
    "mse_curve_from_model",
    "oob_predict",
    "predict",
    "tree_rng",
    "dumps_json",
    "forest_from_document",
    "forest_to_document",
    "load_forest",
    "save_forest",
]
