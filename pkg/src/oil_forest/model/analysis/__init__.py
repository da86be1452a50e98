from .comparison import compare, eval_row, render_fit_table, render_forecast_table, render_table, rmse_ratio
from .forecasting import forecast_study, holdout_split, make_forecast_dataset
from .importance import group_share, importance, render_importance_columns
from .partial_effects import default_grid, effect_rows, partial_effect_1d, partial_effect_2d, side_slopes
from .subsample import min_split_sweep, subsample_study

__all__ = [
    "compare",
    "eval_row",
    "render_fit_table",
    "render_forecast_table",
    "render_table",
    "rmse_ratio",
    "forecast_study",
    "holdout_split",
    "make_forecast_dataset",
    "group_share",
    "importance",
    "render_importance_columns",
    "default_grid",
    "effect_rows",
    "partial_effect_1d",
    "partial_effect_2d",
    "side_slopes",
    "min_split_sweep",
    "subsample_study",
]
