from .series_loader import load_series, write_series_csv
from .panel_builder import align_and_interpolate, infer_frequency
from .feature_builder import build_features, zero_safe_covid_transform
from .dataset_io import filter_dates, read_dataset_csv, summarize, write_dataset_csv

__all__ = [
    "load_series",
    "write_series_csv",
    "align_and_interpolate",
    "infer_frequency",
    "build_features",
    "zero_safe_covid_transform",
    "filter_dates",
    "summarize",
    "read_dataset_csv",
    "write_dataset_csv",
]
