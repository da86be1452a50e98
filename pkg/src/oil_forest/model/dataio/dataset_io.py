import datetime
from pathlib import Path

import numpy as np
import pandas as pd

from src.contracts.dataset_contracts import ColumnStats, Dataset, SummaryStats, TARGET_COLUMN
from src.contracts.errors import ContractViolation, EmptyRangeError, ParseError, SchemaError

DATE_FORMAT = "%Y-%m-%d"


def _as_day(value: datetime.date | str | np.datetime64) -> np.datetime64:
    return np.datetime64(pd.Timestamp(value).date(), "D")


def filter_dates(d: Dataset, start, end) -> Dataset:
    """Keep rows with start <= date <= end (inclusive on both sides)."""
    lo, hi = _as_day(start), _as_day(end)
    if lo > hi:
        raise ContractViolation(f"range start {lo} is after its end {hi}")
    keep = (d.dates >= lo) & (d.dates <= hi)
    if not keep.any():
        raise EmptyRangeError(f"no rows between {lo} and {hi}")
    return d.take(np.flatnonzero(keep))


def summarize(d: Dataset) -> SummaryStats:
    """Mean, sample standard deviation (n-1), min and max per feature and for the target."""
    if d.n_rows == 0:
        raise ContractViolation("cannot summarize an empty dataset")
    columns = {}
    ddof = 1 if d.n_rows > 1 else 0
    for name, values in zip(d.feature_names + (d.target_name,), list(d.X.T) + [d.y]):
        lo, hi = float(values.min()), float(values.max())
        # clip guards the mean against last-ulp drift outside [min, max]
        mean = float(np.clip(values.mean(), lo, hi))
        columns[name] = ColumnStats(mean=mean, std=float(values.std(ddof=ddof)), min=lo, max=hi)
    return SummaryStats(n_rows=d.n_rows, columns=columns)


def write_dataset_csv(d: Dataset, path: Path | str) -> Path:
    """`date,<features...>,target`, one row per date, floats written with round-trip precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(d.X, columns=list(d.feature_names))
    frame.insert(0, "date", pd.DatetimeIndex(d.dates).strftime(DATE_FORMAT))
    frame[TARGET_COLUMN] = d.y
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n", float_format="%.17g")
    return path


def read_dataset_csv(path: Path | str, target_name: str = TARGET_COLUMN) -> Dataset:
    path = Path(path)
    try:
        frame = pd.read_csv(path, encoding="utf-8", float_precision="round_trip")
    except (pd.errors.EmptyDataError, pd.errors.ParserError, OSError) as e:
        raise ParseError(f"{path.name}: {e}") from e
    columns = list(frame.columns)
    if len(columns) < 2 or columns[0] != "date" or columns[-1] != TARGET_COLUMN:
        raise SchemaError(f"{path.name}: header must be date,<features...>,{TARGET_COLUMN}")
    if frame.empty:
        raise ParseError(f"{path.name}: no observations")
    dates = pd.to_datetime(frame["date"], format=DATE_FORMAT, errors="coerce")
    if dates.isna().any():
        i = int(np.flatnonzero(dates.isna().to_numpy())[0])
        raise ParseError(f"{path.name}: malformed date", line=i + 2)
    try:
        values = frame[columns[1:]].to_numpy(dtype=float)
    except ValueError as e:
        raise ParseError(f"{path.name}: non-numeric cell ({e})") from e
    if not np.all(np.isfinite(values)):
        i = int(np.flatnonzero(~np.isfinite(values).all(axis=1))[0])
        raise ParseError(f"{path.name}: missing or non-finite value", line=i + 2)
    if not dates.is_monotonic_increasing or dates.duplicated().any():
        raise SchemaError(f"{path.name}: rows must be in strictly increasing date order")
    return Dataset(dates=pd.DatetimeIndex(dates), feature_names=tuple(columns[1:-1]),
                   X=values[:, :-1], y=values[:, -1], target_name=target_name)
