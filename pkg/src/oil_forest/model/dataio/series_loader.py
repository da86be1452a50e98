import logging
from pathlib import Path

import numpy as np
import pandas as pd

from src.contracts.dataset_contracts import RawSeries
from src.contracts.errors import ParseError, SchemaError

logger = logging.getLogger(__name__)

SERIES_HEADER = ["date", "value"]
DATE_FORMAT = "%Y-%m-%d"


def load_series(path: Path | str, name: str) -> RawSeries:
    """Read one `date,value` CSV into a RawSeries.

    An explicitly empty value cell (`2010-01-05,`) is an unobserved day and is
    skipped; a row with no value field at all is a parse error. Blank lines are
    ignored. Rows are returned sorted by date; a date appearing twice is a
    schema error.
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise ParseError(f"{path.name}: no observations") from None
    except pd.errors.ParserError as e:
        raise ParseError(f"{path.name}: {e}") from e
    except OSError as e:
        raise ParseError(f"{path.name}: cannot read file ({e})") from e

    header = [c.strip() for c in frame.columns]
    if header != SERIES_HEADER:
        raise SchemaError(f"{path.name}: expected header {','.join(SERIES_HEADER)}, got {','.join(header)}")
    frame.columns = SERIES_HEADER
    # header is line 1, so data row i sits on line i + 2
    frame.index = frame.index + 2
    frame = frame[~frame.isna().all(axis=1)]
    if frame.empty:
        raise ParseError(f"{path.name}: no observations")

    no_field = frame["value"].isna()
    if no_field.any():
        raise ParseError(f"{path.name}: row has no value field", line=int(frame.index[no_field.to_numpy()][0]))

    raw_dates = frame["date"].fillna("").str.strip()
    raw_values = frame["value"].str.strip()
    dates = pd.to_datetime(raw_dates, format=DATE_FORMAT, errors="coerce")
    values = pd.to_numeric(raw_values, errors="coerce")

    bad_date = dates.isna()
    if bad_date.any():
        i = int(np.flatnonzero(bad_date.to_numpy())[0])
        raise ParseError(f"{path.name}: malformed date '{raw_dates.iloc[i]}'", line=int(frame.index[i]))
    present = raw_values != ""
    bad_value = present & ~np.isfinite(values.to_numpy(dtype=float))
    if bad_value.any():
        i = int(np.flatnonzero(bad_value.to_numpy())[0])
        raise ParseError(f"{path.name}: malformed value '{raw_values.iloc[i]}'", line=int(frame.index[i]))

    kept = present.to_numpy()
    if not kept.any():
        raise ParseError(f"{path.name}: no observations")
    if (~kept).any():
        logger.debug(f"{path.name}: skipping {int((~kept).sum())} blank values")

    observed = pd.Series(values[kept].to_numpy(dtype=float), index=pd.DatetimeIndex(dates[kept]))
    observed = observed.sort_index(kind="stable")
    duplicated = observed.index.duplicated()
    if duplicated.any():
        raise SchemaError(f"{path.name}: duplicate date {observed.index[duplicated][0].date()}")
    return RawSeries(name=name, dates=observed.index, values=observed.to_numpy())


def write_series_csv(series: RawSeries, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({
        "date": pd.DatetimeIndex(series.dates).strftime(DATE_FORMAT),
        "value": [repr(float(v)) for v in series.values],
    })
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    return path
