import logging
from typing import Iterable, Literal

import numpy as np
import pandas as pd

from src.contracts.dataset_contracts import DailyPanel, RawSeries
from src.contracts.errors import ContractViolation, CoverageError

logger = logging.getLogger(__name__)

MAX_CARRY_DAYS = 5
Frequency = Literal["daily", "monthly"]


def infer_frequency(series: RawSeries) -> Frequency:
    """Series whose typical spacing exceeds the carry limit are low-frequency."""
    if len(series) < 2:
        return "daily"
    spacing = np.diff(series.dates.astype(np.int64))
    return "monthly" if float(np.median(spacing)) > MAX_CARRY_DAYS else "daily"


def _carry_forward(series: RawSeries, calendar: pd.DatetimeIndex) -> np.ndarray:
    observed = series.to_pandas()
    aligned = observed.reindex(calendar, method="ffill")
    last_seen = pd.Series(observed.index, index=observed.index).reindex(calendar, method="ffill")
    stale_days = (calendar.to_series() - last_seen).dt.days
    uncovered = last_seen.isna() | (stale_days > MAX_CARRY_DAYS)
    if uncovered.any():
        bad = [d.date() for d in calendar[uncovered.to_numpy()]]
        raise CoverageError(f"series '{series.name}' has gaps longer than {MAX_CARRY_DAYS} days", bad)
    return aligned.to_numpy(dtype=float)


def _interpolate(series: RawSeries, calendar: pd.DatetimeIndex) -> np.ndarray:
    # linear in level between knots, flat beyond the first and last observation
    knots = series.dates.astype(np.int64)
    days = calendar.values.astype("datetime64[D]").astype(np.int64)
    return np.interp(days, knots, series.values)


def align_and_interpolate(series: Iterable[RawSeries], calendar_source: str,
                          frequencies: dict[str, Frequency] | None = None) -> DailyPanel:
    """Align every series to the business days of `calendar_source`.

    Daily series are matched on exact dates and carry their last observation
    across holidays of at most MAX_CARRY_DAYS calendar days. Low-frequency
    series are interpolated linearly in value between their observation dates.
    """
    by_name = {s.name: s for s in series}
    if calendar_source not in by_name:
        raise ContractViolation(f"calendar source '{calendar_source}' is not among the series")
    frequencies = frequencies or {}
    calendar = pd.DatetimeIndex(by_name[calendar_source].dates, name="date")
    calendar_days = by_name[calendar_source].dates

    columns: dict[str, np.ndarray] = {}
    for name, s in by_name.items():
        if s.dates[-1] < calendar_days[0] or s.dates[0] > calendar_days[-1]:
            raise CoverageError(f"series '{name}' does not overlap the calendar "
                                f"{calendar[0].date()}..{calendar[-1].date()}")
        frequency = frequencies.get(name) or infer_frequency(s)
        if frequency == "monthly":
            columns[name] = _interpolate(s, calendar)
        else:
            columns[name] = _carry_forward(s, calendar)
        logger.debug(f"aligned '{name}' as {frequency} series ({len(s)} observations)")

    return DailyPanel(pd.DataFrame(columns, index=calendar))
