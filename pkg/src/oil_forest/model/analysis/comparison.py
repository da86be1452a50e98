import math

from src.contracts.analysis_contracts import EvalRow, EvalTable, ForecastSpec, LinearModel, RatioBasis
from src.contracts.dataset_contracts import Dataset
from src.contracts.forest_contracts import ForestModel
from ..forest.random_forest import evaluate
from ..linear.least_squares import rmse

FOREST = "random forest"
OLS = "OLS"
AR1 = "AR(1)"


def rmse_ratio(numerator: float | None, denominator: float | None) -> float | None:
    """numerator / denominator, or None when either side is missing or the denominator is zero."""
    if numerator is None or denominator is None:
        return None
    if denominator == 0.0 or not math.isfinite(denominator):
        return None
    return numerator / denominator


def eval_row(model: str, rmse_in_sample: float, rmse_oob: float | None,
             baseline_ols: float | None, baseline_ar1: float | None,
             basis: RatioBasis = RatioBasis.in_sample, **extra) -> EvalRow:
    numerator = rmse_in_sample if basis == RatioBasis.in_sample else rmse_oob
    flags = []
    if numerator is None:
        flags.append("no out-of-sample RMSE; ratios not computed")
    for name, base in ((OLS, baseline_ols), (AR1, baseline_ar1)):
        if base == 0.0:
            flags.append(f"zero {name} RMSE; ratio not computed")
    return EvalRow(
        model=model,
        rmse_in_sample=rmse_in_sample,
        rmse_oob=rmse_oob,
        baseline_ols=baseline_ols,
        baseline_ar1=baseline_ar1,
        ratio_ols=rmse_ratio(numerator, baseline_ols),
        ratio_ar1=rmse_ratio(numerator, baseline_ar1),
        flags=flags,
        **extra,
    )


def compare(m: ForestModel, ols: LinearModel, ar1: LinearModel | None, d: Dataset,
            basis: RatioBasis = RatioBasis.in_sample, horizon: int | None = None,
            include_baselines: bool = True) -> EvalTable:
    """RMSEs of the forest and both linear baselines on `d`, with ratios against the baselines.

    Baselines are scored in sample. The forest numerator is its in-sample RMSE
    for a fit comparison and its out-of-bag RMSE for forecasting.
    """
    metrics = evaluate(m, d)
    ols_rmse = rmse(ols, d)
    ar1_rmse = rmse(ar1, d) if ar1 is not None else None
    rows = [eval_row(FOREST, metrics.rmse_in_sample, metrics.rmse_oob, ols_rmse, ar1_rmse, basis,
                     config=m.config.summary(), min_split_size=m.config.min_split_size,
                     n_trees=m.n_trees, horizon=horizon)]
    if include_baselines:
        rows.append(eval_row(OLS, ols_rmse, None, ols_rmse, ar1_rmse, horizon=horizon))
        if ar1_rmse is not None:
            rows.append(eval_row(AR1, ar1_rmse, None, ols_rmse, ar1_rmse, horizon=horizon))
    return EvalTable(basis=basis, rows=rows)


def _cell(value: float | None, digits: int) -> str:
    return "n/a" if value is None else f"{value:.{digits}f}"


def _align(header: list[str], body: list[list[str]]) -> str:
    widths = [max(len(row[i]) for row in [header, *body]) for i in range(len(header))]
    lines = [" | ".join([row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])])
             for row in [header, *body]]
    return "\n".join(line.rstrip() for line in lines) + "\n"


def render_fit_table(table: EvalTable) -> str:
    """RMSEs by minimum splitting-node size and tree count, with AR(1) and OLS columns."""
    header = ["min obs / splitting node", "no. of reg. trees", "AR(1)", "OLS",
              "in sample", "out of bag", "RMSE ratio (rel. OLS)"]
    body = [[str(r.min_split_size), str(r.n_trees), _cell(r.baseline_ar1, 4), _cell(r.baseline_ols, 4),
             _cell(r.rmse_in_sample, 4), _cell(r.rmse_oob, 4), _cell(r.ratio_ols, 3)]
            for r in table.forest_rows()]
    return _align(header, body)


def render_forecast_table(table: EvalTable) -> str:
    """One row per horizon: forest RMSEs, then out-of-sample ratios against AR(1) and OLS."""
    header = ["forecast horizon", "in sample", "out of sample", "AR(1)", "OLS"]
    body = []
    for r in table.forest_rows():
        label = ForecastSpec(horizon=r.horizon).label() if r.horizon is not None else "contemporaneous"
        body.append([label, _cell(r.rmse_in_sample, 3), _cell(r.rmse_oob, 3),
                     _cell(r.ratio_ar1, 3), _cell(r.ratio_ols, 3)])
    return _align(header, body)


def render_table(table: EvalTable) -> str:
    if any(r.horizon is not None for r in table.forest_rows()):
        return render_forecast_table(table)
    return render_fit_table(table)
