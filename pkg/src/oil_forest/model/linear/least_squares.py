import logging

import numpy as np

from src.contracts.analysis_contracts import LinearModel
from src.contracts.dataset_contracts import Dataset, MOMENTUM_FEATURE
from src.contracts.errors import ConfigError, ContractViolation, SingularityError

logger = logging.getLogger(__name__)

INTERCEPT = "intercept"
# |R_jj| below this share of the largest pivot marks column j as linearly dependent
RANK_TOLERANCE = 1e-9


def _back_substitute(R: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = R.shape[1]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - R[i, i + 1:] @ x[i + 1:]) / R[i, i]
    return x


def least_squares_qr(design: np.ndarray, y: np.ndarray, names: list[str]) -> np.ndarray:
    """Solve min ||design b - y|| through a reduced QR of the column-scaled design."""
    norms = np.linalg.norm(design, axis=0)
    zero = norms == 0.0
    scaled = design / np.where(zero, 1.0, norms)
    Q, R = np.linalg.qr(scaled, mode="reduced")
    pivots = np.abs(np.diag(R))
    dependent = zero | (pivots <= RANK_TOLERANCE * max(pivots.max(), 1.0))
    if dependent.any():
        raise SingularityError("design matrix is rank deficient; dependent columns",
                               [n for n, bad in zip(names, dependent) if bad])
    return _back_substitute(R, Q.T @ y) / norms


def fit_ols(d: Dataset) -> LinearModel:
    """OLS of the target on an intercept plus every feature of `d`."""
    if d.n_rows <= d.n_features + 1:
        raise ContractViolation(f"OLS needs more than {d.n_features + 1} rows, got {d.n_rows}")
    design = np.column_stack([np.ones(d.n_rows), d.X])
    beta = least_squares_qr(design, d.y, [INTERCEPT, *d.feature_names])
    residuals = d.y - design @ beta
    model = LinearModel(
        feature_names=list(d.feature_names),
        coefficients=[float(b) for b in beta[1:]],
        intercept=float(beta[0]),
        rmse_in_sample=float(np.sqrt(np.mean(residuals * residuals))),
        n_rows=d.n_rows,
    )
    logger.debug(f"OLS on {d.n_rows} rows: rmse={model.rmse_in_sample:.6g}")
    return model


def fit_ar1(d: Dataset) -> LinearModel:
    """Target on intercept + its own lagged window change (the momentum feature)."""
    if MOMENTUM_FEATURE not in d.feature_names:
        raise ConfigError(f"AR(1) needs the '{MOMENTUM_FEATURE}' feature; build the dataset with momentum on")
    return fit_ols(d.select_features([MOMENTUM_FEATURE]))


def linear_predict(model: LinearModel, d: Dataset) -> np.ndarray:
    try:
        cols = [d.feature_names.index(name) for name in model.feature_names]
    except ValueError:
        missing = sorted(set(model.feature_names) - set(d.feature_names))
        raise ContractViolation(f"dataset lacks model features {missing}") from None
    return model.intercept + d.X[:, cols] @ np.asarray(model.coefficients)


def rmse(model: LinearModel, d: Dataset) -> float:
    residuals = d.y - linear_predict(model, d)
    return float(np.sqrt(np.mean(residuals * residuals)))
