import logging

import numpy as np
import pandas as pd

from src.contracts.dataset_contracts import Dataset
from src.contracts.errors import ContractViolation
from src.contracts.synth_contracts import DgpConfig, SyntheticSample

logger = logging.getLogger(__name__)

PRICE_NAME = "price"


class TrueFunction:
    """Noiseless f(x) of a DgpConfig; rows give each observation's position for the regime term."""

    def __init__(self, cfg: DgpConfig):
        self.cfg = cfg
        self._linear = np.asarray(cfg.linear, dtype=float)

    def __call__(self, X: np.ndarray, rows: np.ndarray | None = None) -> np.ndarray:
        cfg = self.cfg
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != len(cfg.feature_names):
            raise ContractViolation(f"expected {len(cfg.feature_names)} columns, got {X.shape[1]}")
        f = X @ self._linear
        if cfg.hinge_feature is not None:
            f += cfg.hinge_coef * np.maximum(0.0, -X[:, cfg.index(cfg.hinge_feature)])
        if cfg.interaction is not None:
            a, b = (cfg.index(name) for name in cfg.interaction)
            f += cfg.interaction_coef * X[:, a] * X[:, b]
        if cfg.regime_feature is not None:
            rows = np.arange(X.shape[0]) if rows is None else np.asarray(rows)
            active = rows >= cfg.regime_start
            f += cfg.regime_coef * X[:, cfg.index(cfg.regime_feature)] * active
        return f

    def slopes(self, feature: str) -> tuple[float, float]:
        """Slope of f in `feature` for negative and for positive values, outside any interaction or regime."""
        cfg = self.cfg
        base = float(self._linear[cfg.index(feature)])
        if feature == cfg.hinge_feature:
            return base - cfg.hinge_coef, base
        return base, base


def ar1_features(rng: np.random.Generator, n_rows: int, n_features: int, phi: float) -> np.ndarray:
    """Independent unit-variance Gaussian AR(1) columns started from their stationary law."""
    shocks = rng.standard_normal((n_rows, n_features))
    X = np.empty_like(shocks)
    X[0] = shocks[0]
    scale = np.sqrt(1.0 - phi * phi)
    for t in range(1, n_rows):
        X[t] = phi * X[t - 1] + scale * shocks[t]
    return X


def log_price_path(y: np.ndarray, window: int, start: float) -> np.ndarray:
    """Log prices whose `window`-row change at row t is exactly y[t] for t >= window.

    The first `window` rows walk up from ln(start) in steps of y / window.
    """
    n = len(y)
    lp = np.empty(n)
    head = min(window, n)
    lp[:head] = np.log(start) + np.cumsum(y[:head] / window)
    for r in range(head):
        lp[r + window::window] = lp[r] + np.cumsum(y[r + window::window])
    return lp


def generate(cfg: DgpConfig) -> SyntheticSample:
    rng = np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed))
    X = ar1_features(rng, cfg.n_rows, len(cfg.feature_names), cfg.autocorrelation)
    noise = cfg.noise_std * rng.standard_normal(cfg.n_rows)
    f = TrueFunction(cfg)
    y = f(X) + noise

    dates = pd.bdate_range(cfg.start_date, periods=cfg.n_rows)
    log_price = log_price_path(y, cfg.window, cfg.price_start)
    price = pd.Series(np.exp(log_price), index=dates, name=PRICE_NAME)
    logger.info(f"generated {cfg.n_rows} synthetic rows x {len(cfg.feature_names)} features "
                f"(seed={cfg.seed}, noise_std={cfg.noise_std})")
    return SyntheticSample(
        dataset=Dataset(dates, tuple(cfg.feature_names), X, y, PRICE_NAME),
        true_function=f,
        noise=noise,
        price=price,
        config=cfg,
    )
