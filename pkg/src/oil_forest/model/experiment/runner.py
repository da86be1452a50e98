import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import pandas as pd

from src.contracts.analysis_contracts import ImportanceReport
from src.contracts.dataset_contracts import Dataset, MOMENTUM_FEATURE, TransformSpec
from src.contracts.errors import ConfigError, ContractViolation, StageError
from src.contracts.experiment_contracts import MANIFEST_VERSION, ExperimentConfig, PdpRequest
from src.contracts.forest_contracts import ForestModel
from ..analysis.comparison import compare, render_fit_table, render_forecast_table
from ..analysis.forecasting import forecast_study
from ..analysis.importance import importance, render_importance_columns
from ..analysis.partial_effects import effect_rows, partial_effect_1d, partial_effect_2d
from ..analysis.subsample import min_split_sweep, subsample_study
from ..dataio.dataset_io import read_dataset_csv, summarize, write_dataset_csv
from ..dataio.feature_builder import build_features
from ..dataio.panel_builder import align_and_interpolate
from ..dataio.series_loader import load_series
from ..forest.random_forest import PoolKind, fit_forest, mse_curve_from_model
from ..forest.serializers import forest_to_document, load_forest
from ..linear.least_squares import fit_ar1, fit_ols
from ..synthgen.generator import generate
from .bundle import ReportBundle, file_digest

logger = logging.getLogger(__name__)

COMMAND_STAGES: dict[str, tuple[str, ...]] = {
    "ingest": ("data",),
    "synth": ("data",),
    "fit": ("data", "fit", "model"),
    "eval": ("data", "fit", "eval"),
    "importance": ("data", "fit", "importance", "ranges"),
    "pdp": ("data", "fit", "importance", "pdp"),
    "forecast": ("data", "forecast"),
    "sweep": ("data", "sweep"),
    "run": ("data", "fit", "eval", "importance", "ranges", "pdp", "mse_curve", "forecast", "model"),
}


@dataclass
class ExperimentState:
    cfg: ExperimentConfig
    command: str
    workers: int = 1
    pool: PoolKind = "process"
    dataset: Dataset | None = None
    price: pd.Series | None = None
    model: ForestModel | None = None
    report: ImportanceReport | None = None
    inputs: dict[str, str] = field(default_factory=dict)


def _hash_input(state: ExperimentState, path: str) -> Path:
    p = Path(path)
    state.inputs[str(p)] = file_digest(p) if p.is_file() else "missing"
    return p


def _load_data(state: ExperimentState, bundle: ReportBundle) -> None:
    cfg = state.cfg
    if cfg.synth is not None:
        sample = generate(cfg.synth)
        state.dataset, state.price = sample.dataset, sample.price
    elif cfg.series is not None:
        spec = TransformSpec.from_json(_hash_input(state, cfg.series.transform_spec))
        target = spec.resolve_target(cfg.target)
        unknown = [name for name in spec.variables if name not in cfg.series.files]
        if unknown:
            raise ConfigError(f"transform spec variables without series files: {unknown}")
        series = [load_series(_hash_input(state, path), name) for name, path in cfg.series.files.items()]
        frequencies = {name: v.frequency for name, v in spec.variables.items() if v.frequency}
        panel = align_and_interpolate(series, cfg.series.calendar_source, frequencies)
        state.dataset = build_features(panel, spec, target)
        state.price = panel.frame[target]
    else:
        state.dataset = read_dataset_csv(_hash_input(state, cfg.dataset_csv))
        if cfg.price_csv is not None:
            state.price = load_series(_hash_input(state, cfg.price_csv), "price").to_pandas()

    write_dataset_csv(state.dataset, bundle.path("dataset.csv"))
    bundle.adopt("dataset.csv")
    bundle.write_text("summary.txt", summarize(state.dataset).render())
    if state.price is not None:
        bundle.write_csv("price.csv", ["date", "value"],
                         zip(state.price.index.strftime("%Y-%m-%d"), state.price.to_numpy()))


def _fit(state: ExperimentState, bundle: ReportBundle) -> None:
    cfg, d = state.cfg, state.dataset
    if cfg.model_path is None:
        state.model = fit_forest(d, cfg.forest, state.workers, state.pool)
        return
    model = load_forest(_hash_input(state, cfg.model_path))
    if tuple(model.feature_names) != tuple(d.feature_names):
        raise ContractViolation("stored model was trained on different features")
    state.model = model


def _evaluate(state: ExperimentState, bundle: ReportBundle) -> None:
    d = state.dataset
    ar1 = fit_ar1(d) if MOMENTUM_FEATURE in d.feature_names else None
    table = compare(state.model, fit_ols(d), ar1, d)
    bundle.write_json("eval_table.json", table.model_dump(mode="json"))
    bundle.write_text("eval_table.txt", render_fit_table(table))


def _importance(state: ExperimentState, bundle: ReportBundle) -> None:
    state.report = importance(state.model)
    bundle.write_csv("importance.csv", ["feature", "raw", "normalized"], state.report.ranked())


def _ranges(state: ExperimentState, bundle: ReportBundle) -> None:
    cfg = state.cfg
    if not cfg.date_ranges:
        return
    ranges = {r.name: (r.start, r.end) for r in cfg.date_ranges}
    reports = subsample_study(state.dataset, ranges, cfg.forest, state.workers, state.pool)
    if not reports:
        logger.warning("every configured date range was empty")
        return
    bundle.write_text("importance_by_range.txt", render_importance_columns(reports))
    names = state.dataset.feature_names
    bundle.write_csv("importance_by_range.csv", ["feature", *reports],
                     [[n, *(r.score(n) for r in reports.values())] for n in names])


def _pdp(state: ExperimentState, bundle: ReportBundle) -> None:
    requests = state.cfg.pdp
    if not requests:
        top = state.report.ranked()[0][0]
        logger.info(f"no partial effect requested; using top feature '{top}'")
        requests = [PdpRequest(features=[top])]
    for req in requests:
        if len(req.features) == 1:
            grid = partial_effect_1d(state.model, state.dataset, req.features[0], req.grid)
            header = ["grid", "effect"]
        else:
            grid = partial_effect_2d(state.model, state.dataset, *req.features, req.grid, req.grid2)
            header = ["g1", "g2", "effect"]
        bundle.write_csv(f"{req.file_stem()}.csv", header, effect_rows(grid))


def _mse_curve(state: ExperimentState, bundle: ReportBundle) -> None:
    curve = mse_curve_from_model(state.model, state.dataset, state.cfg.checkpoints())
    bundle.write_csv("mse_curve.csv", ["n_trees", "oob_mse"], curve)


def _forecast(state: ExperimentState, bundle: ReportBundle) -> None:
    cfg = state.cfg
    if state.price is None:
        if state.command == "forecast":
            raise ConfigError("forecasting needs target price levels (series source, synth or price_csv)")
        logger.warning("no price series available; skipping forecasts")
        return
    if not cfg.horizons:
        return
    table = forecast_study(state.dataset, state.price, cfg.horizons, cfg.forest, cfg.forecast_mode,
                           cfg.holdout_fraction, state.workers, state.pool)
    bundle.write_json("forecast_table.json", table.model_dump(mode="json"))
    bundle.write_text("forecast_table.txt", render_forecast_table(table))


def _sweep(state: ExperimentState, bundle: ReportBundle) -> None:
    cfg = state.cfg
    table, reports = min_split_sweep(state.dataset, cfg.sweep_p, cfg.forest, cfg.sweep_trees,
                                     state.workers, state.pool)
    bundle.write_json("sweep_table.json", table.model_dump(mode="json"))
    bundle.write_text("sweep_table.txt", render_fit_table(table))
    bundle.write_text("importance_by_p.txt", render_importance_columns(reports))


def _save_model(state: ExperimentState, bundle: ReportBundle) -> None:
    bundle.write_json("model.json", forest_to_document(state.model))


STAGES: dict[str, Callable[[ExperimentState, ReportBundle], None]] = {
    "data": _load_data,
    "fit": _fit,
    "eval": _evaluate,
    "importance": _importance,
    "ranges": _ranges,
    "pdp": _pdp,
    "mse_curve": _mse_curve,
    "forecast": _forecast,
    "sweep": _sweep,
    "model": _save_model,
}


def manifest(state: ExperimentState) -> dict[str, Any]:
    return {
        "manifest_version": MANIFEST_VERSION,
        "command": state.command,
        "config": state.cfg.model_dump(mode="json"),
        "seed": state.cfg.forest.seed,
        "inputs": dict(sorted(state.inputs.items())),
    }


def run(cfg: ExperimentConfig, command: str = "run", workers: int = 1, pool: PoolKind = "process") -> Path:
    """Run the stages of `command` and commit their outputs as one bundle under cfg.output_dir.

    Any failure removes the partial outputs and surfaces as a StageError naming the stage.
    """
    if command not in COMMAND_STAGES:
        raise ConfigError(f"unknown command '{command}'")
    state = ExperimentState(cfg=cfg, command=command, workers=workers, pool=pool)
    bundle = ReportBundle(cfg.output_dir)
    stage = "setup"
    try:
        for stage in COMMAND_STAGES[command]:
            logger.info(f"stage '{stage}' started", extra={"stage": stage})
            STAGES[stage](state, bundle)
        stage = "manifest"
        return bundle.commit(manifest(state))
    except Exception as e:
        bundle.discard()
        raise StageError(stage, e) from e
