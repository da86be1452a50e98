#!/usr/bin/env python3
import argparse
import logging
import sys

from src.contracts.errors import EXIT_OK, ConfigError, OilForestError
from src.contracts.experiment_contracts import ExperimentConfig
from src.contracts.synth_contracts import DgpConfig
from src.oil_forest.global_state import RuntimeConfig
from src.oil_forest.model.experiment.runner import COMMAND_STAGES, run
from src.oil_forest.utils.logger import setup_logging
from src.oil_forest.utils.run_tests import run_testsuite

logger = logging.getLogger(__name__)

COMMAND_HELP = {
    "ingest": "build the modeling dataset and its summary statistics",
    "synth": "generate a synthetic dataset and price path",
    "fit": "fit the forest and serialize it",
    "eval": "in-sample and out-of-bag RMSEs against OLS and AR(1)",
    "importance": "split-based predictor importance, per date range when configured",
    "pdp": "partial effects for the configured features",
    "forecast": "horizon-shifted forecasting comparison",
    "sweep": "RMSEs and importance across minimum splitting-node sizes",
    "run": "every stage above except the sweep, as one bundle",
}


def load_config(args: argparse.Namespace, runtime: RuntimeConfig) -> ExperimentConfig:
    if args.config is not None:
        cfg = ExperimentConfig.from_json(args.config)
    elif args.command == "synth":
        cfg = ExperimentConfig(synth=DgpConfig())
    else:
        raise ConfigError(f"'{args.command}' needs --config")
    out = args.out
    if out is None and "output_dir" not in cfg.model_fields_set:
        out = runtime.output_dir
    return cfg.with_overrides(seed=args.seed, output_dir=out)


# ===========================
# Argument Parser
# ===========================
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oilforest",
                                     description="Random-forest oil price models and experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    for command in COMMAND_STAGES:
        p = sub.add_parser(command, help=COMMAND_HELP[command])
        p.add_argument("--config", help="experiment config or run manifest (JSON)")
        p.add_argument("--seed", type=int, help="overrides the forest (and synthetic) seed")
        p.add_argument("--threads", type=int, help="worker count for forest training")
        p.add_argument("--out", help="output directory for the report bundle")

    p = sub.add_parser("test", help="run the unit and integration tests with coverage")
    p.add_argument("test_args", nargs=argparse.REMAINDER)
    return parser


# ===========================
# Entry Point
# ===========================
def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    # test flags belong to the test runner, not to this parser
    if argv[:1] == ["test"]:
        return run_testsuite(argv[1:])
    args = build_parser().parse_args(argv)

    runtime = RuntimeConfig.read_env()
    setup_logging(runtime.log_file, runtime.log_level)
    try:
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            raise ConfigError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
        if args.threads is not None and args.threads < 1:
            raise ConfigError(f"--threads must be positive, got {args.threads}")
        cfg = load_config(args, runtime)
        workers = args.threads if args.threads is not None else runtime.threads
        out = run(cfg, args.command, workers, runtime.pool)
    except OilForestError as e:
        logger.debug("traceback", exc_info=True)
        logger.error(str(e), extra={"stage": getattr(e, "stage", "config"), "code": e.exit_code})
        return e.exit_code
    print(f"{args.command}: wrote {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
