import os
from typing import Literal

from dotenv import load_dotenv
from pydantic import BaseModel, Field


class RuntimeConfig(BaseModel):
    log_file: str = "run.log"
    log_level: int = Field(1, ge=0, le=2)
    threads: int = Field(1, ge=1)
    pool: Literal["thread", "process"] = "process"
    output_dir: str = "out"

    @staticmethod
    def _int_or(value: str | None, default: int) -> int:
        try:
            return int(value) if value is not None else default
        except ValueError:
            return default

    @staticmethod
    def read_env() -> "RuntimeConfig":
        load_dotenv()
        level = RuntimeConfig._int_or(os.environ.get("LOG_LEVEL"), 1)
        pool = os.environ.get("FOREST_POOL", "process").lower()
        return RuntimeConfig(
            log_file=os.environ.get("LOG_FILE", "run.log"),
            log_level=min(max(level, 0), 2),
            threads=max(1, RuntimeConfig._int_or(os.environ.get("FOREST_THREADS"), 1)),
            pool=pool if pool in ("thread", "process") else "process",
            output_dir=os.environ.get("OILFOREST_OUT", "out"),
        )
