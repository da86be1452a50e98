import hashlib
import logging
import shutil
from pathlib import Path
from typing import Any, Iterable, Sequence

import pandas as pd

from src.contracts.errors import ConfigError
from ..forest.serializers import dumps_json

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def file_digest(path: Path | str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class ReportBundle:
    """Output files written into a staging directory and moved into place only on commit.

    A failed run calls discard(), which removes everything written so far.
    """

    def __init__(self, output_dir: Path | str):
        self.output_dir = Path(output_dir)
        if self.output_dir.exists() and not (self.output_dir / MANIFEST_NAME).exists() \
                and any(self.output_dir.iterdir()):
            raise ConfigError(f"output directory {self.output_dir} exists and is not a report bundle")
        self.staging = self.output_dir.with_name(self.output_dir.name + ".partial")
        if self.staging.exists():
            shutil.rmtree(self.staging)
        self.staging.mkdir(parents=True)
        self.files: dict[str, str] = {}

    def path(self, name: str) -> Path:
        return self.staging / name

    def _record(self, name: str) -> Path:
        path = self.path(name)
        self.files[name] = file_digest(path)
        logger.debug(f"wrote {name}", extra={"path": str(path)})
        return path

    def write_text(self, name: str, text: str) -> Path:
        self.path(name).write_text(text, encoding="utf-8", newline="\n")
        return self._record(name)

    def write_json(self, name: str, payload: Any) -> Path:
        return self.write_text(name, dumps_json(payload))

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        frame = pd.DataFrame(list(rows), columns=list(header))
        frame.to_csv(self.path(name), index=False, encoding="utf-8", lineterminator="\n",
                     float_format="%.17g")
        return self._record(name)

    def adopt(self, name: str) -> Path:
        """Record a file some other writer already put at path(name)."""
        return self._record(name)

    def commit(self, manifest: dict[str, Any]) -> Path:
        manifest = dict(manifest, outputs=dict(sorted(self.files.items())))
        self.path(MANIFEST_NAME).write_text(dumps_json(manifest), encoding="utf-8", newline="\n")
        if self.output_dir.exists():
            shutil.rmtree(self.output_dir)
        self.staging.rename(self.output_dir)
        logger.info(f"bundle committed to {self.output_dir} ({len(self.files) + 1} files)")
        return self.output_dir

    def discard(self) -> None:
        if self.staging.exists():
            shutil.rmtree(self.staging)
        logger.info(f"discarded partial outputs for {self.output_dir}")
