from .bundle import MANIFEST_NAME, ReportBundle, file_digest
from .runner import COMMAND_STAGES, manifest, run

__all__ = ["MANIFEST_NAME", "ReportBundle", "file_digest", "COMMAND_STAGES", "manifest", "run"]
