import logging
from typing import Iterable, Mapping

import numpy as np

from src.contracts.analysis_contracts import ImportanceReport
from src.contracts.errors import ContractViolation
from src.contracts.forest_contracts import ForestModel

logger = logging.getLogger(__name__)


def importance(m: ForestModel) -> ImportanceReport:
    """Sum of SSE reductions per feature over every split of every tree, plus its share of the total."""
    raw = np.zeros(m.n_features)
    for tree in m.trees:
        raw += tree.feature_sse_reduction
    total = float(raw.sum())
    if total <= 0.0:
        logger.warning("no tree in the forest ever split; importance is degenerate")
        return ImportanceReport(feature_names=list(m.feature_names), raw=[0.0] * m.n_features,
                                normalized=None, degenerate=True)
    return ImportanceReport(feature_names=list(m.feature_names), raw=raw.tolist(),
                            normalized=(raw / total).tolist())


def group_share(report: ImportanceReport, features: Iterable[str]) -> float:
    """Joint normalized importance of a group of features, e.g. the financial factors."""
    features = list(features)
    unknown = [f for f in features if f not in report.feature_names]
    if unknown:
        raise ContractViolation(f"unknown features {unknown}")
    return float(sum(report.score(f) for f in features))


def render_importance_columns(reports: Mapping[str, ImportanceReport], digits: int = 3) -> str:
    """Side-by-side normalized importance, one column per report, rows in the first report's order."""
    if not reports:
        return ""
    headers = list(reports)
    names = reports[headers[0]].feature_names
    for header, report in reports.items():
        if report.feature_names != names:
            raise ContractViolation(f"report '{header}' has a different feature set")
    name_width = max(len("feature"), *(len(n) for n in names))
    widths = [max(len(h), digits + 2) for h in headers]
    lines = ["  ".join(["feature".ljust(name_width)] + [h.rjust(w) for h, w in zip(headers, widths)])]
    for name in names:
        cells = [f"{reports[h].score(name):.{digits}f}".rjust(w) for h, w in zip(headers, widths)]
        lines.append("  ".join([name.ljust(name_width)] + cells))
    totals = [f"{sum(reports[h].score(n) for n in names):.{digits}f}".rjust(w) for h, w in zip(headers, widths)]
    lines.append("  ".join(["sum".ljust(name_width)] + totals))
    return "\n".join(lines) + "\n"
