import json
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from src.contracts.errors import ContractViolation, ParseError
from src.contracts.forest_contracts import ForestConfig, ForestModel, TrainingFingerprint
from src.contracts.tree_contracts import RegressionTree


def forest_to_document(m: ForestModel) -> dict[str, Any]:
    return {
        "config": m.config.model_dump(mode="json"),
        "feature_names": list(m.feature_names),
        "fingerprint": {"n_rows": m.fingerprint.n_rows, "seed": m.fingerprint.seed,
                        "digest": m.fingerprint.digest},
        "trees": [tree.to_dict() for tree in m.trees],
        "inbag": [inbag.tolist() for inbag in m.inbag],
    }


def forest_from_document(doc: dict[str, Any]) -> ForestModel:
    try:
        trees = tuple(RegressionTree.from_dict(t) for t in doc["trees"])
        inbag = tuple(np.asarray(b, dtype=np.int64) for b in doc["inbag"])
        fp = doc["fingerprint"]
        model = ForestModel(
            trees=trees,
            inbag=inbag,
            config=ForestConfig.model_validate(doc["config"]),
            feature_names=tuple(doc["feature_names"]),
            fingerprint=TrainingFingerprint(n_rows=int(fp["n_rows"]), seed=int(fp["seed"]),
                                            digest=str(fp["digest"])),
        )
    except (KeyError, TypeError, ValidationError) as e:
        raise ContractViolation(f"malformed forest document: {e}") from e
    if len(model.trees) != len(model.inbag):
        raise ContractViolation("forest document has mismatched tree and in-bag counts")
    return model


def dumps_json(payload: Any) -> str:
    """Pretty-printed, key-sorted JSON; floats keep their shortest round-trip repr."""
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def save_forest(m: ForestModel, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_json(forest_to_document(m)), encoding="utf-8")
    return path


def load_forest(path: Path | str) -> ForestModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ParseError(f"{path.name}: {e}") from e
    return forest_from_document(doc)
