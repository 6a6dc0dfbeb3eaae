"""Versioned JSON serialization of model weights.

Floats are emitted through Python's shortest-roundtrip repr, so every
64-bit value survives a save/load cycle bit for bit.
"""

from __future__ import annotations

import json

import numpy as np

from graphlens.errors import DatasetFormatError
from graphlens.gcn import GcnModel

SCHEMA = "gcn-weights/1"


def model_to_dict(m: GcnModel) -> dict:
    return {
        "schema": SCHEMA,
        "feature_dim": m.feature_dim,
        "num_classes": m.num_classes,
        "activation": m.activation,
        "pooling": m.pooling,
        "layers": [w.tolist() for w in m.layers],
        "classifier_weight": m.classifier_weight.tolist(),
        "classifier_bias": m.classifier_bias.tolist(),
    }


def model_from_dict(doc: dict, source: str = "<weights>") -> GcnModel:
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise DatasetFormatError(f"{source}: expected schema {SCHEMA!r}")
    try:
        m = GcnModel.build(
            [np.array(w, dtype=np.float64) for w in doc["layers"]],
            np.array(doc["classifier_weight"], dtype=np.float64),
            np.array(doc["classifier_bias"], dtype=np.float64),
            activation=doc.get("activation", "relu"),
            pooling=doc.get("pooling", "max"),
        )
    except (KeyError, TypeError) as exc:
        raise DatasetFormatError(f"{source}: malformed weights file ({exc})") from exc
    if m.feature_dim != int(doc["feature_dim"]):
        raise DatasetFormatError(f"{source}: feature_dim field disagrees with layer shapes")
    if m.num_classes != int(doc["num_classes"]):
        raise DatasetFormatError(f"{source}: num_classes field disagrees with classifier shape")
    return m


def save_model(m: GcnModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(m), fh, indent=1)
        fh.write("\n")


def load_model(path) -> GcnModel:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(f"{path}: not valid JSON ({exc})") from exc
    return model_from_dict(doc, str(path))
