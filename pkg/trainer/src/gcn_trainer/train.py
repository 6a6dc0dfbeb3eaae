"""Training loop, split handling, weight export and the parity report."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
import torch

from gcn_trainer.data import DatasetBundle, GraphArrays, load_dataset
from gcn_trainer.model import GcnClassifier

ACCURACY_FLOOR = 0.5


@dataclass
class TrainRun:
    dataset_dir: str
    name: str
    seed: int = 0
    epochs: int = 200
    dim: int = 32
    lr: float = 0.001
    splits: tuple[float, float, float] = (0.8, 0.1, 0.1)
    accuracies: dict[str, float] = field(default_factory=dict)


def split_ids(n: int, seed: int, splits=(0.8, 0.1, 0.1)) -> dict[str, list[int]]:
    """Deterministic shuffle split; leftovers from rounding go to train."""
    order = [int(v) for v in np.random.default_rng(seed).permutation(n)]
    n_val = int(n * splits[1])
    n_test = int(n * splits[2])
    n_train = n - n_val - n_test
    return {
        "train": order[:n_train],
        "val": order[n_train:n_train + n_val],
        "test": order[n_train + n_val:],
    }


def _tensors(g: GraphArrays) -> tuple[torch.Tensor, torch.Tensor]:
    return (
        torch.from_numpy(np.ascontiguousarray(g.prop)),
        torch.from_numpy(np.ascontiguousarray(g.features)),
    )


def _accuracy(model: GcnClassifier, bundle: DatasetBundle, ids) -> float:
    if not ids:
        return 0.0
    hits = 0
    with torch.no_grad():
        for gid in ids:
            g = bundle.graphs[gid]
            logits = model(*_tensors(g))
            if int(torch.argmax(logits)) == g.label:
                hits += 1
    return hits / len(ids)


def train(run: TrainRun, bundle: DatasetBundle | None = None) -> GcnClassifier:
    """Fit the classifier; records split accuracies on ``run``.

    Full-batch Adam: one optimizer step per epoch over the summed per-graph
    cross entropy.  Warns (but still returns the model) when training
    accuracy ends below the floor.
    """
    if bundle is None:
        bundle = load_dataset(run.dataset_dir, run.name)
    torch.manual_seed(run.seed)
    model = GcnClassifier(bundle.feature_dim, run.dim, bundle.num_classes)
    ids = split_ids(len(bundle.graphs), run.seed, run.splits)
    opt = torch.optim.Adam(model.parameters(), lr=run.lr)
    train_graphs = [bundle.graphs[g] for g in ids["train"]]
    labels = torch.tensor([g.label for g in train_graphs], dtype=torch.long)
    inputs = [_tensors(g) for g in train_graphs]
    for _ in range(run.epochs):
        opt.zero_grad()
        logits = torch.stack([model(prop, x) for prop, x in inputs])
        loss = torch.nn.functional.cross_entropy(logits, labels)
        loss.backward()
        opt.step()
    for part in ("train", "val", "test"):
        run.accuracies[part] = _accuracy(model, bundle, ids[part])
    if run.accuracies["train"] < ACCURACY_FLOOR:
        warnings.warn(
            f"training accuracy {run.accuracies['train']:.3f} is below "
            f"{ACCURACY_FLOOR}; exporting anyway",
            stacklevel=2,
        )
    return model


def parity_report(
    model: GcnClassifier,
    bundle: DatasetBundle,
    sample: int,
    seed: int = 0,
) -> dict:
    """Logits for a deterministic sample of graphs, for cross-stack checks."""
    n = len(bundle.graphs)
    take = min(sample, n)
    picked = sorted(
        int(v) for v in np.random.default_rng(seed).permutation(n)[:take]
    )
    rows = []
    with torch.no_grad():
        for gid in picked:
            logits = model(*_tensors(bundle.graphs[gid]))
            rows.append({"graph_id": gid, "logits": [float(x) for x in logits]})
    return {"schema": "parity-logits/1", "graphs": rows}


def save_json(doc: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
