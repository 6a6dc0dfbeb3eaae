"""Training side of the graph-classification stack.

Reads multi-file text datasets, fits the three-layer convolution model, and
exports weights in the shared interchange schema together with a parity
logits file so the inference engine can be checked against the exact values
this stack computed.
"""

from gcn_trainer.data import DatasetBundle, GraphArrays, load_dataset
from gcn_trainer.model import GcnClassifier
from gcn_trainer.train import TrainRun, parity_report, split_ids, train

__all__ = [
    "DatasetBundle",
    "GraphArrays",
    "GcnClassifier",
    "TrainRun",
    "load_dataset",
    "parity_report",
    "split_ids",
    "train",
]
