"""Multi-file text dataset reader for the training stack.

Follows the usual layout: ``NAME_A.txt`` (1-based edge list, one direction
per line, duplicates allowed), ``NAME_graph_indicator.txt`` (1-based graph
id per node), ``NAME_graph_labels.txt``, optional ``NAME_node_labels.txt``
and ``NAME_node_attributes.txt``.  Graph labels are densified to 0-based
class ids in sorted order; features are the attribute rows when present,
else the one-hot encoding of the densified node labels, else a constant
scalar.  These conventions are the interchange contract with the inference
engine, so logits computed here are comparable there.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class GraphArrays:
    """One graph, preprocessed for training.

    ``prop`` is the symmetric-normalized adjacency with self loops:
    D^{-1/2} (A + I) D^{-1/2}.
    """

    features: np.ndarray
    prop: np.ndarray
    label: int


@dataclass(frozen=True)
class DatasetBundle:
    graphs: tuple[GraphArrays, ...]
    feature_dim: int
    num_classes: int


def _read_ints(path: Path) -> list[int]:
    out = []
    for i, line in enumerate(path.read_text().splitlines()):
        if not line.strip():
            continue
        try:
            out.append(int(line.strip()))
        except ValueError as exc:
            raise ValueError(f"{path}:{i + 1}: expected an integer, got {line!r}") from exc
    return out


def _propagation(n: int, edges: set[tuple[int, int]]) -> np.ndarray:
    a = np.eye(n)
    for u, v in edges:
        a[u, v] = 1.0
        a[v, u] = 1.0
    d = 1.0 / np.sqrt(a.sum(axis=1))
    return a * d[:, None] * d[None, :]


def load_dataset(directory, name: str) -> DatasetBundle:
    directory = Path(directory)
    ind_path = directory / f"{name}_graph_indicator.txt"
    a_path = directory / f"{name}_A.txt"
    lab_path = directory / f"{name}_graph_labels.txt"
    for p in (ind_path, a_path, lab_path):
        if not p.exists():
            raise ValueError(f"{p}: required dataset file is missing")

    indicator = _read_ints(ind_path)
    raw_labels = _read_ints(lab_path)
    n_nodes, n_graphs = len(indicator), len(raw_labels)
    for i, gid in enumerate(indicator):
        if not (1 <= gid <= n_graphs):
            raise ValueError(f"{ind_path}:{i + 1}: node assigned to missing graph {gid}")

    edges: list[tuple[int, int]] = []
    for i, line in enumerate(a_path.read_text().splitlines()):
        if not line.strip():
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ValueError(f"{a_path}:{i + 1}: expected 'u, v', got {line!r}")
        u, v = int(parts[0]) - 1, int(parts[1]) - 1
        for w in (u, v):
            if not (0 <= w < n_nodes):
                raise ValueError(f"{a_path}:{i + 1}: node {w + 1} does not exist")
        if u == v:
            raise ValueError(f"{a_path}:{i + 1}: self loop on node {u + 1}")
        if indicator[u] != indicator[v]:
            raise ValueError(f"{a_path}:{i + 1}: edge crosses graphs")
        edges.append((u, v))

    nl_path = directory / f"{name}_node_labels.txt"
    node_labels = _read_ints(nl_path) if nl_path.exists() else None
    if node_labels is not None and len(node_labels) != n_nodes:
        raise ValueError(f"{nl_path}: {len(node_labels)} node labels for {n_nodes} nodes")

    na_path = directory / f"{name}_node_attributes.txt"
    if na_path.exists():
        rows = [
            [float(x) for x in line.replace(",", " ").split()]
            for line in na_path.read_text().splitlines()
            if line.strip()
        ]
        if len(rows) != n_nodes:
            raise ValueError(f"{na_path}: {len(rows)} attribute rows for {n_nodes} nodes")
        features = np.array(rows, dtype=np.float64)
    elif node_labels is not None:
        type_map = {raw: k for k, raw in enumerate(sorted(set(node_labels)))}
        features = np.zeros((n_nodes, len(type_map)))
        features[np.arange(n_nodes), [type_map[t] for t in node_labels]] = 1.0
    else:
        features = np.ones((n_nodes, 1))

    label_map = {raw: k for k, raw in enumerate(sorted(set(raw_labels)))}
    members: dict[int, list[int]] = {gid: [] for gid in range(1, n_graphs + 1)}
    for v, gid in enumerate(indicator):
        members[gid].append(v)
    local = {v: k for gid in members for k, v in enumerate(members[gid])}

    per_edges: dict[int, set[tuple[int, int]]] = {gid: set() for gid in members}
    for u, v in edges:
        a, b = local[u], local[v]
        per_edges[indicator[u]].add((a, b) if a < b else (b, a))

    graphs = []
    for gid in range(1, n_graphs + 1):
        idx = members[gid]
        graphs.append(
            GraphArrays(
                features=features[idx] if idx else features[:0],
                prop=_propagation(len(idx), per_edges[gid]),
                label=label_map[raw_labels[gid - 1]],
            )
        )
    return DatasetBundle(
        graphs=tuple(graphs),
        feature_dim=int(features.shape[1]),
        num_classes=len(label_map),
    )
