"""Dataset IO: the standard multi-file text dataset layout plus a synthetic
motif benchmark.

The text layout is the usual one: ``NAME_A.txt`` (1-based edge list),
``NAME_graph_indicator.txt`` (graph id per node), ``NAME_graph_labels.txt``,
and optional ``NAME_node_labels.txt``, ``NAME_edge_labels.txt``,
``NAME_node_attributes.txt``.  Everything is converted to dense 0-based ids;
node labels become node types and, when attribute vectors are absent, their
one-hot encoding becomes the feature matrix.  Graphs without node labels get
a single type and a constant scalar feature.
"""

from __future__ import annotations

import random
from pathlib import Path

import numpy as np

from graphlens.errors import DatasetFormatError
from graphlens.gcn import GcnModel
from graphlens.graphs import Graph, GraphDatabase

HOUSE_SIZE = 5
CYCLE_SIZE = 6

# node type vocabulary of the synthetic motif benchmark
TYPE_BASE = 0
TYPE_HOUSE_ANCHOR = 1
TYPE_CYCLE_ANCHOR = 2
TYPE_MEMBER = 3
SYNTH_TYPES = 4


def _read_lines(path: Path) -> list[str]:
    try:
        return path.read_text().splitlines()
    except OSError as exc:
        raise DatasetFormatError(f"{path}: cannot read ({exc})") from exc


def _parse_int(path: Path, lineno: int, text: str) -> int:
    try:
        return int(text.strip())
    except ValueError as exc:
        raise DatasetFormatError(f"{path}:{lineno}: expected an integer, got {text!r}") from exc


def load_tu_dataset(directory, name: str) -> GraphDatabase:
    """Load one dataset from ``directory`` with file prefix ``name``."""
    directory = Path(directory)
    ind_path = directory / f"{name}_graph_indicator.txt"
    a_path = directory / f"{name}_A.txt"
    lab_path = directory / f"{name}_graph_labels.txt"
    for p in (ind_path, a_path, lab_path):
        if not p.exists():
            raise DatasetFormatError(f"{p}: required dataset file is missing")

    indicator = [
        _parse_int(ind_path, i + 1, line)
        for i, line in enumerate(_read_lines(ind_path))
        if line.strip()
    ]
    n_nodes = len(indicator)
    raw_graph_labels = [
        _parse_int(lab_path, i + 1, line)
        for i, line in enumerate(_read_lines(lab_path))
        if line.strip()
    ]
    n_graphs = len(raw_graph_labels)
    for i, gid in enumerate(indicator):
        if not (1 <= gid <= n_graphs):
            raise DatasetFormatError(
                f"{ind_path}:{i + 1}: node assigned to missing graph {gid}"
            )

    edges: list[tuple[int, int]] = []
    for i, line in enumerate(_read_lines(a_path)):
        if not line.strip():
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise DatasetFormatError(f"{a_path}:{i + 1}: expected 'u, v', got {line!r}")
        u = _parse_int(a_path, i + 1, parts[0]) - 1
        v = _parse_int(a_path, i + 1, parts[1]) - 1
        for w in (u, v):
            if not (0 <= w < n_nodes):
                raise DatasetFormatError(f"{a_path}:{i + 1}: node {w + 1} does not exist")
        if indicator[u] != indicator[v]:
            raise DatasetFormatError(f"{a_path}:{i + 1}: edge crosses graphs")
        edges.append((u, v))

    nl_path = directory / f"{name}_node_labels.txt"
    node_labels: list[int] | None = None
    if nl_path.exists():
        node_labels = [
            _parse_int(nl_path, i + 1, line)
            for i, line in enumerate(_read_lines(nl_path))
            if line.strip()
        ]
        if len(node_labels) != n_nodes:
            raise DatasetFormatError(
                f"{nl_path}: {len(node_labels)} node labels for {n_nodes} nodes"
            )

    el_path = directory / f"{name}_edge_labels.txt"
    edge_labels: list[int] | None = None
    if el_path.exists():
        edge_labels = [
            _parse_int(el_path, i + 1, line)
            for i, line in enumerate(_read_lines(el_path))
            if line.strip()
        ]
        if len(edge_labels) != len(edges):
            raise DatasetFormatError(
                f"{el_path}: {len(edge_labels)} edge labels for {len(edges)} edge rows"
            )

    na_path = directory / f"{name}_node_attributes.txt"
    node_attrs: list[list[float]] | None = None
    if na_path.exists():
        node_attrs = []
        for i, line in enumerate(_read_lines(na_path)):
            if not line.strip():
                continue
            try:
                node_attrs.append([float(x) for x in line.replace(",", " ").split()])
            except ValueError as exc:
                raise DatasetFormatError(f"{na_path}:{i + 1}: bad attribute row") from exc
        if len(node_attrs) != n_nodes:
            raise DatasetFormatError(
                f"{na_path}: {len(node_attrs)} attribute rows for {n_nodes} nodes"
            )
        width = {len(row) for row in node_attrs}
        if len(width) > 1:
            raise DatasetFormatError(f"{na_path}: attribute rows have mixed widths")

    # dense remaps for labels and types
    label_map = {raw: i for i, raw in enumerate(sorted(set(raw_graph_labels)))}
    if node_labels is not None:
        type_map = {raw: i for i, raw in enumerate(sorted(set(node_labels)))}
        types = [type_map[t] for t in node_labels]
    else:
        types = [0] * n_nodes
    if edge_labels is not None:
        etype_map = {raw: i for i, raw in enumerate(sorted(set(edge_labels)))}
        etypes = [etype_map[t] for t in edge_labels]
    else:
        etypes = [0] * len(edges)

    if node_attrs is not None:
        features = np.array(node_attrs, dtype=np.float64)
    elif node_labels is not None:
        n_types = len(set(types))
        features = np.zeros((n_nodes, n_types))
        features[np.arange(n_nodes), types] = 1.0
    else:
        features = np.ones((n_nodes, 1))

    # split into per-graph structures (graph ids are 1-based in the files)
    members: dict[int, list[int]] = {gid: [] for gid in range(1, n_graphs + 1)}
    for v, gid in enumerate(indicator):
        members[gid].append(v)
    local: dict[int, int] = {}
    for gid in range(1, n_graphs + 1):
        for k, v in enumerate(members[gid]):
            local[v] = k
    per_edges: dict[int, dict[tuple[int, int], int]] = {gid: {} for gid in members}
    for (u, v), t in zip(edges, etypes):
        gid = indicator[u]
        a, b = local[u], local[v]
        e = (a, b) if a < b else (b, a)
        prev = per_edges[gid].get(e)
        if prev is not None and prev != t:
            raise DatasetFormatError(
                f"{a_path}: edge {e} of graph {gid} listed with conflicting labels"
            )
        per_edges[gid][e] = t

    graphs = []
    for gid in range(1, n_graphs + 1):
        idx = members[gid]
        es = sorted(per_edges[gid])
        graphs.append(
            Graph.build(
                [types[v] for v in idx],
                features[idx] if idx else features[:0],
                es,
                [per_edges[gid][e] for e in es],
            )
        )
    dataset_labels = {
        i: label_map[raw] for i, raw in enumerate(raw_graph_labels)
    }
    return GraphDatabase(graphs=tuple(graphs), dataset_labels=dataset_labels)


def write_tu_dataset(db: GraphDatabase, directory, name: str) -> None:
    """Write the database in the same multi-file text layout (node labels =
    node types, labels = dataset labels).  Output is byte-deterministic."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    indicator: list[int] = []
    node_labels: list[int] = []
    a_rows: list[str] = []
    offset = 0
    for gid, g in enumerate(db.graphs, start=1):
        indicator.extend([gid] * g.n)
        node_labels.extend(g.node_types)
        for u, v in g.edges:
            a_rows.append(f"{offset + u + 1}, {offset + v + 1}")
            a_rows.append(f"{offset + v + 1}, {offset + u + 1}")
        offset += g.n
    (directory / f"{name}_graph_indicator.txt").write_text(
        "".join(f"{x}\n" for x in indicator)
    )
    (directory / f"{name}_A.txt").write_text("".join(f"{r}\n" for r in a_rows))
    (directory / f"{name}_graph_labels.txt").write_text(
        "".join(f"{db.dataset_labels[i]}\n" for i in range(len(db.graphs)))
    )
    (directory / f"{name}_node_labels.txt").write_text(
        "".join(f"{t}\n" for t in node_labels)
    )


def _one_hot(types: list[int], width: int) -> np.ndarray:
    out = np.zeros((len(types), width))
    out[np.arange(len(types)), types] = 1.0
    return out


def _ba_tree_edges(n: int, rng: random.Random) -> list[tuple[int, int]]:
    """Preferential-attachment tree (attachment parameter 1)."""
    edges = [(0, 1)] if n > 1 else []
    stubs = [0, 1] if n > 1 else [0]
    for v in range(2, n):
        target = stubs[rng.randrange(len(stubs))]
        edges.append((target, v))
        stubs.extend([target, v])
    return edges


def synth_motif_dataset(n_graphs: int, base_nodes: int, seed: int) -> GraphDatabase:
    """Seed-deterministic motif benchmark.

    Each graph is a preferential-attachment tree with one planted motif
    hanging off a single bridge edge: a 5-node house (square plus a roof
    node on one side) for class 0, a 6-node ring for class 1.  One motif
    node is the class anchor (types above); the others share the generic
    member type.  Planted motif ids are recorded as ground truth.
    """
    rng = random.Random(seed)
    graphs = []
    labels: dict[int, int] = {}
    truth: dict[int, tuple[int, ...]] = {}
    for gid in range(n_graphs):
        cls = gid % 2  # even split: house, cycle, house, ...
        base_edges = _ba_tree_edges(base_nodes, rng)
        types = [TYPE_BASE] * base_nodes
        edges = list(base_edges)
        m0 = base_nodes  # first motif node id
        if cls == 0:
            # square m0-m1-m2-m3 with roof anchor adjacent to m0 and m1
            anchor = m0 + 4
            motif_nodes = [m0, m0 + 1, m0 + 2, m0 + 3, anchor]
            types.extend([TYPE_MEMBER] * 4 + [TYPE_HOUSE_ANCHOR])
            edges.extend(
                [
                    (m0, m0 + 1),
                    (m0 + 1, m0 + 2),
                    (m0 + 2, m0 + 3),
                    (m0 + 3, m0),
                    (anchor, m0),
                    (anchor, m0 + 1),
                ]
            )
        else:
            anchor = m0
            motif_nodes = [m0 + k for k in range(CYCLE_SIZE)]
            types.extend([TYPE_CYCLE_ANCHOR] + [TYPE_MEMBER] * (CYCLE_SIZE - 1))
            edges.extend(
                (m0 + k, m0 + (k + 1) % CYCLE_SIZE) for k in range(CYCLE_SIZE)
            )
        # single bridge from a random member to a random base node
        members_only = [v for v in motif_nodes if types[v] == TYPE_MEMBER]
        bridge_motif = members_only[rng.randrange(len(members_only))]
        bridge_base = rng.randrange(base_nodes)
        edges.append((bridge_base, bridge_motif))
        graphs.append(Graph.build(types, _one_hot(types, SYNTH_TYPES), edges))
        labels[gid] = cls
        truth[gid] = tuple(motif_nodes)
    return GraphDatabase(
        graphs=tuple(graphs), dataset_labels=labels, ground_truth=truth
    )


def standin_motif_model() -> GcnModel:
    """Hand-built classifier for the synthetic motif benchmark.

    Identity convolutions keep the one-hot type channels separated, so after
    max pooling the anchor channels signal which motif is present.  The head
    maps the house-anchor channel to class 0 and the ring-anchor channel to
    class 1; a third "no motif" class holds a small bias so anchor-free
    graphs (in particular leftovers after removing an explanation) fall
    through to it instead of tying between the motif classes.

    The anchor's self-loop contribution survives three normalized
    propagation steps at no less than (1/(deg+1))^3; anchors keep degree 2,
    so the pooled anchor channel is at least (1/3)^3 = 1/27 whenever the
    anchor is present, and the gain of 200 dominates the bias of 1.
    """
    eye = np.eye(SYNTH_TYPES)
    head = np.zeros((SYNTH_TYPES, 3))
    head[TYPE_HOUSE_ANCHOR, 0] = 200.0
    head[TYPE_CYCLE_ANCHOR, 1] = 200.0
    bias = np.array([0.0, 0.0, 1.0])
    return GcnModel.build([eye, eye, eye], head, bias)
