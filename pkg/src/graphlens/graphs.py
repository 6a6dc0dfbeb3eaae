"""Typed, attributed graphs and node-induced pattern matching.

All graphs are undirected, simple (no self-loops, no parallel edges) and
carry an integer type per node and per edge plus a real feature vector per
node.  Node ids are always the dense range ``0..n-1``; subgraph extraction
re-densifies ids and keeps the original ids in ``Graph.origin``.

Pattern matching is exact node-induced subgraph isomorphism: an injective
map is a match when node types agree, every pattern edge lands on a graph
edge of the same type, and every graph edge between mapped nodes is mirrored
by a pattern edge.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from graphlens.errors import GraphStructureError

Edge = tuple[int, int]
Matching = tuple[int, ...]


def _normalize_edges(
    n: int,
    edges,
    edge_types,
    what: str,
) -> tuple[tuple[Edge, ...], tuple[int, ...]]:
    """Validate, deduplicate and sort an undirected edge list."""
    if edge_types is None:
        edge_types = [0] * len(edges)
    if len(edge_types) != len(edges):
        raise GraphStructureError(f"{what}: {len(edges)} edges but {len(edge_types)} edge types")
    seen: dict[Edge, int] = {}
    for (u, v), t in zip(edges, edge_types):
        if u == v:
            raise GraphStructureError(f"{what}: self-loop at node {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphStructureError(f"{what}: edge ({u}, {v}) references a missing node")
        e = (u, v) if u < v else (v, u)
        if e in seen:
            if seen[e] != int(t):
                raise GraphStructureError(f"{what}: edge {e} listed twice with different types")
            continue
        seen[e] = int(t)
    ordered = tuple(sorted(seen))
    return ordered, tuple(seen[e] for e in ordered)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph with typed nodes/edges and node features.

    Attributes:
        node_types: per-node integer type, index = node id.
        features: float64 array of shape (n, D); D may be 0 only when n is 0.
        edges: sorted tuple of (u, v) with u < v.
        edge_types: integer type per edge, parallel to ``edges``.
        origin: original node id per node when this graph was carved out of a
            larger one, else None.
    """

    node_types: tuple[int, ...]
    features: np.ndarray
    edges: tuple[Edge, ...]
    edge_types: tuple[int, ...]
    origin: tuple[int, ...] | None = None

    @staticmethod
    def build(
        node_types,
        features,
        edges=(),
        edge_types=None,
        origin=None,
    ) -> "Graph":
        node_types = tuple(int(t) for t in node_types)
        n = len(node_types)
        feats = np.array(features, dtype=np.float64)
        if n == 0:
            feats = feats.reshape(0, feats.shape[1] if feats.ndim == 2 else 0)
        if feats.ndim != 2 or feats.shape[0] != n:
            raise GraphStructureError(
                f"graph: features must be (n, D), got shape {feats.shape} for n={n}"
            )
        feats.setflags(write=False)
        e, et = _normalize_edges(n, edges, edge_types, "graph")
        if origin is not None:
            origin = tuple(int(v) for v in origin)
            if len(origin) != n:
                raise GraphStructureError("graph: origin map must name every node")
        return Graph(node_types, feats, e, et, origin)

    @property
    def n(self) -> int:
        return len(self.node_types)

    @property
    def feature_dim(self) -> int:
        return int(self.features.shape[1])

    @cached_property
    def edge_type_map(self) -> dict[Edge, int]:
        return dict(zip(self.edges, self.edge_types))

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.neighbors)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.float64)
        for u, v in self.edges:
            a[u, v] = 1.0
            a[v, u] = 1.0
        return a

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self.edge_type_map


@dataclass(frozen=True, eq=False)
class Pattern:
    """Connected, typed structural pattern (no features)."""

    node_types: tuple[int, ...]
    edges: tuple[Edge, ...]
    edge_types: tuple[int, ...]

    @staticmethod
    def build(node_types, edges=(), edge_types=None) -> "Pattern":
        node_types = tuple(int(t) for t in node_types)
        n = len(node_types)
        if n == 0:
            raise GraphStructureError("pattern: must have at least one node")
        e, et = _normalize_edges(n, edges, edge_types, "pattern")
        p = Pattern(node_types, e, et)
        if not p.is_connected():
            raise GraphStructureError("pattern: must be connected")
        return p

    @property
    def n(self) -> int:
        return len(self.node_types)

    @cached_property
    def edge_type_map(self) -> dict[Edge, int]:
        return dict(zip(self.edges, self.edge_types))

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        seen = {0}
        frontier = [0]
        while frontier:
            u = frontier.pop()
            for w in self.neighbors[u]:
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        return len(seen) == self.n

    @cached_property
    def canonical_code(self) -> tuple:
        """Permutation-minimal encoding; equal codes iff patterns isomorphic.

        Exponential in pattern size, acceptable because patterns are capped
        to a handful of nodes.
        """
        best = None
        ids = range(self.n)
        for perm in itertools.permutations(ids):
            types = tuple(self.node_types[perm[i]] for i in ids)
            # perm maps new id -> old id; invert to relabel edges
            inv = {old: new for new, old in enumerate(perm)}
            edges = tuple(
                sorted(
                    ((min(inv[u], inv[v]), max(inv[u], inv[v])), t)
                    for (u, v), t in zip(self.edges, self.edge_types)
                )
            )
            code = (types, edges)
            if best is None or code < best:
                best = code
        return best


def graph_as_pattern(g: Graph) -> Pattern:
    """Reinterpret a connected graph as a pattern, dropping features."""
    return Pattern.build(g.node_types, g.edges, g.edge_types)


@dataclass
class GraphDatabase:
    """A set of graphs plus labels.

    ``dataset_labels`` are the labels shipped with the data (used for
    training); ``labels`` are the labels assigned by running the classifier,
    which is what all explanation flows group by.
    """

    graphs: tuple[Graph, ...]
    dataset_labels: dict[int, int] = field(default_factory=dict)
    labels: dict[int, int] = field(default_factory=dict)
    ground_truth: dict[int, tuple[int, ...]] | None = None

    def label_groups(self) -> dict[int, tuple[int, ...]]:
        """Partition assigned-label graph ids by label, ids ascending."""
        groups: dict[int, list[int]] = {}
        for gid in sorted(self.labels):
            groups.setdefault(self.labels[gid], []).append(gid)
        return {l: tuple(ids) for l, ids in sorted(groups.items())}


def match_pattern(p: Pattern, g: Graph) -> list[Matching]:
    """Enumerate all node-induced matches of ``p`` in ``g``.

    Returns injective maps as tuples (pattern node i -> tuple[i]), in
    lexicographic order of the mapped id tuple.  Backtracks over pattern
    nodes in id order with type and degree pruning; each extension is
    checked against every already-mapped node so induced (non-edge)
    consistency holds at all times.
    """
    if p.n > g.n:
        return []
    # candidates per pattern node: matching type, enough incident edges
    candidates: list[list[int]] = []
    for i in range(p.n):
        need = len(p.neighbors[i])
        cand = [
            v
            for v in range(g.n)
            if g.node_types[v] == p.node_types[i] and g.degrees[v] >= need
        ]
        if not cand:
            return []
        candidates.append(cand)

    results: list[Matching] = []
    assigned: list[int] = []
    used: set[int] = set()
    p_edge_types = p.edge_type_map
    g_edge_types = g.edge_type_map

    def extend(i: int) -> None:
        if i == p.n:
            results.append(tuple(assigned))
            return
        for v in candidates[i]:
            if v in used:
                continue
            ok = True
            for j in range(i):
                pe = (j, i)
                w = assigned[j]
                ge = (w, v) if w < v else (v, w)
                pt = p_edge_types.get(pe)
                gt = g_edge_types.get(ge)
                if (pt is None) != (gt is None) or (pt is not None and pt != gt):
                    ok = False
                    break
            if not ok:
                continue
            assigned.append(v)
            used.add(v)
            extend(i + 1)
            assigned.pop()
            used.remove(v)

    extend(0)
    return results


def covers(
    patterns,
    g: Graph,
    targets,
) -> tuple[set[int], set[Edge]]:
    """Nodes of ``targets`` and edges of ``g`` covered by any pattern match."""
    targets = set(targets)
    covered_nodes: set[int] = set()
    covered_edges: set[Edge] = set()
    for p in patterns:
        for m in match_pattern(p, g):
            covered_nodes.update(v for v in m if v in targets)
            for u, v in p.edges:
                a, b = m[u], m[v]
                covered_edges.add((a, b) if a < b else (b, a))
    return covered_nodes, covered_edges


def induced_subgraph(g: Graph, nodes) -> Graph:
    """Node-induced subgraph; new ids follow ascending original id order.

    ``origin`` records the original id of each new node (composed through
    ``g.origin`` when g is itself a subgraph).
    """
    keep = sorted(set(int(v) for v in nodes))
    for v in keep:
        if not (0 <= v < g.n):
            raise GraphStructureError(f"induced_subgraph: node {v} not in graph")
    remap = {old: new for new, old in enumerate(keep)}
    edges = []
    etypes = []
    for (u, v), t in zip(g.edges, g.edge_types):
        if u in remap and v in remap:
            edges.append((remap[u], remap[v]))
            etypes.append(t)
    if g.origin is not None:
        origin = tuple(g.origin[v] for v in keep)
    else:
        origin = tuple(keep)
    feats = g.features[keep] if keep else g.features[:0]
    return Graph.build(
        [g.node_types[v] for v in keep],
        feats,
        edges,
        etypes,
        origin=origin,
    )


def remove_subgraph(g: Graph, nodes) -> Graph:
    """Drop ``nodes`` and their incident edges; the complement stays put."""
    drop = set(int(v) for v in nodes)
    for v in drop:
        if not (0 <= v < g.n):
            raise GraphStructureError(f"remove_subgraph: node {v} not in graph")
    return induced_subgraph(g, [v for v in range(g.n) if v not in drop])
