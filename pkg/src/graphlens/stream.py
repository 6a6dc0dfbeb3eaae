"""One-pass node-stream explanation with bounded node and pattern caches.

Nodes arrive one at a time together with their edges to already-seen nodes
(incidence-list model); stream ids are assigned densely in arrival order.
Each step refreshes the influence table of the seen prefix, remembers the
arrival in the candidate reservoir, and -- when the grown node set would
still be a valid explanation -- updates the bounded node cache: insert
while below the size ceiling, skip when the arrival brings no new pattern
structure, otherwise swap against the weakest selected node when the
arrival's gain doubles the loss.  Whenever the node cache changes, the
pattern cache is refreshed so it always covers the current explanation
subgraph.

The influence refresh recomputes the table on the prefix instead of
patching a single row and column: a new node changes the degrees of its
neighbors, which reshapes the whole normalized adjacency, so a rank-one
patch cannot agree with from-scratch recomputation (and agreeing with it is
the contract).
"""

from __future__ import annotations

import numpy as np

from graphlens.errors import StreamOrderError
from graphlens.explain import ExplanationSubgraph, build_influence, can_extend
from graphlens.gcn import GcnModel, verify_explanation
from graphlens.graphs import Graph, Pattern, induced_subgraph, match_pattern
from graphlens.scoring import Config, ScoreState
from graphlens.summarize import ExplanationView, connected_fragments


class StreamState:
    """Mutable, single-owner state of one graph's node stream."""

    def __init__(self, m: GcnModel, cfg: Config, label: int):
        self.model = m
        self.cfg = cfg
        self.label = int(label)
        self.node_types: list[int] = []
        self.features: list[np.ndarray] = []
        self.edges: list[tuple[int, int]] = []
        self.edge_types: list[int] = []
        self.graph: Graph = Graph.build([], np.zeros((0, m.feature_dim)))
        self.score: ScoreState | None = None
        self.selected: set[int] = set()
        self.reservoir: set[int] = set()
        self.patterns: list[Pattern] = []
        self.pattern_weights: dict[tuple, float] = {}

    @property
    def n(self) -> int:
        return len(self.node_types)

    def clone(self) -> "StreamState":
        dup = object.__new__(StreamState)
        dup.model = self.model
        dup.cfg = self.cfg
        dup.label = self.label
        dup.node_types = list(self.node_types)
        dup.features = list(self.features)
        dup.edges = list(self.edges)
        dup.edge_types = list(self.edge_types)
        dup.graph = self.graph
        dup.score = self.score.clone() if self.score is not None else None
        dup.selected = set(self.selected)
        dup.reservoir = set(self.reservoir)
        dup.patterns = list(self.patterns)
        dup.pattern_weights = dict(self.pattern_weights)
        return dup

    def _refresh(self) -> None:
        """Rebuild prefix graph, influence table and objective state."""
        self.graph = Graph.build(
            self.node_types,
            np.array(self.features, dtype=np.float64).reshape(self.n, -1)
            if self.n
            else np.zeros((0, self.model.feature_dim)),
            self.edges,
            self.edge_types,
        )
        table = build_influence(self.model, self.graph, self.cfg)
        score = ScoreState(table, self.cfg)
        for u in sorted(self.selected):
            score.add(u)
        self.score = score

    def current_subgraph(self) -> Graph:
        return induced_subgraph(self.graph, self.selected)


def stream_step(
    st: StreamState,
    node_type: int,
    feature,
    incident_edges,
) -> StreamState:
    """Process one arriving node; returns the mutated state.

    ``incident_edges`` is a list of (seen node id, edge type) pairs.  The
    new node's id is the arrival index.
    """
    v = st.n
    seen_pairs = set()
    for u, _t in incident_edges:
        if not (0 <= int(u) < v):
            raise StreamOrderError(
                f"stream: node {v} arrived with an edge to unseen node {u}"
            )
        if int(u) in seen_pairs:
            raise StreamOrderError(f"stream: node {v} repeats edge to {u}")
        seen_pairs.add(int(u))
    feat = np.asarray(feature, dtype=np.float64).reshape(-1)
    if feat.shape[0] != st.model.feature_dim:
        raise StreamOrderError(
            f"stream: node {v} feature dim {feat.shape[0]} != model dim {st.model.feature_dim}"
        )
    st.node_types.append(int(node_type))
    st.features.append(feat)
    for u, t in incident_edges:
        st.edges.append((int(u), v))
        st.edge_types.append(int(t))
    st._refresh()
    st.reservoir.add(v)
    # the gate is explanation validity alone; the size ceiling is enforced
    # by the cache update itself (inserts stop at the ceiling, swaps keep
    # the size), so a full cache can still consider swapping the arrival in
    if verify_explanation(st.model, st.graph, st.selected | {v}, st.label):
        if _update_node_cache(st, v):
            _update_pattern_cache(st)
    return st


def _pattern_covers_node(st: StreamState, v: int) -> bool:
    """Does any cached pattern match the grown subgraph mapping onto v?"""
    grown = sorted(st.selected | {v})
    sub = induced_subgraph(st.graph, grown)
    local_v = grown.index(v)
    for p in st.patterns:
        for m in match_pattern(p, sub):
            if local_v in m:
                return True
    return False


def _novel_patterns_near(st: StreamState, v: int) -> bool:
    """Does v's hop neighborhood yield any pattern code not yet cached?"""
    hops = st.cfg.hop_count()
    ball = {v}
    frontier = {v}
    for _ in range(hops):
        nxt = set()
        for u in frontier:
            nxt.update(st.graph.neighbors[u])
        frontier = nxt - ball
        ball |= frontier
    neighborhood = induced_subgraph(st.graph, ball)
    cached = {p.canonical_code for p in st.patterns}
    for frag in connected_fragments(neighborhood, st.cfg.pattern_max_nodes):
        piece = induced_subgraph(neighborhood, frag)
        code = Pattern.build(piece.node_types, piece.edges, piece.edge_types).canonical_code
        if code not in cached:
            return True
    return False


def _update_node_cache(st: StreamState, v: int) -> bool:
    """Bounded-cache insert/skip/swap for a validated arrival.

    Returns True when the selected set changed.
    """
    _, upper = st.cfg.window(st.label)
    if len(st.selected) < upper:
        st.selected.add(v)
        st.score.add(v)
        st.reservoir.discard(v)
        return True

    if _pattern_covers_node(st, v) or not _novel_patterns_near(st, v):
        return False

    # swap: weakest selected node out if the arrival at least doubles it
    weakest = min(sorted(st.selected), key=lambda u: (st.score.removal_loss(u), u))
    loss = st.score.removal_loss(weakest)
    st.score.remove(weakest)
    gain = st.score.gain(v)
    swap_set = (st.selected - {weakest}) | {v}
    if gain >= 2.0 * loss and verify_explanation(
        st.model, st.graph, swap_set, st.label
    ):
        # the everify guard keeps the cached set a valid explanation; the
        # plain doubling rule alone could evict the node that carries the
        # counterfactual
        st.selected = swap_set
        st.score.add(v)
        st.reservoir.discard(v)
        st.reservoir.add(weakest)
        return True
    st.score.add(weakest)
    return False


def _connected_chunks(g: Graph, nodes: set[int], cap: int) -> list[list[int]]:
    """Partition ``nodes`` into connected chunks of at most ``cap`` nodes."""
    remaining = set(nodes)
    chunks = []
    while remaining:
        start = min(remaining)
        chunk = [start]
        remaining.remove(start)
        frontier = [start]
        while frontier and len(chunk) < cap:
            u = frontier.pop(0)
            for w in g.neighbors[u]:
                if w in remaining and len(chunk) < cap:
                    remaining.remove(w)
                    chunk.append(w)
                    frontier.append(w)
        chunks.append(chunk)
    return chunks


def _update_pattern_cache(st: StreamState) -> None:
    """Keep the pattern cache covering the current explanation subgraph.

    Patterns that still match the subgraph are retained; uncovered nodes are
    patched with patterns cut from the uncovered induced part (connected
    chunks within the size cap, so they match in place by construction).
    Unused patterns are evicted heaviest-first only when a cache capacity is
    configured and exceeded.
    """
    if not st.selected:
        return
    sub = st.current_subgraph()
    used: list[Pattern] = []
    used_codes: set[tuple] = set()
    covered: set[int] = set()
    covered_edges: dict[tuple, set] = {}
    for p in st.patterns:
        hits = match_pattern(p, sub)
        if not hits:
            continue
        code = p.canonical_code
        if code in used_codes:
            continue
        used.append(p)
        used_codes.add(code)
        edges_here = set()
        for m in hits:
            covered.update(m)
            for a, b in p.edges:
                x, y = m[a], m[b]
                edges_here.add((x, y) if x < y else (y, x))
        covered_edges[code] = edges_here

    uncovered = set(range(sub.n)) - covered
    fresh: list[Pattern] = []
    if uncovered:
        for chunk in _connected_chunks(sub, uncovered, st.cfg.pattern_max_nodes):
            piece = induced_subgraph(sub, chunk)
            p = Pattern.build(piece.node_types, piece.edges, piece.edge_types)
            if p.canonical_code not in used_codes:
                used.append(p)
                used_codes.add(p.canonical_code)
                fresh.append(p)

    idle = [p for p in st.patterns if p.canonical_code not in used_codes]
    cache = used + idle
    cap = st.cfg.pattern_cache_capacity
    weights = _pattern_weights(cache, sub)
    if cap is not None and len(cache) > cap:
        # heaviest unused go first; used patterns are load-bearing
        idle_sorted = sorted(
            idle,
            key=lambda p: (weights[p.canonical_code], p.canonical_code),
            reverse=True,
        )
        for p in idle_sorted:
            if len(cache) <= cap:
                break
            cache.remove(p)
    st.patterns = cache
    st.pattern_weights = _pattern_weights(cache, sub)


def _pattern_weights(patterns, sub: Graph) -> dict[tuple, float]:
    total = len(sub.edges)
    out: dict[tuple, float] = {}
    for p in patterns:
        if total == 0:
            out[p.canonical_code] = 0.0
            continue
        edges = set()
        for m in match_pattern(p, sub):
            for a, b in p.edges:
                x, y = m[a], m[b]
                edges.add((x, y) if x < y else (y, x))
        out[p.canonical_code] = 1.0 - len(edges) / total
    return out


def stream_finish(st: StreamState, graph_id: int = 0) -> ExplanationView | None:
    """Close the stream: meet the size floor from the reservoir, then emit.

    Returns None when the floor cannot be met or the cached set is no
    longer a valid explanation of the full graph (later arrivals can flip
    the leftover side even though every insertion was validated at its
    time).
    """
    lower, _ = st.cfg.window(st.label)
    changed = False
    while len(st.selected) < lower:
        valid = [
            u
            for u in sorted(st.reservoir - st.selected)
            if can_extend(u, st.selected, st.graph, st.model, st.cfg, st.label)
        ]
        if not valid:
            return None
        best = max(valid, key=lambda u: (st.score.gain(u), -u))
        st.selected.add(best)
        st.score.add(best)
        st.reservoir.discard(best)
        changed = True
        _update_pattern_cache(st)
    if not st.selected:
        return None
    if not verify_explanation(st.model, st.graph, st.selected, st.label):
        return None
    if changed or not st.patterns:
        _update_pattern_cache(st)
    sub = ExplanationSubgraph(
        graph_id=graph_id,
        nodes=frozenset(st.selected),
        subgraph=st.current_subgraph(),
        label=st.label,
    )
    return _assemble_view(st, sub)


def _assemble_view(st: StreamState, sub: ExplanationSubgraph) -> ExplanationView:
    g = sub.subgraph
    covered_nodes, covered_edges = set(), set()
    for p in st.patterns:
        for m in match_pattern(p, g):
            covered_nodes.update(m)
            for a, b in p.edges:
                x, y = m[a], m[b]
                covered_edges.add((x, y) if x < y else (y, x))
    return ExplanationView(
        label=st.label,
        patterns=tuple(st.patterns),
        subgraphs=(sub,),
        covered_nodes=len(covered_nodes),
        total_nodes=g.n,
        covered_edges=len(covered_edges),
        total_edges=len(g.edges),
    )


def stream_graph(
    g: Graph,
    graph_id: int,
    m: GcnModel,
    cfg: Config,
    label: int,
    order=None,
) -> tuple[ExplanationView | None, StreamState]:
    """Stream a stored graph in the given node order (default: id order).

    Stream-internal ids are arrival indices; the emitted view is remapped
    to original node ids before returning.
    """
    order = list(range(g.n)) if order is None else [int(v) for v in order]
    if sorted(order) != list(range(g.n)):
        raise StreamOrderError("stream: order must be a permutation of the node ids")
    to_stream = {orig: k for k, orig in enumerate(order)}
    st = StreamState(m, cfg, label)
    for k, orig in enumerate(order):
        incident = []
        for w in g.neighbors[orig]:
            if to_stream[w] < k:
                e = (orig, w) if orig < w else (w, orig)
                incident.append((to_stream[w], g.edge_type_map[e]))
        stream_step(st, g.node_types[orig], g.features[orig], incident)
    view = stream_finish(st, graph_id)
    if view is None:
        return None, st
    original_nodes = frozenset(order[v] for v in st.selected)
    sub = ExplanationSubgraph(
        graph_id=graph_id,
        nodes=original_nodes,
        subgraph=induced_subgraph(g, original_nodes),
        label=label,
    )
    remapped = _assemble_view_from(view, sub)
    return remapped, st


def _assemble_view_from(view: ExplanationView, sub: ExplanationSubgraph) -> ExplanationView:
    g = sub.subgraph
    covered_nodes, covered_edges = set(), set()
    for p in view.patterns:
        for m in match_pattern(p, g):
            covered_nodes.update(m)
            for a, b in p.edges:
                x, y = m[a], m[b]
                covered_edges.add((x, y) if x < y else (y, x))
    return ExplanationView(
        label=view.label,
        patterns=view.patterns,
        subgraphs=(sub,),
        covered_nodes=len(covered_nodes),
        total_nodes=g.n,
        covered_edges=len(covered_edges),
        total_edges=len(g.edges),
    )
