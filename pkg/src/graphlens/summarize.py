"""Pattern tier: frequent-pattern mining and weighted set-cover summaries.

Candidates are connected node-induced fragments of the explanation
subgraphs, deduplicated by a canonical code and kept when they occur in at
least ``pattern_min_support`` subgraphs.  Per-type singleton patterns are
always added so full node coverage stays achievable.  A pattern's weight is
1 - (covered subgraph edges / total subgraph edges); covering picks greedily
by newly-covered-nodes per unit weight, zero-weight candidates first.
"""

from __future__ import annotations

from dataclasses import dataclass

from graphlens.errors import CoverError
from graphlens.explain import ExplanationSubgraph
from graphlens.graphs import Edge, Graph, Pattern, induced_subgraph, match_pattern
from graphlens.scoring import Config

NodeRef = tuple[int, int]       # (graph id, node id within the subgraph)
EdgeRef = tuple[int, Edge]


@dataclass(frozen=True, eq=False)
class PatternCandidate:
    """A mined pattern with its coverage over the explanation subgraphs."""

    pattern: Pattern
    support: int
    covered_nodes: frozenset[NodeRef]
    covered_edges: frozenset[EdgeRef]
    weight: float

    @property
    def code(self) -> tuple:
        return self.pattern.canonical_code


@dataclass(frozen=True, eq=False)
class ExplanationView:
    """Two-tier explanation: selected patterns over verified subgraphs."""

    label: int
    patterns: tuple[Pattern, ...]
    subgraphs: tuple[ExplanationSubgraph, ...]
    covered_nodes: int
    total_nodes: int
    covered_edges: int
    total_edges: int

    @property
    def edge_loss_pct(self) -> float:
        if self.total_edges == 0:
            return 0.0
        return 100.0 * (1.0 - self.covered_edges / self.total_edges)


def connected_fragments(g: Graph, max_nodes: int) -> set[frozenset[int]]:
    """All connected node subsets of g with 1..max_nodes nodes."""
    found: set[frozenset[int]] = set()
    for v in range(g.n):
        seed = frozenset([v])
        if seed in found:
            continue
        frontier = [seed]
        found.add(seed)
        while frontier:
            cur = frontier.pop()
            if len(cur) == max_nodes:
                continue
            reach = set()
            for u in cur:
                reach.update(g.neighbors[u])
            for w in sorted(reach - cur):
                grown = cur | {w}
                if grown not in found:
                    found.add(grown)
                    frontier.append(grown)
    return found


def _coverage(
    pattern: Pattern,
    subgraphs,
) -> tuple[int, set[NodeRef], set[EdgeRef]]:
    """Match one pattern inside every subgraph; support counts subgraphs hit."""
    support = 0
    nodes: set[NodeRef] = set()
    edges: set[EdgeRef] = set()
    for sub in subgraphs:
        hits = match_pattern(pattern, sub.subgraph)
        if not hits:
            continue
        support += 1
        for m in hits:
            nodes.update((sub.graph_id, v) for v in m)
            for u, v in pattern.edges:
                a, b = m[u], m[v]
                edges.add((sub.graph_id, (a, b) if a < b else (b, a)))
    return support, nodes, edges


def mine_patterns(subgraphs, cfg: Config) -> list[PatternCandidate]:
    """Candidate patterns over a set of explanation subgraphs.

    Grows connected fragments per subgraph, pools them by canonical code,
    keeps codes reaching the support floor, and always adds one singleton
    per node type.  Coverage sets are then computed via match_pattern so
    they reflect every occurrence, not just the fragments that proposed the
    code.
    """
    total_edges = sum(len(s.subgraph.edges) for s in subgraphs)
    by_code: dict[tuple, Pattern] = {}
    seen_in: dict[tuple, set[int]] = {}
    for sub in subgraphs:
        g = sub.subgraph
        for frag in connected_fragments(g, cfg.pattern_max_nodes):
            piece = induced_subgraph(g, frag)
            pattern = Pattern.build(piece.node_types, piece.edges, piece.edge_types)
            code = pattern.canonical_code
            by_code.setdefault(code, pattern)
            seen_in.setdefault(code, set()).add(sub.graph_id)

    keep: dict[tuple, Pattern] = {
        code: p for code, p in by_code.items()
        if len(seen_in[code]) >= cfg.pattern_min_support
    }
    for t in sorted({t for s in subgraphs for t in s.subgraph.node_types}):
        singleton = Pattern.build([t])
        keep.setdefault(singleton.canonical_code, singleton)

    out = []
    for code in sorted(keep):
        pattern = keep[code]
        support, nodes, edges = _coverage(pattern, subgraphs)
        if support == 0:
            continue
        weight = 0.0 if total_edges == 0 else 1.0 - len(edges) / total_edges
        out.append(
            PatternCandidate(pattern, support, frozenset(nodes), frozenset(edges), weight)
        )
    return out


def _rank(c: PatternCandidate, new_nodes: int):
    """Greedy preference key; higher sorts first.

    Zero-weight candidates beat all weighted ones and rank by coverage;
    weighted ones rank by nodes-per-weight.  Ties: more nodes, lighter
    weight, then lexicographically smaller canonical code.
    """
    if c.weight == 0.0:
        lead = (1, float(new_nodes))
    else:
        lead = (0, new_nodes / c.weight)
    return (*lead, new_nodes, -c.weight, _NegCode(c.code))


class _NegCode:
    """Wrapper so a *smaller* canonical code wins a max() comparison."""

    __slots__ = ("code",)

    def __init__(self, code):
        self.code = code

    def __lt__(self, other):
        return self.code > other.code

    def __eq__(self, other):
        return self.code == other.code


def summarize(subgraphs, cfg: Config, label: int,
              candidates: list[PatternCandidate] | None = None) -> ExplanationView:
    """Greedy weighted set cover of all subgraph nodes by mined patterns."""
    subgraphs = tuple(subgraphs)
    if candidates is None:
        candidates = mine_patterns(subgraphs, cfg)
    universe: set[NodeRef] = {
        (s.graph_id, v) for s in subgraphs for v in range(s.subgraph.n)
    }
    total_nodes = len(universe)
    total_edges = sum(len(s.subgraph.edges) for s in subgraphs)

    chosen: list[PatternCandidate] = []
    uncovered = set(universe)
    remaining = list(candidates)
    while uncovered:
        scored = []
        for c in remaining:
            fresh = len(c.covered_nodes & uncovered)
            if fresh > 0:
                scored.append((c, fresh))
        if not scored:
            raise CoverError(
                f"summarize: {len(uncovered)} nodes of label {label} cannot be covered"
            )
        best, _ = max(scored, key=lambda cf: _rank(cf[0], cf[1]))
        chosen.append(best)
        uncovered -= best.covered_nodes
        remaining = [c for c in remaining if c is not best]

    covered_edges: set[EdgeRef] = set()
    for c in chosen:
        covered_edges.update(c.covered_edges)
    return ExplanationView(
        label=label,
        patterns=tuple(c.pattern for c in chosen),
        subgraphs=subgraphs,
        covered_nodes=total_nodes - len(uncovered),
        total_nodes=total_nodes,
        covered_edges=len(covered_edges),
        total_edges=total_edges,
    )
