"""Greedy construction of counterfactual explanation subgraphs.

One graph at a time: grow a node set V_S by repeatedly adding the candidate
with the best objective gain, where a candidate must keep the grown set a
valid explanation (consistent and counterfactual, verified by the model)
and inside the per-label size window.  The candidate pool is rebuilt every
round; every node that ever qualified is remembered and re-validated when a
lower size bound still has to be met.  Ties break to the smallest node id,
making the whole construction deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

from graphlens.errors import LabelMismatchError
from graphlens.gcn import (
    GcnModel,
    InfluenceTable,
    forward,
    influence_exact,
    influence_rw,
    verify_explanation,
)
from graphlens.graphs import Graph, GraphDatabase, induced_subgraph
from graphlens.scoring import Config, ScoreState


@dataclass(frozen=True, eq=False)
class ExplanationSubgraph:
    """A verified explanation for one graph.

    ``nodes`` are ids in the source graph; ``subgraph`` is their induced
    subgraph (its ``origin`` maps back to source ids).
    """

    graph_id: int
    nodes: frozenset[int]
    subgraph: Graph
    label: int


def build_influence(m: GcnModel, g: Graph, cfg: Config) -> InfluenceTable:
    """Influence table in the configured mode."""
    if cfg.influence_mode == "exact":
        return influence_exact(m, g)
    return influence_rw(m, g, walks=cfg.rw_walks, sampled=cfg.rw_sampled, seed=cfg.rw_seed)


def can_extend(v: int, selected, g: Graph, m: GcnModel, cfg: Config, label: int) -> bool:
    """Whether selected + {v} is a valid explanation that still fits u_l."""
    grown = set(selected) | {int(v)}
    _, upper = cfg.window(label)
    if len(grown) > upper:
        return False
    return verify_explanation(m, g, grown, label)


def explain_graph(
    g: Graph,
    graph_id: int,
    m: GcnModel,
    cfg: Config,
    label: int,
    table: InfluenceTable | None = None,
) -> ExplanationSubgraph | None:
    """Greedy explanation for a single graph classified as ``label``.

    Returns None when no valid explanation inside the size window is
    reachable (including the degenerate empty set, which is never
    consistent).
    """
    if forward(m, g).label != label:
        raise LabelMismatchError(
            f"explain: graph {graph_id} is not classified as label {label}"
        )
    if table is None:
        table = build_influence(m, g, cfg)
    lower, upper = cfg.window(label)
    state = ScoreState(table, cfg)
    selected: set[int] = set()
    reservoir: set[int] = set()

    # growth phase: best valid gain per round, pool rebuilt from scratch
    while len(selected) < upper:
        pool = [
            v
            for v in range(g.n)
            if v not in selected and can_extend(v, selected, g, m, cfg, label)
        ]
        if not pool:
            break
        reservoir.update(pool)
        best = max(pool, key=lambda v: (state.gain(v), -v))
        selected.add(best)
        state.add(best)
        reservoir.discard(best)

    # lower-bound phase: pull remembered candidates, re-validated against
    # the current set, until the window floor is met
    while len(selected) < lower:
        valid = [
            v for v in sorted(reservoir)
            if v not in selected and can_extend(v, selected, g, m, cfg, label)
        ]
        if not valid:
            return None
        best = max(valid, key=lambda v: (state.gain(v), -v))
        selected.add(best)
        state.add(best)
        reservoir.discard(best)

    if not selected or not verify_explanation(m, g, selected, label):
        return None
    return ExplanationSubgraph(
        graph_id=graph_id,
        nodes=frozenset(selected),
        subgraph=induced_subgraph(g, selected),
        label=label,
    )


@dataclass(frozen=True, eq=False)
class ExplainResult:
    """Per-label explanation subgraphs plus the graphs that yielded none."""

    subgraphs: dict[int, tuple[ExplanationSubgraph, ...]]
    uncovered: dict[int, tuple[int, ...]]


def explain_database(
    db: GraphDatabase,
    m: GcnModel,
    cfg: Config,
    labels=None,
) -> ExplainResult:
    """Run the greedy explainer over every graph of the requested labels."""
    groups = db.label_groups()
    if labels is None:
        labels = sorted(groups)
    subgraphs: dict[int, tuple[ExplanationSubgraph, ...]] = {}
    uncovered: dict[int, tuple[int, ...]] = {}
    for label in labels:
        found = []
        missed = []
        for gid in groups.get(label, ()):
            sub = explain_graph(db.graphs[gid], gid, m, cfg, label)
            if sub is None:
                missed.append(gid)
            else:
                found.append(sub)
        subgraphs[label] = tuple(found)
        uncovered[label] = tuple(missed)
    return ExplainResult(subgraphs, uncovered)
