"""Quality metrics for emitted explanation views.

All averages run over the graphs that actually have an explanation
subgraph; graphs lacking one are listed, never silently dropped into the
mean.  Fidelity compares the model's probability for the originally
assigned label before and after cutting the explanation out (fidelity+) or
down to it (fidelity-).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from graphlens.gcn import GcnModel, forward
from graphlens.graphs import GraphDatabase, induced_subgraph, remove_subgraph
from graphlens.summarize import ExplanationView


@dataclass(frozen=True, eq=False)
class MetricsReport:
    fidelity_plus: float
    fidelity_minus: float
    sparsity: float
    compression: float
    edge_loss_pct: float
    covered_graphs: tuple[int, ...]
    missing_graphs: tuple[int, ...]
    per_graph: dict[int, dict[str, float]] = field(default_factory=dict)


def _iter_views(views) -> list[ExplanationView]:
    """Accept a label -> view mapping or a plain iterable of views."""
    if isinstance(views, dict):
        return [views[label] for label in sorted(views)]
    return list(views)


def _view_subgraphs(views) -> dict[int, frozenset[int]]:
    """graph id -> explanation node set, pooled over all views."""
    out: dict[int, frozenset[int]] = {}
    for view in _iter_views(views):
        for sub in view.subgraphs:
            out[sub.graph_id] = sub.nodes
    return out


def _prob_of(m: GcnModel, g, label: int) -> float:
    return float(forward(m, g).probabilities[label])


def fidelity_plus(db: GraphDatabase, views, m: GcnModel) -> tuple[float, dict[int, float]]:
    """Mean drop in assigned-label probability when the explanation is removed."""
    subs = _view_subgraphs(views)
    per: dict[int, float] = {}
    for gid, nodes in sorted(subs.items()):
        g = db.graphs[gid]
        label = db.labels[gid]
        per[gid] = _prob_of(m, g, label) - _prob_of(m, remove_subgraph(g, nodes), label)
    mean = float(np.mean(list(per.values()))) if per else 0.0
    return mean, per


def fidelity_minus(db: GraphDatabase, views, m: GcnModel) -> tuple[float, dict[int, float]]:
    """Mean drop when the graph is reduced to the explanation alone."""
    subs = _view_subgraphs(views)
    per: dict[int, float] = {}
    for gid, nodes in sorted(subs.items()):
        g = db.graphs[gid]
        label = db.labels[gid]
        per[gid] = _prob_of(m, g, label) - _prob_of(m, induced_subgraph(g, nodes), label)
    mean = float(np.mean(list(per.values()))) if per else 0.0
    return mean, per


def sparsity(db: GraphDatabase, views) -> tuple[float, dict[int, float]]:
    """Mean of 1 - (|V_s| + |E_s|) / (|V| + |E|) over covered graphs."""
    per: dict[int, float] = {}
    for view in _iter_views(views):
        for sub in view.subgraphs:
            g = db.graphs[sub.graph_id]
            size = sub.subgraph.n + len(sub.subgraph.edges)
            per[sub.graph_id] = 1.0 - size / (g.n + len(g.edges))
    mean = float(np.mean(list(per.values()))) if per else 0.0
    return mean, per


def compression(views) -> float:
    """1 - pattern-tier size over subgraph-tier size, distinct patterns once."""
    pattern_size = 0
    seen = set()
    sub_size = 0
    for view in _iter_views(views):
        for p in view.patterns:
            code = p.canonical_code
            if code in seen:
                continue
            seen.add(code)
            pattern_size += p.n + len(p.edges)
        for sub in view.subgraphs:
            sub_size += sub.subgraph.n + len(sub.subgraph.edges)
    if sub_size == 0:
        return 0.0
    return 1.0 - pattern_size / sub_size


def edge_loss_pct(views) -> float:
    """Percentage of subgraph-tier edges not covered by any pattern."""
    pooled = _iter_views(views)
    covered = sum(v.covered_edges for v in pooled)
    total = sum(v.total_edges for v in pooled)
    if total == 0:
        return 0.0
    return 100.0 * (1.0 - covered / total)


def report(db: GraphDatabase, views, m: GcnModel) -> MetricsReport:
    subs = _view_subgraphs(views)
    covered = tuple(sorted(subs))
    missing = tuple(gid for gid in sorted(db.labels) if gid not in subs)
    fplus, per_plus = fidelity_plus(db, views, m)
    fminus, per_minus = fidelity_minus(db, views, m)
    spars, per_spars = sparsity(db, views)
    per: dict[int, dict[str, float]] = {
        gid: {
            "fidelity_plus": per_plus[gid],
            "fidelity_minus": per_minus[gid],
            "sparsity": per_spars[gid],
        }
        for gid in covered
    }
    return MetricsReport(
        fidelity_plus=fplus,
        fidelity_minus=fminus,
        sparsity=spars,
        compression=compression(views),
        edge_loss_pct=edge_loss_pct(views),
        covered_graphs=covered,
        missing_graphs=missing,
        per_graph=per,
    )


def random_baseline_fidelity(
    db: GraphDatabase,
    views,
    m: GcnModel,
    seed: int,
    samples: int = 20,
) -> list[float]:
    """Fidelity+ of random same-size node sets, one mean per sample round."""
    subs = _view_subgraphs(views)
    rng = np.random.default_rng(seed)
    rounds = []
    for _ in range(samples):
        drops = []
        for gid, nodes in sorted(subs.items()):
            g = db.graphs[gid]
            label = db.labels[gid]
            pick = rng.choice(g.n, size=len(nodes), replace=False)
            drops.append(
                _prob_of(m, g, label) - _prob_of(m, remove_subgraph(g, pick), label)
            )
        rounds.append(float(np.mean(drops)) if drops else 0.0)
    return rounds
