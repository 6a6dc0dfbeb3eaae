"""Database-level explanation driver with optional process parallelism.

Work is sharded per graph: every task owns its graph, builds its own
influence table and returns an immutable result, so workers share nothing.
Results are merged in (label, graph id) order, which makes the emitted
views byte-identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from graphlens.errors import GraphlensError
from graphlens.explain import ExplanationSubgraph, explain_graph
from graphlens.gcn import GcnModel
from graphlens.graphs import Graph, match_pattern
from graphlens.scoring import Config
from graphlens.stream import stream_graph
from graphlens.summarize import ExplanationView, summarize


@dataclass(frozen=True, eq=False)
class RunResult:
    views: dict[int, ExplanationView]
    uncovered: dict[int, tuple[int, ...]]


def _solve_one(task) -> tuple[int, int, ExplanationSubgraph | None, tuple]:
    g, gid, label, model, cfg, algo = task
    if algo == "approx":
        sub = explain_graph(g, gid, model, cfg, label)
        return label, gid, sub, ()
    view, _state = stream_graph(g, gid, model, cfg, label)
    if view is None:
        return label, gid, None, ()
    return label, gid, view.subgraphs[0], tuple(view.patterns)


def _stream_label_view(label: int, subs, patterns) -> ExplanationView:
    """Merge per-graph stream results into one label-level view."""
    unique = []
    seen = set()
    for p in patterns:
        if p.canonical_code not in seen:
            seen.add(p.canonical_code)
            unique.append(p)
    covered_nodes = 0
    covered_edges = set()
    total_nodes = sum(s.subgraph.n for s in subs)
    total_edges = sum(len(s.subgraph.edges) for s in subs)
    for s in subs:
        hit = set()
        for p in unique:
            for m in match_pattern(p, s.subgraph):
                hit.update(m)
                for a, b in p.edges:
                    x, y = m[a], m[b]
                    covered_edges.add((s.graph_id, (x, y) if x < y else (y, x)))
        covered_nodes += len(hit)
    return ExplanationView(
        label=label,
        patterns=tuple(unique),
        subgraphs=tuple(subs),
        covered_nodes=covered_nodes,
        total_nodes=total_nodes,
        covered_edges=len(covered_edges),
        total_edges=total_edges,
    )


def run_explain(
    db,
    m: GcnModel,
    cfg: Config,
    labels=None,
    algo: str = "approx",
    workers: int = 1,
) -> RunResult:
    if algo not in ("approx", "stream"):
        raise GraphlensError(f"runner: unknown algorithm {algo!r}")
    groups = db.label_groups()
    if labels is None:
        labels = sorted(groups)
    tasks = [
        (db.graphs[gid], gid, label, m, cfg, algo)
        for label in labels
        for gid in groups.get(label, ())
    ]
    if workers <= 1:
        outcomes = [_solve_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_solve_one, tasks, chunksize=1))

    views: dict[int, ExplanationView] = {}
    uncovered: dict[int, tuple[int, ...]] = {}
    for label in labels:
        rows = [o for o in outcomes if o[0] == label]
        subs = [o[2] for o in rows if o[2] is not None]
        uncovered[label] = tuple(o[1] for o in rows if o[2] is None)
        if not subs:
            continue
        if algo == "approx":
            views[label] = summarize(subs, cfg, label)
        else:
            merged_patterns = [p for o in rows for p in o[3]]
            views[label] = _stream_label_view(label, subs, merged_patterns)
    return RunResult(views=views, uncovered=uncovered)
