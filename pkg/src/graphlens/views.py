"""Versioned JSON serialization of explanation views.

A view file is self-contained enough to re-verify: it carries the label,
the configuration echo, the pattern tier (types + typed edges) and the
subgraph tier as node id lists into the source graphs of the dataset it was
computed from.
"""

from __future__ import annotations

import json

from graphlens.errors import DatasetFormatError
from graphlens.explain import ExplanationSubgraph
from graphlens.graphs import Graph, GraphDatabase, Pattern, induced_subgraph
from graphlens.scoring import Config
from graphlens.summarize import ExplanationView

SCHEMA = "explanation-view/1"


def view_to_dict(view: ExplanationView, cfg: Config) -> dict:
    return {
        "schema": SCHEMA,
        "label": view.label,
        "config": cfg.to_dict(),
        "patterns": [
            {
                "node_types": list(p.node_types),
                "edges": [[u, v, t] for (u, v), t in zip(p.edges, p.edge_types)],
            }
            for p in view.patterns
        ],
        "subgraphs": [
            {"graph_id": s.graph_id, "nodes": sorted(s.nodes)}
            for s in sorted(view.subgraphs, key=lambda s: s.graph_id)
        ],
        "stats": {
            "covered_nodes": view.covered_nodes,
            "total_nodes": view.total_nodes,
            "covered_edges": view.covered_edges,
            "total_edges": view.total_edges,
            "edge_loss_pct": view.edge_loss_pct,
        },
    }


def view_from_dict(doc: dict, db: GraphDatabase, source: str = "<view>") -> tuple[ExplanationView, Config]:
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise DatasetFormatError(f"{source}: expected schema {SCHEMA!r}")
    try:
        cfg = Config.from_dict(doc["config"])
        label = int(doc["label"])
        patterns = tuple(
            Pattern.build(
                p["node_types"],
                [(e[0], e[1]) for e in p["edges"]],
                [e[2] for e in p["edges"]],
            )
            for p in doc["patterns"]
        )
        subgraphs = []
        for s in doc["subgraphs"]:
            gid = int(s["graph_id"])
            nodes = frozenset(int(v) for v in s["nodes"])
            # claims about unknown graphs or nodes are kept verbatim so the
            # verifier can reject them as C1 violations; the rebuilt subgraph
            # only ever covers ids that exist
            if 0 <= gid < len(db.graphs):
                g = db.graphs[gid]
                rebuilt = induced_subgraph(g, {v for v in nodes if 0 <= v < g.n})
            else:
                rebuilt = Graph.build([], [])
            subgraphs.append(
                ExplanationSubgraph(
                    graph_id=gid,
                    nodes=nodes,
                    subgraph=rebuilt,
                    label=label,
                )
            )
        stats = doc.get("stats", {})
        view = ExplanationView(
            label=label,
            patterns=patterns,
            subgraphs=tuple(subgraphs),
            covered_nodes=int(stats.get("covered_nodes", 0)),
            total_nodes=int(stats.get("total_nodes", 0)),
            covered_edges=int(stats.get("covered_edges", 0)),
            total_edges=int(stats.get("total_edges", 0)),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise DatasetFormatError(f"{source}: malformed view file ({exc})") from exc
    return view, cfg


def save_view(view: ExplanationView, cfg: Config, path) -> None:
    with open(path, "w") as fh:
        json.dump(view_to_dict(view, cfg), fh, indent=1)
        fh.write("\n")


def load_view(path, db: GraphDatabase) -> tuple[ExplanationView, Config]:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(f"{path}: not valid JSON ({exc})") from exc
    return view_from_dict(doc, db, str(path))
