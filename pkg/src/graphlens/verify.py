"""Independent re-verification of emitted explanation views.

Three constraints, checked in order, mirroring how a view is defined:

* C1 -- the file describes a well-formed graph view: every subgraph names
  distinct existing nodes of its source graph and classifies to the view's
  label group, and every pattern occurs in at least one subgraph (no
  phantom patterns).
* C2 -- every subgraph is a real explanation: consistent and counterfactual
  under the supplied model (everify).
* C3 -- proper coverage: every subgraph's size sits inside the label's
  [lower, upper] window and every subgraph node is covered by some pattern
  match.

The checker shares only the matcher and the forward pass with the
construction path; coverage and windows are recomputed from scratch here.
"""

from __future__ import annotations

from dataclasses import dataclass

from graphlens.gcn import GcnModel, forward, verify_explanation
from graphlens.graphs import GraphDatabase, match_pattern
from graphlens.scoring import Config
from graphlens.summarize import ExplanationView


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    constraint: str | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _fail(constraint: str, detail: str) -> VerificationResult:
    return VerificationResult(False, constraint, detail)


def verify_view(
    view: ExplanationView,
    db: GraphDatabase,
    m: GcnModel,
    cfg: Config,
) -> VerificationResult:
    # C1: structural well-formedness of the two tiers
    if not view.subgraphs:
        return _fail("C1", f"label {view.label}: view has no subgraphs")
    for sub in view.subgraphs:
        if not (0 <= sub.graph_id < len(db.graphs)):
            return _fail("C1", f"subgraph references missing graph {sub.graph_id}")
        g = db.graphs[sub.graph_id]
        bad = [v for v in sub.nodes if not (0 <= v < g.n)]
        if bad:
            return _fail(
                "C1", f"graph {sub.graph_id}: nodes {sorted(bad)} do not exist"
            )
        if forward(m, g).label != view.label:
            return _fail(
                "C1",
                f"graph {sub.graph_id} is not classified with view label {view.label}",
            )
    if not view.patterns:
        return _fail("C1", f"label {view.label}: view has no patterns")
    for k, p in enumerate(view.patterns):
        if not any(match_pattern(p, s.subgraph) for s in view.subgraphs):
            return _fail(
                "C1", f"pattern {k} matches no subgraph of label {view.label}"
            )

    # C2: consistent + counterfactual per subgraph
    for sub in view.subgraphs:
        if not verify_explanation(m, db.graphs[sub.graph_id], sub.nodes, view.label):
            return _fail(
                "C2",
                f"graph {sub.graph_id}: nodes {sorted(sub.nodes)} are not a "
                f"consistent counterfactual explanation of label {view.label}",
            )

    # C3: size window and full pattern coverage
    lower, upper = cfg.window(view.label)
    for sub in view.subgraphs:
        if not (lower <= len(sub.nodes) <= upper):
            return _fail(
                "C3",
                f"graph {sub.graph_id}: explanation size {len(sub.nodes)} "
                f"outside window [{lower}, {upper}]",
            )
    for sub in view.subgraphs:
        covered: set[int] = set()
        for p in view.patterns:
            for match in match_pattern(p, sub.subgraph):
                covered.update(match)
        missing = set(range(sub.subgraph.n)) - covered
        if missing:
            return _fail(
                "C3",
                f"graph {sub.graph_id}: nodes {sorted(missing)} (subgraph ids) "
                f"are not covered by any pattern",
            )
    return VerificationResult(True)
