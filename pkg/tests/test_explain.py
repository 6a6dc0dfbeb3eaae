"""Greedy explainer: invariants on the motif fixture, window edge cases,
determinism."""

import numpy as np
import pytest

from graphlens.datasets import standin_motif_model, synth_motif_dataset
from graphlens.errors import LabelMismatchError
from graphlens.explain import can_extend, explain_database, explain_graph
from graphlens.gcn import GcnModel, verify_explanation
from graphlens.graphs import Graph
from graphlens.scoring import Config


def motif_db(n=6, base=12, seed=3):
    db = synth_motif_dataset(n, base, seed=seed)
    m = standin_motif_model()
    for gid, g in enumerate(db.graphs):
        db.labels[gid] = db.dataset_labels[gid]
    return db, m


def anchor_of(db, gid):
    g = db.graphs[gid]
    (a,) = [v for v in db.ground_truth[gid] if g.node_types[v] in (1, 2)]
    return a


def test_explanations_verify_and_fit_window():
    db, m = motif_db()
    cfg = Config()
    for gid, g in enumerate(db.graphs):
        label = db.labels[gid]
        sub = explain_graph(g, gid, m, cfg, label)
        assert sub is not None
        lo, hi = cfg.window(label)
        assert lo <= len(sub.nodes) <= hi
        assert verify_explanation(m, g, sub.nodes, label)
        assert anchor_of(db, gid) in sub.nodes
        assert sub.subgraph.origin == tuple(sorted(sub.nodes))
        assert sub.label == label and sub.graph_id == gid


def test_explain_is_deterministic():
    db, m = motif_db(seed=9)
    cfg = Config()
    first = [explain_graph(g, i, m, cfg, db.labels[i]).nodes
             for i, g in enumerate(db.graphs)]
    second = [explain_graph(g, i, m, cfg, db.labels[i]).nodes
              for i, g in enumerate(db.graphs)]
    assert first == second


def test_explain_rejects_wrong_label():
    db, m = motif_db()
    with pytest.raises(LabelMismatchError):
        explain_graph(db.graphs[0], 0, m, Config(), label=1 - db.labels[0])


def test_window_floor_forces_size():
    db, m = motif_db()
    label = db.labels[0]
    cfg = Config().with_window(label, 3, 3)
    sub = explain_graph(db.graphs[0], 0, m, cfg, label)
    assert sub is not None and len(sub.nodes) == 3
    assert anchor_of(db, 0) in sub.nodes


def test_zero_window_yields_none():
    db, m = motif_db()
    label = db.labels[0]
    cfg = Config().with_window(label, 0, 0)
    assert explain_graph(db.graphs[0], 0, m, cfg, label) is None


def test_unreachable_floor_yields_none():
    # a 2-node graph cannot meet a floor of 3
    feats = np.zeros((2, 4))
    feats[0, 1] = 1.0  # house-anchor channel
    feats[1, 3] = 1.0
    g = Graph.build([1, 3], feats, [(0, 1)])
    m = standin_motif_model()
    cfg = Config().with_window(0, 3, 6)
    assert explain_graph(g, 0, m, cfg, 0) is None


def test_can_extend_gates_size_and_validity():
    db, m = motif_db()
    g = db.graphs[0]
    label = db.labels[0]
    anchor = anchor_of(db, 0)
    cfg = Config().with_window(label, 0, 2)
    assert can_extend(anchor, set(), g, m, cfg, label)
    assert not can_extend(0, set(), g, m, cfg, label)  # no anchor, no flip
    assert can_extend(0, {anchor}, g, m, cfg, label)
    assert not can_extend(0, {anchor, 1}, g, m, cfg, label)  # would exceed 2


def test_explain_database_groups_and_uncovered():
    db, m = motif_db(n=4)
    res = explain_database(db, m, Config())
    assert sorted(res.subgraphs) == [0, 1]
    for label, subs in res.subgraphs.items():
        for sub in subs:
            assert db.labels[sub.graph_id] == label
        assert res.uncovered[label] == ()
    only_one = explain_database(db, m, Config(), labels=[1])
    assert sorted(only_one.subgraphs) == [1]


def test_explain_database_records_uncovered():
    # an upper window of zero makes every graph unexplainable
    db, m = motif_db(n=4)
    cfg = Config(default_coverage=(0, 0))
    res = explain_database(db, m, cfg)
    groups = db.label_groups()
    assert res.uncovered[0] == groups[0]
    assert res.uncovered[1] == groups[1]
    assert res.subgraphs[0] == () and res.subgraphs[1] == ()
