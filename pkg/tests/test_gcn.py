"""Model engine: forward oracle, Jacobian influence vs. finite differences,
random-walk surrogate, everify."""

import numpy as np
import pytest

from graphlens.errors import DimensionError
from graphlens.gcn import (
    GcnModel,
    classify_database,
    forward,
    influence_exact,
    influence_rw,
    propagation_matrix,
    verify_explanation,
)
from graphlens.graphs import Graph
from graphlens.datasets import standin_motif_model, synth_motif_dataset
from helpers import (
    finite_difference_i1,
    random_graph,
    random_model,
    reference_forward,
    relu_margins,
)


def test_model_build_checks_shapes():
    with pytest.raises(DimensionError):
        GcnModel.build([], np.zeros((1, 2)), np.zeros(2))
    with pytest.raises(DimensionError):
        GcnModel.build([np.eye(2), np.zeros((3, 2))], np.zeros((2, 2)), np.zeros(2))
    with pytest.raises(DimensionError):
        GcnModel.build([np.eye(2)], np.zeros((3, 2)), np.zeros(2))
    with pytest.raises(DimensionError):
        GcnModel.build([np.eye(2)], np.zeros((2, 2)), np.zeros(3))
    with pytest.raises(DimensionError):
        GcnModel.build([np.eye(2)], np.zeros((2, 1)), np.zeros(1))  # one class
    with pytest.raises(DimensionError):
        GcnModel.build([np.eye(2)], np.zeros((2, 2)), np.zeros(2), activation="tanh")


def test_forward_single_node_frozen_values():
    g = Graph.build([0], [[1.0]])
    m = GcnModel.build([[[2.0]]], [[1.0, -1.0]], [0.0, 0.0])
    res = forward(m, g)
    # single node: S = [[1]], X1 = relu(2) = 2, pooled = [2]
    assert res.logits.tolist() == [2.0, -2.0]
    assert res.label == 0
    assert res.pooled.tolist() == [2.0]
    assert len(res.layer_embeddings) == 2


def test_forward_empty_graph_uses_bias():
    g = Graph.build([], np.zeros((0, 1)))
    m = GcnModel.build([[[1.0]]], [[1.0, 0.0]], [(-3.0), 4.0])
    res = forward(m, g)
    assert res.logits.tolist() == [-3.0, 4.0]
    assert res.label == 1
    assert res.pooled.tolist() == [0.0]


def test_forward_argmax_ties_to_smallest_index():
    g = Graph.build([], np.zeros((0, 1)))
    m = GcnModel.build([[[1.0]]], [[0.0, 0.0, 0.0]], [7.0, 7.0, 7.0])
    assert forward(m, g).label == 0


def test_forward_rejects_feature_dim_mismatch():
    g = Graph.build([0], [[1.0, 2.0]])
    m = GcnModel.build([[[1.0]]], [[1.0, 0.0]], [0.0, 0.0])
    with pytest.raises(DimensionError):
        forward(m, g)


def test_forward_matches_loop_reference():
    rng = np.random.default_rng(3)
    for _ in range(30):
        g = random_graph(rng, max_nodes=8, feature_dim=3)
        m = random_model(rng, feature_dim=3, hidden=(4, 3), classes=3)
        got = forward(m, g).logits
        want = reference_forward(m, g)
        assert np.allclose(got, want, rtol=1e-12, atol=1e-12)


def test_propagation_matrix_row_identity():
    # S = D^-1/2 (A+I) D^-1/2 is symmetric with known diagonal
    g = Graph.build([0, 0, 0], np.zeros((3, 1)), [(0, 1), (1, 2)])
    s = propagation_matrix(g)
    assert np.allclose(s, s.T)
    assert np.allclose(np.diag(s), [1 / 2, 1 / 3, 1 / 2])
    assert s[0, 2] == 0.0


def test_influence_exact_matches_finite_differences():
    rng = np.random.default_rng(4)
    done = 0
    while done < 20:
        g = random_graph(rng, max_nodes=6, min_nodes=2, feature_dim=2)
        m = random_model(rng, feature_dim=2, hidden=(3, 2), classes=2)
        if relu_margins(m, g) < 1e-3:
            continue
        got = influence_exact(m, g).i1
        want = finite_difference_i1(m, g)
        scale = max(1.0, float(np.abs(want).max()))
        assert np.abs(got - want).max() / scale < 1e-4
        done += 1


def test_influence_normalization_columns():
    rng = np.random.default_rng(5)
    g = random_graph(rng, max_nodes=7, min_nodes=3, feature_dim=3)
    m = random_model(rng, feature_dim=3)
    t = influence_exact(m, g)
    sums = t.i2.sum(axis=0)
    row_mass = t.i1.sum(axis=1)
    for v in range(g.n):
        if row_mass[v] > 0:
            assert abs(sums[v] - 1.0) < 1e-12
        else:
            assert sums[v] == 0.0


def test_influence_dead_relu_row_is_zero():
    # negative weights kill the activation, so nothing influences node 0
    g = Graph.build([0], [[1.0]])
    m = GcnModel.build([[[-1.0]]], [[1.0, 0.0]], [0.0, 0.0])
    t = influence_exact(m, g)
    assert t.i1.tolist() == [[0.0]]
    assert t.i2.tolist() == [[0.0]]


def test_influence_empty_graph():
    g = Graph.build([], np.zeros((0, 2)))
    m = GcnModel.build([np.eye(2)], np.zeros((2, 2)), np.zeros(2))
    t = influence_exact(m, g)
    assert t.i1.shape == (0, 0) and t.i2.shape == (0, 0)
    t2 = influence_rw(m, g)
    assert t2.i1.shape == (0, 0)


def test_influence_rw_deterministic_equals_power():
    rng = np.random.default_rng(6)
    for _ in range(10):
        g = random_graph(rng, max_nodes=8, min_nodes=2, feature_dim=2)
        m = random_model(rng, feature_dim=2, hidden=(3, 2))
        t = influence_rw(m, g)
        s = propagation_matrix(g)
        want = np.eye(g.n)
        for _k in range(m.num_layers):
            want = want @ s
        assert np.allclose(t.i1, want, atol=1e-12)


def test_influence_rw_sampled_converges_and_is_seeded():
    rng = np.random.default_rng(7)
    g = random_graph(rng, max_nodes=6, min_nodes=4, feature_dim=2, edge_prob=0.5)
    m = random_model(rng, feature_dim=2, hidden=(3, 2))
    exact = influence_rw(m, g).i1
    est = influence_rw(m, g, walks=20000, sampled=True, seed=1).i1
    assert np.abs(est - exact).max() < 0.02
    again = influence_rw(m, g, walks=20000, sampled=True, seed=1).i1
    assert np.array_equal(est, again)
    other = influence_rw(m, g, walks=20000, sampled=True, seed=2).i1
    assert not np.array_equal(est, other)


def test_influence_rw_sampled_rejects_nonpositive_walks():
    g = Graph.build([0], [[1.0]])
    m = GcnModel.build([[[1.0]]], [[1.0, 0.0]], [0.0, 0.0])
    with pytest.raises(DimensionError):
        influence_rw(m, g, walks=0, sampled=True)


def test_verify_explanation_on_motif_fixture():
    db = synth_motif_dataset(4, 10, seed=1)
    m = standin_motif_model()
    classify_database(db, m)
    for gid in range(4):
        g = db.graphs[gid]
        label = db.labels[gid]
        anchor = [v for v in db.ground_truth[gid] if g.node_types[v] in (1, 2)]
        assert len(anchor) == 1
        # any set with the anchor flips; any set without it cannot
        assert verify_explanation(m, g, anchor, label)
        assert verify_explanation(m, g, set(anchor) | {0, 1}, label)
        assert not verify_explanation(m, g, {0, 1}, label)
        assert not verify_explanation(m, g, [], label)


def test_classify_database_assigns_model_labels():
    db = synth_motif_dataset(6, 10, seed=2)
    m = standin_motif_model()
    classify_database(db, m)
    assert db.labels == db.dataset_labels
