"""Shared builders and oracles for the randomized tests.

Everything here is deliberately independent of the library internals: the
brute-force matcher enumerates injective maps directly, and the graph/model
builders only go through the public constructors.
"""

import itertools

import numpy as np

from graphlens.gcn import GcnModel, forward, propagation_matrix
from graphlens.graphs import Graph, Pattern


def random_graph(
    rng,
    max_nodes=8,
    min_nodes=1,
    feature_dim=3,
    edge_prob=0.4,
    node_type_count=2,
    edge_type_count=1,
):
    n = int(rng.integers(min_nodes, max_nodes + 1))
    types = [int(t) for t in rng.integers(0, node_type_count, size=n)]
    feats = rng.normal(size=(n, feature_dim))
    edges = []
    etypes = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < edge_prob:
                edges.append((u, v))
                etypes.append(int(rng.integers(0, edge_type_count)))
    return Graph.build(types, feats, edges, etypes)


def random_pattern(rng, max_nodes=3, node_type_count=2, edge_type_count=1):
    """Connected random pattern: a random spanning tree plus extra edges."""
    n = int(rng.integers(1, max_nodes + 1))
    types = [int(t) for t in rng.integers(0, node_type_count, size=n)]
    edges = []
    etypes = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.append((u, v))
        etypes.append(int(rng.integers(0, edge_type_count)))
    have = set(edges)
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in have and rng.random() < 0.3:
                edges.append((u, v))
                etypes.append(int(rng.integers(0, edge_type_count)))
    return Pattern.build(types, edges, etypes)


def random_model(rng, feature_dim=3, hidden=(4, 3), classes=2, scale=1.0):
    dims = [feature_dim, *hidden]
    layers = [
        rng.normal(size=(dims[k], dims[k + 1])) * scale
        for k in range(len(dims) - 1)
    ]
    cw = rng.normal(size=(dims[-1], classes)) * scale
    cb = rng.normal(size=classes) * scale
    return GcnModel.build(layers, cw, cb)


def brute_force_matches(p: Pattern, g: Graph):
    """Node-induced matches by plain enumeration of injective maps."""
    out = []
    for combo in itertools.permutations(range(g.n), p.n):
        if any(g.node_types[combo[i]] != p.node_types[i] for i in range(p.n)):
            continue
        ok = True
        for i in range(p.n):
            for j in range(i + 1, p.n):
                pt = p.edge_type_map.get((i, j))
                a, b = combo[i], combo[j]
                gt = g.edge_type_map.get((a, b) if a < b else (b, a))
                if (pt is None) != (gt is None) or (pt is not None and pt != gt):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(combo)
    return sorted(out)


def reference_forward(m: GcnModel, g: Graph):
    """Loop-based forward pass, written without the library's helpers."""
    n = g.n
    if n == 0:
        pooled = np.zeros(m.layers[-1].shape[1])
        return pooled @ m.classifier_weight + m.classifier_bias
    a = np.zeros((n, n))
    for u, v in g.edges:
        a[u][v] = 1.0
        a[v][u] = 1.0
    for v in range(n):
        a[v][v] += 1.0
    deg = a.sum(axis=1)
    s = np.zeros((n, n))
    for u in range(n):
        for v in range(n):
            s[u][v] = a[u][v] / np.sqrt(deg[u]) / np.sqrt(deg[v])
    x = np.array(g.features)
    for w in m.layers:
        z = s @ x @ w
        x = np.where(z > 0.0, z, 0.0)
    pooled = x.max(axis=0)
    return pooled @ m.classifier_weight + m.classifier_bias


def finite_difference_i1(m, g, h=1e-5):
    """Central-difference Jacobian of final embeddings, folded to i1."""
    n, d0 = g.n, g.feature_dim
    base = forward(m, g).layer_embeddings[-1]
    dk = base.shape[1]
    jac = np.zeros((n, n, dk, d0))
    feats = np.array(g.features)
    for u in range(n):
        for j in range(d0):
            bumped = feats.copy()
            bumped[u, j] += h
            gp = Graph.build(g.node_types, bumped, g.edges, g.edge_types)
            bumped[u, j] -= 2 * h
            gm = Graph.build(g.node_types, bumped, g.edges, g.edge_types)
            diff = (
                forward(m, gp).layer_embeddings[-1]
                - forward(m, gm).layer_embeddings[-1]
            ) / (2 * h)
            jac[:, u, :, j] = diff
    return np.abs(jac).sum(axis=(2, 3))


def relu_margins(m, g):
    """Smallest |pre-activation| across layers; finite differences need it
    to stay clear of the kink."""
    s = propagation_matrix(g)
    x = g.features
    worst = np.inf
    for w in m.layers:
        z = s @ x @ w
        if z.size:
            worst = min(worst, float(np.abs(z).min()))
        x = np.maximum(z, 0.0)
    return worst


def presence_detector_model(rng, gain=1.0e5):
    """Two-channel model that classifies 0 iff a type-1 node is present.

    Channels stay separated through diagonal positive conv layers, so the
    pooled second channel is positive exactly when the graph contains a node
    whose one-hot feature lights that channel.  The head turns that into
    class 0 with a margin that dominates the class-1 bias for any graph with
    at most a few hundred nodes.
    """
    layers = [np.diag(rng.uniform(0.5, 1.5, size=2)) for _ in range(3)]
    cw = np.zeros((2, 2))
    cw[1, 0] = gain
    cb = np.array([0.0, 1.0])
    return GcnModel.build(layers, cw, cb)


def anchored_graph(rng, max_nodes=12, min_nodes=6, edge_prob=0.3):
    """Random connected-ish graph with exactly one type-1 anchor node.

    Features are the one-hot node type, which is what the presence-detector
    model keys on.
    """
    n = int(rng.integers(min_nodes, max_nodes + 1))
    anchor = int(rng.integers(0, n))
    types = [1 if v == anchor else 0 for v in range(n)]
    edges = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.append((u, v))
    have = set(edges)
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in have and rng.random() < edge_prob:
                edges.append((u, v))
    feats = np.zeros((n, 2))
    feats[np.arange(n), types] = 1.0
    return Graph.build(types, feats, edges), anchor
