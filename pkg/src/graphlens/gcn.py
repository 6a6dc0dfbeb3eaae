"""Fixed-architecture GCN engine: forward pass, influence tables, everify.

The classifier is a stack of graph-convolution layers

    X^k = relu(D^-1/2 (A + I) D^-1/2  X^(k-1)  W^k)

followed by elementwise max pooling over nodes and a dense head
``logits = pooled @ classifier_weight + classifier_bias``.  The model is a
plain value object; no learning happens here (training lives in a separate
package that exports the same weight schema).

Influence is the L1 mass of the Jacobian of final-layer node embeddings with
respect to input features, computed in closed form layer by layer, or its
random-walk surrogate (a power of the normalized adjacency).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from graphlens.errors import DimensionError
from graphlens.graphs import Graph, GraphDatabase, induced_subgraph, remove_subgraph


@dataclass(frozen=True, eq=False)
class GcnModel:
    """Weights for the fixed GCN architecture.

    ``layers[k]`` has shape (D_k, D_{k+1}); ``classifier_weight`` has shape
    (D_last, num_classes).  Activation and pooling are pinned to relu/max,
    kept as fields so serialized weights are self-describing.
    """

    layers: tuple[np.ndarray, ...]
    classifier_weight: np.ndarray
    classifier_bias: np.ndarray
    activation: str = "relu"
    pooling: str = "max"

    @staticmethod
    def build(layers, classifier_weight, classifier_bias,
              activation: str = "relu", pooling: str = "max") -> "GcnModel":
        mats = tuple(np.array(w, dtype=np.float64) for w in layers)
        if not mats:
            raise DimensionError("model: needs at least one convolution layer")
        for k, w in enumerate(mats):
            if w.ndim != 2:
                raise DimensionError(f"model: layer {k} is not a matrix")
            if k > 0 and mats[k - 1].shape[1] != w.shape[0]:
                raise DimensionError(
                    f"model: layer {k-1} output {mats[k-1].shape[1]} does not feed layer {k} input {w.shape[0]}"
                )
        cw = np.array(classifier_weight, dtype=np.float64)
        cb = np.array(classifier_bias, dtype=np.float64)
        if cw.ndim != 2 or cw.shape[0] != mats[-1].shape[1]:
            raise DimensionError("model: classifier weight does not chain with last layer")
        if cb.shape != (cw.shape[1],):
            raise DimensionError("model: classifier bias length must equal num_classes")
        if activation != "relu":
            raise DimensionError(f"model: unsupported activation {activation!r}")
        if pooling != "max":
            raise DimensionError(f"model: unsupported pooling {pooling!r}")
        if cw.shape[1] < 2:
            raise DimensionError("model: need at least two classes")
        for a in (*mats, cw, cb):
            a.setflags(write=False)
        return GcnModel(mats, cw, cb, activation, pooling)

    @property
    def feature_dim(self) -> int:
        return int(self.layers[0].shape[0])

    @property
    def num_classes(self) -> int:
        return int(self.classifier_weight.shape[1])

    @property
    def num_layers(self) -> int:
        return len(self.layers)


@dataclass(frozen=True, eq=False)
class InferenceResult:
    """Per-layer embeddings (X^0 first), pooled vector, logits, label."""

    layer_embeddings: tuple[np.ndarray, ...]
    pooled: np.ndarray
    logits: np.ndarray
    probabilities: np.ndarray
    label: int


@dataclass(frozen=True, eq=False)
class InfluenceTable:
    """Raw and normalized node-to-node influence plus final embeddings.

    ``i1[v, u]`` is the influence of source u on target v.  ``i2[u, v]`` is
    i1 normalized over sources for fixed target v, so each column of i2 sums
    to one unless the whole i1 row of v is zero (then the column stays zero).
    """

    i1: np.ndarray
    i2: np.ndarray
    embeddings: np.ndarray


def propagation_matrix(g: Graph) -> np.ndarray:
    """D^-1/2 (A + I) D^-1/2 with self-loop-augmented degrees."""
    a_hat = g.adjacency() + np.eye(g.n)
    d = a_hat.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(d)
    return a_hat * inv_sqrt[:, None] * inv_sqrt[None, :]


def _normalize_influence(i1: np.ndarray) -> np.ndarray:
    denom = i1.sum(axis=1)
    safe = np.where(denom > 0.0, denom, 1.0)
    return (i1 / safe[:, None]).T


def forward(m: GcnModel, g: Graph) -> InferenceResult:
    """Run the classifier on one graph.

    The empty graph pools to the zero vector, so its logits equal the
    classifier bias.  Argmax ties resolve to the smallest label index.
    """
    if g.n > 0 and g.feature_dim != m.feature_dim:
        raise DimensionError(
            f"forward: graph features have dim {g.feature_dim}, model expects {m.feature_dim}"
        )
    if g.n == 0:
        xs = [np.zeros((0, m.feature_dim))]
        for w in m.layers:
            xs.append(np.zeros((0, w.shape[1])))
        pooled = np.zeros(m.layers[-1].shape[1])
    else:
        s = propagation_matrix(g)
        xs = [g.features]
        for w in m.layers:
            xs.append(np.maximum(s @ xs[-1] @ w, 0.0))
        pooled = xs[-1].max(axis=0)
    logits = pooled @ m.classifier_weight + m.classifier_bias
    shifted = logits - logits.max()
    e = np.exp(shifted)
    probs = e / e.sum()
    return InferenceResult(tuple(xs), pooled, logits, probs, int(np.argmax(logits)))


def influence_exact(m: GcnModel, g: Graph) -> InfluenceTable:
    """Influence from the exact Jacobian of final embeddings w.r.t. inputs.

    Forward-mode accumulation: J^k[v, u] = d X^k_v / d X^0_u, propagated as

        J^k[v, u] = relu'(Z^k_v) * ( sum_w S[v, w] J^(k-1)[w, u] ) @ W^k

    with relu' taken as 0 at exactly 0.  i1[v, u] is the entrywise L1 norm
    of the (v, u) block.
    """
    if g.n > 0 and g.feature_dim != m.feature_dim:
        raise DimensionError(
            f"influence: graph features have dim {g.feature_dim}, model expects {m.feature_dim}"
        )
    n = g.n
    if n == 0:
        empty = np.zeros((0, 0))
        return InfluenceTable(empty, empty.copy(), np.zeros((0, m.layers[-1].shape[1])))
    s = propagation_matrix(g)
    x = g.features
    d0 = m.feature_dim
    # jac[v, u, c, j] = d X_{v,c} / d X0_{u,j}
    jac = np.zeros((n, n, d0, d0))
    idx = np.arange(n)
    jac[idx, idx] = np.eye(d0)
    for w in m.layers:
        z = s @ x @ w
        mixed = np.einsum("vw,wuij->vuij", s, jac)
        jz = np.einsum("vuij,ic->vucj", mixed, w)
        active = (z > 0.0).astype(np.float64)
        jac = jz * active[:, None, :, None]
        x = np.maximum(z, 0.0)
    i1 = np.abs(jac).sum(axis=(2, 3))
    return InfluenceTable(i1, _normalize_influence(i1), x)


def influence_rw(
    m: GcnModel,
    g: Graph,
    walks: int = 10000,
    sampled: bool = False,
    seed: int = 0,
) -> InfluenceTable:
    """Random-walk influence surrogate.

    i1 is the k-th power of the normalized adjacency S (k = number of conv
    layers): exact matrix powers in deterministic mode, or a Monte-Carlo
    estimate from ``walks`` length-k walks per node in sampled mode.  The
    walk transition is the row-stochastic P = D^-1 (A + I); S^k is recovered
    from P^k by symmetric degree rescaling.
    """
    if g.n > 0 and g.feature_dim != m.feature_dim:
        raise DimensionError(
            f"influence: graph features have dim {g.feature_dim}, model expects {m.feature_dim}"
        )
    n = g.n
    if n == 0:
        empty = np.zeros((0, 0))
        return InfluenceTable(empty, empty.copy(), np.zeros((0, m.layers[-1].shape[1])))
    s = propagation_matrix(g)
    k = m.num_layers
    if not sampled:
        i1 = np.linalg.matrix_power(s, k)
    else:
        if walks <= 0:
            raise DimensionError("influence_rw: walks must be positive in sampled mode")
        rng = np.random.default_rng(seed)
        a_hat = g.adjacency() + np.eye(n)
        d = a_hat.sum(axis=1)
        nbrs = [np.flatnonzero(a_hat[v] > 0) for v in range(n)]
        pk = np.zeros((n, n))
        for start in range(n):
            pos = np.full(walks, start, dtype=np.int64)
            for _ in range(k):
                nxt = np.empty_like(pos)
                for v in range(n):
                    here = pos == v
                    cnt = int(here.sum())
                    if cnt:
                        nxt[here] = nbrs[v][rng.integers(0, len(nbrs[v]), size=cnt)]
                pos = nxt
            pk[start] = np.bincount(pos, minlength=n) / walks
        scale = np.sqrt(d)
        i1 = pk * scale[:, None] / scale[None, :]
    embeddings = forward(m, g).layer_embeddings[-1]
    return InfluenceTable(i1, _normalize_influence(i1), embeddings)


def verify_explanation(m: GcnModel, g: Graph, vs, label: int) -> bool:
    """everify: consistent and counterfactual in one call.

    True iff the subgraph induced by ``vs`` classifies to ``label`` while the
    rest of the graph (vs removed with incident edges) does not.  The empty
    node set is never an explanation.
    """
    vs = set(vs)
    if not vs:
        return False
    if forward(m, induced_subgraph(g, vs)).label != label:
        return False
    return forward(m, remove_subgraph(g, vs)).label != label


def classify_database(db: GraphDatabase, m: GcnModel) -> GraphDatabase:
    """Assign model labels to every graph in place and return the database."""
    for gid, g in enumerate(db.graphs):
        db.labels[gid] = forward(m, g).label
    return db
