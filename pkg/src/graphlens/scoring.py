"""Explanation objective: influence spread plus embedding diversity.

Given a per-graph influence table, a node set V_s earns

    I(V_s) = |{ v : max_{u in V_s} i2[u, v] >= theta }|
    D(V_s) = |union over influenced v of { v' : dist(v, v') <= r }|

where dist is the Euclidean distance between L2-normalized final-layer
embeddings.  The per-graph objective is (I + gamma * D) / n with n the
*original* graph size; a database-level score sums the per-graph terms.
Both I and D are coverage counts, so the objective is monotone and
submodular in V_s -- the greedy and streaming guarantees rest on that.

``ScoreState`` keeps reference counts so single-node insertions and
removals are O(n); plain ``influence_score`` / ``diversity_score`` are the
from-scratch route the incremental path is tested against.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from graphlens.errors import DimensionError, GraphlensError
from graphlens.gcn import InfluenceTable


@dataclass(frozen=True)
class Config:
    """Tunable knobs for explanation construction.

    coverage maps a class label to its (lower, upper) explanation size
    window; ``default_coverage`` applies to labels missing from the map.
    ``influence_mode`` picks the exact Jacobian or the random-walk
    surrogate.  ``hop_radius`` overrides the neighborhood radius used when
    the streaming variant mines patterns around one node (defaults to
    ceil(r), floored at 1).  ``pattern_cache_capacity`` bounds the streaming
    pattern cache; None disables eviction.
    """

    theta: float = 0.08
    r: float = 0.25
    gamma: float = 0.5
    coverage: dict[int, tuple[int, int]] = field(default_factory=dict)
    default_coverage: tuple[int, int] = (0, 6)
    influence_mode: str = "exact"
    distance: str = "normalized-euclidean"
    pattern_min_support: int = 2
    pattern_max_nodes: int = 4
    rw_walks: int = 10000
    rw_sampled: bool = False
    rw_seed: int = 0
    pattern_cache_capacity: int | None = None
    hop_radius: int | None = None

    def __post_init__(self):
        if not (0.0 <= self.theta <= 1.0):
            raise GraphlensError(f"config: theta must be in [0, 1], got {self.theta}")
        if self.r < 0.0:
            raise GraphlensError(f"config: r must be nonnegative, got {self.r}")
        if self.gamma < 0.0:
            raise GraphlensError(f"config: gamma must be nonnegative, got {self.gamma}")
        if self.influence_mode not in ("exact", "rw"):
            raise GraphlensError(f"config: unknown influence mode {self.influence_mode!r}")
        if self.distance != "normalized-euclidean":
            raise GraphlensError(f"config: unknown distance {self.distance!r}")
        if self.pattern_min_support < 1:
            raise GraphlensError("config: pattern_min_support must be >= 1")
        if self.pattern_max_nodes < 1:
            raise GraphlensError("config: pattern_max_nodes must be >= 1")
        norm = {int(k): (int(v[0]), int(v[1])) for k, v in self.coverage.items()}
        for l, (b, u) in norm.items():
            if not (0 <= b <= u):
                raise GraphlensError(f"config: bad coverage window {b, u} for label {l}")
        object.__setattr__(self, "coverage", norm)
        b, u = self.default_coverage
        if not (0 <= b <= u):
            raise GraphlensError(f"config: bad default coverage window {b, u}")
        object.__setattr__(self, "default_coverage", (int(b), int(u)))

    def window(self, label: int) -> tuple[int, int]:
        return self.coverage.get(int(label), self.default_coverage)

    def with_window(self, label: int, lower: int, upper: int) -> "Config":
        cov = dict(self.coverage)
        cov[int(label)] = (int(lower), int(upper))
        return replace(self, coverage=cov)

    def hop_count(self) -> int:
        """Neighborhood radius for streaming pattern probes."""
        if self.hop_radius is not None:
            return max(1, int(self.hop_radius))
        return max(1, int(np.ceil(self.r)))

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "r": self.r,
            "gamma": self.gamma,
            "coverage": {str(l): list(w) for l, w in sorted(self.coverage.items())},
            "default_coverage": list(self.default_coverage),
            "influence_mode": self.influence_mode,
            "distance": self.distance,
            "pattern_min_support": self.pattern_min_support,
            "pattern_max_nodes": self.pattern_max_nodes,
            "rw_walks": self.rw_walks,
            "rw_sampled": self.rw_sampled,
            "rw_seed": self.rw_seed,
            "pattern_cache_capacity": self.pattern_cache_capacity,
            "hop_radius": self.hop_radius,
        }

    @staticmethod
    def from_dict(doc: dict) -> "Config":
        doc = dict(doc)
        if "coverage" in doc:
            doc["coverage"] = {int(k): tuple(v) for k, v in doc["coverage"].items()}
        if "default_coverage" in doc:
            doc["default_coverage"] = tuple(doc["default_coverage"])
        known = set(Config.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise GraphlensError(f"config: unknown fields {sorted(unknown)}")
        return Config(**doc)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @staticmethod
    def load(path) -> "Config":
        with open(path) as fh:
            return Config.from_dict(json.load(fh))


def normalized_embeddings(embeddings: np.ndarray) -> np.ndarray:
    """Rows scaled to unit L2 norm; all-zero rows stay zero."""
    norms = np.linalg.norm(embeddings, axis=1)
    safe = np.where(norms > 0.0, norms, 1.0)
    return embeddings / safe[:, None]


def embedding_distances(embeddings: np.ndarray) -> np.ndarray:
    """Pairwise Euclidean distances between normalized embedding rows."""
    xn = normalized_embeddings(embeddings)
    sq = (xn * xn).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (xn @ xn.T)
    return np.sqrt(np.maximum(d2, 0.0))


def influenced_nodes(t: InfluenceTable, vs, theta: float) -> np.ndarray:
    """Boolean mask of nodes v with i2[u, v] >= theta for some u in vs."""
    vs = sorted(set(int(v) for v in vs))
    if not vs:
        return np.zeros(t.i2.shape[0], dtype=bool)
    return (t.i2[vs] >= theta).any(axis=0)


def influence_score(t: InfluenceTable, vs, theta: float) -> int:
    """Count of nodes influenced by vs at threshold theta."""
    return int(influenced_nodes(t, vs, theta).sum())


def diversity_score(t: InfluenceTable, vs, theta: float, r: float) -> int:
    """Size of the union of embedding balls around the influenced nodes."""
    mask = influenced_nodes(t, vs, theta)
    if not mask.any():
        return 0
    balls = embedding_distances(t.embeddings) <= r
    return int(balls[mask].any(axis=0).sum())


def graph_objective(t: InfluenceTable, vs, theta: float, r: float, gamma: float) -> float:
    """(I + gamma * D) / n for one graph; 0.0 for the empty graph."""
    n = t.i2.shape[0]
    if n == 0:
        return 0.0
    return (
        influence_score(t, vs, theta) + gamma * diversity_score(t, vs, theta, r)
    ) / n


def explainability(node_sets: dict[int, set], tables: dict[int, InfluenceTable],
                   cfg: Config) -> float:
    """Database-level objective: sum of per-graph normalized scores."""
    missing = set(node_sets) - set(tables)
    if missing:
        raise DimensionError(f"explainability: no influence table for graphs {sorted(missing)}")
    return sum(
        graph_objective(tables[gid], vs, cfg.theta, cfg.r, cfg.gamma)
        for gid, vs in node_sets.items()
    )


class ScoreState:
    """Incrementally maintained objective for one graph.

    Keeps, per node v, how many selected sources influence it, and per node
    v', how many influenced nodes own an embedding ball containing it.  A
    node set mutation then only touches the rows of the toggled source.
    """

    def __init__(self, table: InfluenceTable, cfg: Config):
        self.n = table.i2.shape[0]
        self.theta = cfg.theta
        self.r = cfg.r
        self.gamma = cfg.gamma
        self.influence_hits = table.i2 >= cfg.theta  # [source u, target v]
        self.balls = embedding_distances(table.embeddings) <= cfg.r
        self.selected: set[int] = set()
        self.influence_count = np.zeros(self.n, dtype=np.int64)
        self.ball_count = np.zeros(self.n, dtype=np.int64)

    def value(self) -> float:
        if self.n == 0:
            return 0.0
        i = int((self.influence_count > 0).sum())
        d = int((self.ball_count > 0).sum())
        return (i + self.gamma * d) / self.n

    def gain(self, u: int) -> float:
        """Objective delta of adding u, without mutating the state."""
        if u in self.selected:
            return 0.0
        fresh = self.influence_hits[u] & (self.influence_count == 0)
        di = int(fresh.sum())
        if di == 0:
            return 0.0
        new_balls = self.balls[fresh].any(axis=0) & (self.ball_count == 0)
        dd = int(new_balls.sum())
        return (di + self.gamma * dd) / self.n

    def add(self, u: int) -> None:
        if u in self.selected:
            return
        self.selected.add(u)
        hits = self.influence_hits[u]
        fresh = hits & (self.influence_count == 0)
        self.influence_count[hits] += 1
        for v in np.flatnonzero(fresh):
            self.ball_count[self.balls[v]] += 1

    def remove(self, u: int) -> None:
        if u not in self.selected:
            return
        self.selected.remove(u)
        hits = self.influence_hits[u]
        self.influence_count[hits] -= 1
        gone = hits & (self.influence_count == 0)
        for v in np.flatnonzero(gone):
            self.ball_count[self.balls[v]] -= 1

    def removal_loss(self, u: int) -> float:
        """Objective delta of dropping u (nonnegative), without mutation."""
        if u not in self.selected:
            return 0.0
        hits = self.influence_hits[u]
        gone = hits & (self.influence_count == 1)
        di = int(gone.sum())
        if di == 0:
            return 0.0
        balls_gone = np.zeros(self.n, dtype=np.int64)
        for v in np.flatnonzero(gone):
            balls_gone[self.balls[v]] += 1
        dd = int(((self.ball_count - balls_gone) == 0).sum() - (self.ball_count == 0).sum())
        return (di + self.gamma * dd) / self.n

    def clone(self) -> "ScoreState":
        dup = object.__new__(ScoreState)
        dup.n = self.n
        dup.theta = self.theta
        dup.r = self.r
        dup.gamma = self.gamma
        dup.influence_hits = self.influence_hits
        dup.balls = self.balls
        dup.selected = set(self.selected)
        dup.influence_count = self.influence_count.copy()
        dup.ball_count = self.ball_count.copy()
        return dup
