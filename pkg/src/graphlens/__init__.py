"""Two-tier explanation views for GCN graph classifiers.

The package splits into a small stack of modules:

* ``graphs``     -- typed graph/pattern model and node-induced matching
* ``gcn``        -- the fixed 3-layer GCN engine, influence tables, everify
* ``scoring``    -- configuration plus the influence/diversity objective
* ``explain``    -- greedy construction of counterfactual explanation subgraphs
* ``summarize``  -- frequent-pattern mining and weighted set-cover summaries
* ``stream``     -- one-pass node-stream variant with bounded caches
* ``metrics``    -- fidelity / sparsity / compression reporting
* ``datasets``, ``weights``, ``views``, ``verify``, ``runner``, ``cli`` -- IO
"""

from graphlens.graphs import Graph, GraphDatabase, Pattern
from graphlens.gcn import GcnModel
from graphlens.scoring import Config

__all__ = ["Graph", "GraphDatabase", "Pattern", "GcnModel", "Config"]
