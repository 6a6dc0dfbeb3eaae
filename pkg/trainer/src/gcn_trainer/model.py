"""The classifier: three bias-free graph convolutions, relu, max pooling,
dense head.  Everything runs in float64 so exported weights reproduce the
exact logits in any faithful reimplementation."""

from __future__ import annotations

import torch


class GcnClassifier(torch.nn.Module):
    def __init__(self, feature_dim: int, hidden_dim: int, num_classes: int):
        super().__init__()
        dims = [feature_dim, hidden_dim, hidden_dim, hidden_dim]
        self.convs = torch.nn.ParameterList()
        for d_in, d_out in zip(dims, dims[1:]):
            w = torch.empty(d_in, d_out, dtype=torch.float64)
            torch.nn.init.xavier_uniform_(w)
            self.convs.append(torch.nn.Parameter(w))
        head = torch.empty(hidden_dim, num_classes, dtype=torch.float64)
        torch.nn.init.xavier_uniform_(head)
        self.head_weight = torch.nn.Parameter(head)
        self.head_bias = torch.nn.Parameter(
            torch.zeros(num_classes, dtype=torch.float64)
        )

    def forward(self, prop: torch.Tensor, features: torch.Tensor) -> torch.Tensor:
        x = features
        for w in self.convs:
            x = torch.relu(prop @ x @ w)
        if x.shape[0] == 0:
            # no nodes: pooling the empty set is the zero vector, so the
            # logits reduce to the head bias
            return self.head_bias
        pooled = x.max(dim=0).values
        return pooled @ self.head_weight + self.head_bias

    def export(self, feature_dim: int, num_classes: int) -> dict:
        """Weights in the shared interchange schema."""
        return {
            "schema": "gcn-weights/1",
            "feature_dim": feature_dim,
            "num_classes": num_classes,
            "activation": "relu",
            "pooling": "max",
            "layers": [w.detach().numpy().tolist() for w in self.convs],
            "classifier_weight": self.head_weight.detach().numpy().tolist(),
            "classifier_bias": self.head_bias.detach().numpy().tolist(),
        }
