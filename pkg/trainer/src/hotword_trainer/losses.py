"""Objectives for the Siamese training: distance-to-similarity head,
binary cross-entropy on pair labels, and the optional triplet objective.
"""

from __future__ import annotations

import torch

DEFAULT_TAU = 0.2
_CLAMP = 1e-7


def similarity_head(emb_a: torch.Tensor, emb_b: torch.Tensor, tau: float = DEFAULT_TAU) -> torch.Tensor:
    """Similarity in (0, 1] from a pair of embedding batches.

    Uses squared distance twice ((d^2)^2 = d^4) so the gradient is smooth at
    zero distance; equals tau^4 / (tau^4 + d^4), which is 0.5 at d == tau.
    """
    squared = ((emb_a - emb_b) ** 2).sum(dim=-1)
    t4 = tau**4
    return t4 / (t4 + squared**2)


def bce_loss(labels: torch.Tensor, predicted: torch.Tensor) -> torch.Tensor:
    """Mean binary cross-entropy with predictions clamped away from {0, 1}."""
    p = predicted.clamp(_CLAMP, 1.0 - _CLAMP)
    return -(labels * torch.log(p) + (1.0 - labels) * torch.log(1.0 - p)).mean()


def triplet_loss(anchor: torch.Tensor, positive: torch.Tensor, negative: torch.Tensor) -> torch.Tensor:
    """max(||a-p||^2 - ||a-n||^2, 0), averaged over the batch."""
    d_pos = ((anchor - positive) ** 2).sum(dim=-1)
    d_neg = ((anchor - negative) ** 2).sum(dim=-1)
    return torch.clamp(d_pos - d_neg, min=0.0).mean()


def pair_accuracy(labels: torch.Tensor, predicted: torch.Tensor) -> float:
    """Fraction of pairs where (score >= 0.5) agrees with the label."""
    decisions = (predicted >= 0.5).float()
    return float((decisions == labels).float().mean())
