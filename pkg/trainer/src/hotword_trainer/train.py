"""Training loop: Adam with loss-plateau LR decay and early stopping.

The schedule follows the engine's published recipe: batch 64, 75 steps per
epoch for up to 42 epochs, initial LR 1e-3 cut by 10x after 3 stagnant
epochs down to 1e-5, early stop after 6 stagnant epochs. Stagnation is
judged on training loss. A deterministic single-threaded mode is the
default so identical seeds give identical histories.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from random import Random

import torch

from .losses import bce_loss, pair_accuracy, similarity_head
from .model import BaseNetwork
from .pairs import PairSet

_IMPROVEMENT_EPS = 1e-6

HISTORY_HEADER = ["epoch", "loss", "val_loss", "acc", "val_acc", "lr"]


@dataclass(frozen=True)
class TrainConfig:
    batch: int = 64
    steps_per_epoch: int = 75
    max_epochs: int = 42
    lr: float = 1e-3
    plateau_patience: int = 3
    plateau_factor: float = 0.1
    min_lr: float = 1e-5
    early_stop_patience: int = 6
    tau: float = 0.2

    def __post_init__(self):
        numeric = (
            self.batch, self.steps_per_epoch, self.max_epochs, self.lr,
            self.plateau_patience, self.plateau_factor, self.min_lr,
            self.early_stop_patience, self.tau,
        )
        if any(value <= 0 for value in numeric):
            raise ValueError("all training parameters must be positive")
        if self.min_lr > self.lr:
            raise ValueError("min_lr must not exceed lr")


@dataclass
class EpochStats:
    epoch: int
    loss: float
    val_loss: float
    acc: float
    val_acc: float
    lr: float


@dataclass
class History:
    epochs: list[EpochStats] = field(default_factory=list)

    def save_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(HISTORY_HEADER)
            for row in self.epochs:
                writer.writerow(
                    [row.epoch, repr(row.loss), repr(row.val_loss),
                     repr(row.acc), repr(row.val_acc), repr(row.lr)]
                )


def _epoch_batches(pairs: PairSet, order_rng: Random, cfg: TrainConfig):
    """steps_per_epoch batches drawn from a reshuffled cycle of train pairs."""
    pool = list(pairs.train)
    order_rng.shuffle(pool)
    batches = []
    cursor = 0
    for _ in range(cfg.steps_per_epoch):
        if cursor + cfg.batch > len(pool):
            order_rng.shuffle(pool)
            cursor = 0
        batches.append(pool[cursor : cursor + min(cfg.batch, len(pool))])
        cursor += cfg.batch
    return batches


def _evaluate(model: BaseNetwork, pairs: PairSet, which, cfg: TrainConfig) -> tuple[float, float]:
    model.eval()
    losses, hits, total = [], 0.0, 0
    with torch.no_grad():
        for a, b, labels in pairs.batches(which, cfg.batch):
            emb_a = model(torch.from_numpy(a))
            emb_b = model(torch.from_numpy(b))
            scores = similarity_head(emb_a, emb_b, cfg.tau)
            label_t = torch.from_numpy(labels)
            losses.append(float(bce_loss(label_t, scores)) * len(labels))
            hits += pair_accuracy(label_t, scores) * len(labels)
            total += len(labels)
    model.train()
    return sum(losses) / total, hits / total


def fit(
    pairs: PairSet,
    cfg: TrainConfig | None = None,
    seed: int = 0,
    model: BaseNetwork | None = None,
) -> tuple[BaseNetwork, History]:
    """Train the Siamese pair objective; returns the model and epoch history.

    Raises RuntimeError if the loss goes non-finite (divergence) instead of
    silently exporting garbage.
    """
    cfg = cfg or TrainConfig()
    if not pairs.train:
        raise ValueError("empty training pair set")

    torch.manual_seed(seed)
    torch.set_num_threads(1)
    if model is None:
        model = BaseNetwork()
    model.train()
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.lr)
    order_rng = Random(seed)

    history = History()
    best_loss = float("inf")
    stagnant = 0

    for epoch in range(1, cfg.max_epochs + 1):
        epoch_losses, epoch_hits, seen = [], 0.0, 0
        for batch in _epoch_batches(pairs, order_rng, cfg):
            a = pairs.spectrograms[[p.index_a for p in batch]]
            b = pairs.spectrograms[[p.index_b for p in batch]]
            labels = torch.tensor([p.label for p in batch], dtype=torch.float32)

            optimizer.zero_grad()
            emb_a = model(torch.from_numpy(a))
            emb_b = model(torch.from_numpy(b))
            scores = similarity_head(emb_a, emb_b, cfg.tau)
            loss = bce_loss(labels, scores)
            if not torch.isfinite(loss):
                raise RuntimeError(
                    f"training diverged at epoch {epoch}: loss {float(loss.detach())!r}"
                )
            loss.backward()
            optimizer.step()

            epoch_losses.append(float(loss.detach()) * len(batch))
            epoch_hits += pair_accuracy(labels, scores.detach()) * len(batch)
            seen += len(batch)

        train_loss = sum(epoch_losses) / seen
        train_acc = epoch_hits / seen
        val_loss, val_acc = (
            _evaluate(model, pairs, pairs.test, cfg) if pairs.test else (train_loss, train_acc)
        )
        lr_now = optimizer.param_groups[0]["lr"]
        history.epochs.append(
            EpochStats(epoch, train_loss, val_loss, train_acc, val_acc, lr_now)
        )

        if train_loss < best_loss - _IMPROVEMENT_EPS:
            best_loss = train_loss
            stagnant = 0
        else:
            stagnant += 1
            if stagnant >= cfg.early_stop_patience:
                break
            if stagnant % cfg.plateau_patience == 0 and lr_now > cfg.min_lr:
                for group in optimizer.param_groups:
                    group["lr"] = max(group["lr"] * cfg.plateau_factor, cfg.min_lr)

    return model, history


def finetune(
    model: BaseNetwork,
    clean_pairs: PairSet,
    cfg: TrainConfig | None = None,
    epochs: int = 14,
    seed: int = 0,
) -> History:
    """Continue training on a noise-free pair set with the same recipe."""
    cfg = cfg or TrainConfig()
    retrain_cfg = TrainConfig(
        batch=cfg.batch,
        steps_per_epoch=cfg.steps_per_epoch,
        max_epochs=epochs,
        lr=cfg.lr,
        plateau_patience=cfg.plateau_patience,
        plateau_factor=cfg.plateau_factor,
        min_lr=cfg.min_lr,
        early_stop_patience=cfg.early_stop_patience,
        tau=cfg.tau,
    )
    _, history = fit(clean_pairs, retrain_cfg, seed=seed, model=model)
    return history
