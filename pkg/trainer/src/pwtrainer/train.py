"""Self-supervised training loop for the compounding network.

Targets come from the dataset itself: every record pairs a (possibly
jitter-corrupted, possibly angle-decimated) beamformed tensor with the
clean full-angle compound of the same scene. Both sides are divided by
the per-record scale from the manifest, so the tanh-bounded network
output lives on the same normalized scale as the target.
"""

import csv
import math
import os
from dataclasses import dataclass

import numpy as np
import torch

from . import blobs, model


@dataclass(frozen=True)
class TrainConfig:
    initial_lr: float = 1e-4
    lr_decay: float = 1e-3
    batch_size: int = 5
    max_epochs: int = 300
    patience: int = 5
    val_fraction: float = 0.33
    seed: int = 0

    def __post_init__(self):
        for name in ("initial_lr", "lr_decay", "batch_size", "max_epochs",
                     "patience"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.val_fraction < 1.0:
            raise ValueError("val_fraction must be in [0, 1)")

    def lr_at(self, epoch: int) -> float:
        return self.initial_lr * math.exp(-self.lr_decay * epoch)


def load_pairs(manifest_path, k):
    """Load all K-matching records as normalized (input, target) arrays."""
    root = os.path.dirname(os.path.abspath(manifest_path))
    entries = [e for e in blobs.load_manifest(manifest_path) if e.K == k]
    if not entries:
        raise ValueError(f"manifest has no records with K={k}")
    xs, ys = [], []
    for e in entries:
        if e.scale <= 0:
            raise ValueError(f"{e.input_path}: missing or non-positive scale")
        z = blobs.read_blob(os.path.join(root, e.input_path))
        v = blobs.read_blob(os.path.join(root, e.target_path))
        if z.ndim != 3 or z.shape[2] != k or v.shape != z.shape[:2]:
            raise ValueError(f"{e.input_path}: blob shape {z.shape} does not "
                             f"match a K={k} tensor with target {v.shape}")
        xs.append((z / e.scale).astype(np.float32))
        ys.append((v / e.scale).astype(np.float32))
    return np.stack(xs), np.stack(ys)


def _epoch_pass(net, xs, ys, idx, batch, optimizer=None):
    total = 0.0
    for start in range(0, len(idx), batch):
        sel = idx[start:start + batch]
        pred = net(xs[sel])
        loss = torch.mean((pred - ys[sel]) ** 2)
        if optimizer is not None:
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
        total += loss.item() * len(sel)
    return total / len(idx)


def train(manifest_path, k, weights_path, curve_path=None,
          cfg: TrainConfig = TrainConfig(), log=None):
    """Fit one model for plane-wave count k; returns the loss history."""
    xs_np, ys_np = load_pairs(manifest_path, k)
    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(len(xs_np))
    n_val = int(round(cfg.val_fraction * len(order)))
    val_idx, train_idx = order[:n_val], order[n_val:]
    if len(train_idx) == 0:
        raise ValueError("validation split leaves no training samples")

    xs = torch.from_numpy(xs_np)
    ys = torch.from_numpy(ys_np)
    a, l = xs_np.shape[1:3]
    net = model.build_model(a, l, k)
    optimizer = torch.optim.Adam(net.parameters(), lr=cfg.initial_lr)
    scheduler = torch.optim.lr_scheduler.LambdaLR(
        optimizer, lambda e: math.exp(-cfg.lr_decay * e))

    history = []
    best = math.inf
    best_state = None
    stale = 0
    for epoch in range(cfg.max_epochs):
        lr_now = optimizer.param_groups[0]["lr"]
        net.train()
        perm = train_idx[rng.permutation(len(train_idx))]
        train_mse = _epoch_pass(net, xs, ys, perm, cfg.batch_size, optimizer)
        net.eval()
        with torch.no_grad():
            if len(val_idx):
                val_mse = _epoch_pass(net, xs, ys, val_idx, cfg.batch_size)
            else:
                val_mse = _epoch_pass(net, xs, ys, train_idx, cfg.batch_size)
        history.append(dict(epoch=epoch, train_mse=train_mse,
                            val_mse=val_mse, lr=lr_now))
        if log:
            log(f"epoch {epoch}: train {train_mse:.3e} val {val_mse:.3e} "
                f"lr {lr_now:.3e}")
        scheduler.step()
        if val_mse < best:
            best = val_mse
            best_state = {k_: v.detach().clone()
                          for k_, v in net.state_dict().items()}
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break

    torch.save(dict(state_dict=best_state, a=a, l=l, k=k,
                    filters=net.spec.filters, best_val_mse=best), weights_path)
    if curve_path:
        with open(curve_path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["epoch", "train_mse",
                                               "val_mse", "lr"])
            w.writeheader()
            w.writerows(history)
    return history
