"""Coherent plane-wave compounding and planewave-subset selection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .beamform import DasTensor
from .config import ImagingConfig, subset_indices


@dataclass(frozen=True)
class CompoundImage:
    """RF-domain compound image (pre-envelope), shape (A, L)."""

    v: np.ndarray = field(repr=False)
    cfg: ImagingConfig = None

    def __post_init__(self):
        if self.v.ndim != 2:
            raise ValueError("compound image must be A x L")
        if not np.all(np.isfinite(self.v)):
            raise ValueError("compound image must be finite")


def select_subset(k_full: int, k: int) -> list:
    """Planewave indices for a K-subset: symmetric decimation keeping extremes and center."""
    return subset_indices(k_full, k)


def cpc(tensor: DasTensor, subset) -> CompoundImage:
    """Coherently compound the selected planewave slabs.

    Sums the RF-domain slabs and divides by the subset size, so images built
    from different planewave counts share a brightness scale.
    """
    subset = list(subset)
    if len(subset) == 0:
        raise ValueError("subset must be non-empty")
    if len(set(subset)) != len(subset):
        raise ValueError("subset indices must be distinct")
    nk = tensor.z.shape[2]
    if any(not (0 <= i < nk) for i in subset):
        raise ValueError("subset index out of range")
    # fixed summation order so the result is independent of subset ordering
    v = tensor.z[:, :, sorted(subset)].sum(axis=2) / len(subset)
    return CompoundImage(v=v, cfg=tensor.cfg)
