"""Stochastic per-scanline, per-planewave speed-of-sound perturbations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def sigma_levels() -> list:
    """The three perturbation amplitudes (m/s) used for the corruption study."""
    return [0.0, 1.54, 3.85]


@dataclass(frozen=True)
class AberrationProfile:
    """An L x K matrix of perturbed sound speeds c + U(-sigma, sigma)."""

    sos: np.ndarray = field(repr=False)
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.sos.ndim != 2:
            raise ValueError("profile must be an L x K matrix")

    @property
    def shape(self):
        return self.sos.shape


def sample_profile(c: float, sigma: float, L: int, K: int, seed: int) -> AberrationProfile:
    """Draw i.i.d. uniform SoS perturbations on [c - sigma, c + sigma].

    Uses the Philox 4x64 counter-based generator keyed by ``seed`` so that
    identical arguments reproduce the profile bit for bit on any platform.
    sigma = 0 degenerates to the constant matrix c.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if L < 1 or K < 1:
        raise ValueError("profile dimensions must be >= 1")
    rng = np.random.Generator(np.random.Philox(key=seed))
    if sigma == 0.0:
        sos = np.full((L, K), float(c))
    else:
        sos = c + rng.uniform(-sigma, sigma, size=(L, K))
    sos.setflags(write=False)
    return AberrationProfile(sos=sos, sigma=float(sigma), seed=int(seed))
