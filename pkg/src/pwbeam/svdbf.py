"""Patch-based SVD compounding: rank-1 angular-coherence extraction.

Each local patch of the analytic per-planewave tensor is reshaped into a
Casorati matrix (space x angle); its leading singular pair gives the
maximally angle-coherent local image, which replaces the plain coherent
sum of the planewave slabs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import hilbert

from .beamform import DasTensor
from .compound import CompoundImage


@dataclass(frozen=True)
class IqTensor:
    """Analytic (depth-direction Hilbert) planewave tensor, shape (A, L, K)."""

    zt: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.zt.ndim != 3:
            raise ValueError("IQ tensor must be A x L x K")


@dataclass(frozen=True)
class RoiPatch:
    """A local (A_r, L_r, K) block of an IqTensor with its origin indices."""

    origin: tuple
    data: np.ndarray = field(repr=False)

    @property
    def shape(self):
        return self.data.shape[:2]


@dataclass(frozen=True)
class SvdCompound:
    """SVD-compounded image: real part for format uniformity plus the magnitude
    image actually used on the B-mode path."""

    compound: CompoundImage
    magnitude: np.ndarray = field(repr=False)
    fallback_patches: int = 0


def iq_tensor(tensor: DasTensor) -> IqTensor:
    return IqTensor(zt=hilbert(tensor.z, axis=0))


def casorati(patch: RoiPatch) -> np.ndarray:
    """Reshape an (A_r, L_r, K) patch into the (A_r*L_r, K) Casorati matrix.

    Column k is the column-major flattening of slab k; the reshaping is
    invertible.
    """
    ar, lr, k = patch.data.shape
    return patch.data.reshape(ar * lr, k, order="F")


def uncasorati(mat: np.ndarray, shape) -> np.ndarray:
    """Inverse of :func:`casorati` for a single column."""
    return mat.reshape(shape[0], shape[1], order="F")


def rank1_compound(patch: RoiPatch):
    """Leading singular component of the patch's Casorati matrix.

    Returns (image, used_fallback). The output is u1 * s1 reshaped back to
    (A_r, L_r), with the global phase chosen so that its inner product with
    the patch's plain coherent mean over k is real and non-negative. A
    zero patch returns zeros; SVD non-convergence falls back to the plain
    mean and is flagged.
    """
    c = casorati(patch)
    if c.shape[1] < 2:
        raise ValueError("rank-1 compounding needs at least 2 planewaves")
    if not np.any(c):
        return np.zeros(patch.shape, dtype=complex), False
    try:
        u, s, _ = np.linalg.svd(c, full_matrices=False)
    except np.linalg.LinAlgError:
        return uncasorati(c.mean(axis=1), patch.shape), True
    out = u[:, 0] * s[0]
    m = c.mean(axis=1)
    alpha = np.vdot(m, out)
    if np.abs(alpha) > 0:
        out = out * (np.conj(alpha) / np.abs(alpha))
    return uncasorati(out, patch.shape), False


def svd_beamform(tensor: DasTensor, patch_shape=(32, 32)) -> SvdCompound:
    """Tile the analytic tensor into patches and rank-1 compound each one.

    Patches are non-overlapping; edge remainders are processed as smaller
    patches. The assembled complex image is returned as real part
    (CompoundImage) plus magnitude for the B-mode path.
    """
    a, l, k = tensor.z.shape
    ar, lr = patch_shape
    if ar > a or lr > l:
        raise ValueError("patch larger than image")
    zt = iq_tensor(tensor).zt
    out = np.zeros((a, l), dtype=complex)
    fallbacks = 0
    for a0 in range(0, a, ar):
        for l0 in range(0, l, lr):
            block = zt[a0:a0 + ar, l0:l0 + lr, :]
            patch = RoiPatch(origin=(a0, l0), data=block)
            img, fb = rank1_compound(patch)
            fallbacks += int(fb)
            out[a0:a0 + ar, l0:l0 + lr] = img
    return SvdCompound(
        compound=CompoundImage(v=out.real, cfg=tensor.cfg),
        magnitude=np.abs(out),
        fallback_patches=fallbacks,
    )
