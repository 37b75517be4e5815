"""Time-of-flight correction and per-planewave delay-and-sum beamforming."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .aberration import AberrationProfile
from .config import AngleSet, ImagingConfig, ProbeConfig, pixel_grid
from .rfsim import RfCube


@dataclass(frozen=True)
class ApodizationSpec:
    """Receive apodization: window shape and dynamic-aperture f-number."""

    window: str = "hann"
    f_number: float = 1.0

    def __post_init__(self):
        if self.window not in ("rectangular", "hann"):
            raise ValueError("window must be 'rectangular' or 'hann'")
        if not (0.5 < self.f_number <= 4.0):
            raise ValueError("f_number must lie in (0.5, 4]")


@dataclass(frozen=True)
class DasTensor:
    """Per-planewave beamformed images, shape (A, L, K)."""

    z: np.ndarray = field(repr=False)
    cfg: ImagingConfig = None
    angles: AngleSet = None

    def __post_init__(self):
        if self.z.ndim != 3:
            raise ValueError("DasTensor must be A x L x K")
        if not np.all(np.isfinite(self.z)):
            raise ValueError("beamformed tensor must be finite")


def tof(x: float, z: float, element_x: float, angle: float, c: float):
    """Two-way time of flight: plane-wave transmit leg plus receive leg.

    Transmit distance d1 = z cos(angle) + x sin(angle); receive distance
    d2 = sqrt(z^2 + (x - element_x)^2); returns (d1 + d2) / c.
    """
    d1 = z * np.cos(angle) + x * np.sin(angle)
    d2 = np.sqrt(z * z + (x - element_x) ** 2)
    return (d1 + d2) / c


def _aperture_weights(z, x_line, xe, apod: ApodizationSpec):
    """Dynamic-aperture weights, shape (A, Ne); zero outside the aperture.

    The receive aperture at depth z has half-width z / (2 f#) centered at
    the scanline position. At z = 0 the aperture degenerates to the
    coincident element alone.
    """
    half = z[:, None] / (2.0 * apod.f_number)
    dx = np.abs(xe[None, :] - x_line) + np.zeros_like(half)
    u = np.full(np.broadcast_shapes(half.shape, dx.shape), 2.0)
    np.divide(dx, half, out=u, where=half > 0)
    u[(half <= 0) & (dx == 0)] = 0.0  # degenerate aperture: coincident element only
    if apod.window == "hann":
        w = np.where(u <= 1.0, 0.5 * (1.0 + np.cos(math.pi * np.minimum(u, 1.0))), 0.0)
    else:
        w = np.where(u <= 1.0, 1.0, 0.0)
    return w


def das_single(
    cube: RfCube,
    k: int,
    c_per_line,
    apod: ApodizationSpec,
    cfg: ImagingConfig,
    probe: ProbeConfig,
    angles: AngleSet,
) -> np.ndarray:
    """Delay-and-sum one plane wave onto the A x L pixel grid.

    Each receive trace is delayed by the pixel's time of flight (linear
    interpolation between samples; delays outside the record contribute
    zero), weighted by the dynamic-aperture window, summed over elements
    and divided by the number of active (nonzero-weight) elements.
    ``c_per_line[l]`` is the sound speed used for every pixel of scanline l.
    """
    nt, ne, nk = cube.samples.shape
    if ne != probe.num_elements or nk != len(angles):
        raise ValueError("cube dimensions do not match probe/angle configuration")
    if not (0 <= k < nk):
        raise ValueError("planewave index out of range")
    depths, laterals = pixel_grid(cfg, probe)
    c_per_line = np.asarray(c_per_line, dtype=float)
    if c_per_line.shape != (len(laterals),):
        raise ValueError("c_per_line must have one entry per scanline")

    xe = probe.element_positions()
    theta = angles.as_array()[k]
    fs, t0 = cube.fs, cube.t0
    traces = cube.samples[:, :, k]
    img = np.zeros((len(depths), len(laterals)))
    for l, x_line in enumerate(laterals):
        tau = tof(x_line, depths[:, None], xe[None, :], theta, c_per_line[l])
        idx = (tau - t0) * fs
        valid = (idx >= 0.0) & (idx <= nt - 1)
        i0c = np.clip(np.floor(idx).astype(np.int64), 0, nt - 2)
        frac = idx - i0c
        delayed = traces[i0c, np.arange(ne)[None, :]] * (1.0 - frac) + \
            traces[i0c + 1, np.arange(ne)[None, :]] * frac
        delayed = np.where(valid, delayed, 0.0)
        w = _aperture_weights(depths, x_line, xe, apod)
        count = np.count_nonzero(w, axis=1)
        acc = np.sum(w * delayed, axis=1)
        img[:, l] = np.where(count > 0, acc / np.maximum(count, 1), 0.0)
    return img


def das_all(
    cube: RfCube,
    profile: AberrationProfile,
    apod: ApodizationSpec,
    cfg: ImagingConfig,
    probe: ProbeConfig,
    angles: AngleSet,
) -> DasTensor:
    """Beamform every plane wave with its per-scanline sound-speed column."""
    nk = cube.samples.shape[2]
    if profile.shape != (cfg.num_scanlines, nk):
        raise ValueError("aberration profile dimensions must be (L, K)")
    z = np.stack(
        [das_single(cube, k, profile.sos[:, k], apod, cfg, probe, angles) for k in range(nk)],
        axis=2,
    )
    return DasTensor(z=z, cfg=cfg, angles=angles)
