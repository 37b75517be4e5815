"""Synthetic plane-wave RF channel data from point-scatterer phantoms.

The simulator is deliberately simple (no attenuation, no element
directivity, no multiple scattering) so that the recorded arrival times
are an exact oracle for the time-of-flight logic downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import AngleSet, ProbeConfig

DEFAULT_FRACTIONAL_BANDWIDTH = 0.6
# Pulse support half-width in units of the Gaussian sigma; exp(-32) tail.
_PULSE_CUTOFF_SIGMAS = 8.0


@dataclass(frozen=True)
class Scatterer:
    x: float          # lateral position, m
    z: float          # depth, m (>= 0)
    amplitude: float  # reflectivity, |a| <= 1

    def __post_init__(self):
        if self.z < 0:
            raise ValueError("scatterer depth must be non-negative")
        if abs(self.amplitude) > 1:
            raise ValueError("|amplitude| must be <= 1")


@dataclass(frozen=True)
class Phantom:
    scatterers: tuple
    true_sos: float = 1540.0

    def __post_init__(self):
        if len(self.scatterers) == 0:
            raise ValueError("phantom must contain at least one scatterer")
        if not (1000.0 <= self.true_sos <= 2000.0):
            raise ValueError("true_sos outside [1000, 2000] m/s")


@dataclass(frozen=True)
class RfCube:
    """Raw channel data, shape (Nt, Ne, K): time x element x planewave."""

    samples: np.ndarray = field(repr=False)
    fs: float = 40e6
    t0: float = 0.0

    def __post_init__(self):
        if self.samples.ndim != 3 or self.samples.shape[0] < 1:
            raise ValueError("samples must be a non-empty Nt x Ne x K tensor")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("RF samples must be finite")


def pulse_sigma_t(fc: float, frac_bw: float) -> float:
    """Temporal sigma of the Gaussian envelope for a given fractional bandwidth."""
    return math.sqrt(2.0 * math.log(2.0)) / (math.pi * fc * frac_bw)


def gauss_pulse(t, fc: float, frac_bw: float = DEFAULT_FRACTIONAL_BANDWIDTH):
    """Gaussian-modulated cosine pulse, unit peak at t = 0; even in t."""
    if fc <= 0:
        raise ValueError("fc must be positive")
    if not (0 < frac_bw < 2):
        raise ValueError("frac_bw must be in (0, 2)")
    t = np.asarray(t, dtype=float)
    st = pulse_sigma_t(fc, frac_bw)
    return np.cos(2.0 * math.pi * fc * t) * np.exp(-(t * t) / (2.0 * st * st))


def simulate(
    phantom: Phantom,
    probe: ProbeConfig,
    angles: AngleSet,
    duration: float,
    frac_bw: float = DEFAULT_FRACTIONAL_BANDWIDTH,
    t0: float = 0.0,
    chunk: int = 512,
) -> RfCube:
    """Plane-wave insonification of a point-scatterer phantom.

    For plane wave k at angle theta and element i at lateral position xe,
    a scatterer at (x, z) produces an echo at

        tau = (z cos(theta) + x sin(theta) + sqrt(z^2 + (x - xe)^2)) / c

    and contributes amplitude * gauss_pulse(t - tau) to that channel.
    Scatterer contributions superpose linearly.
    """
    xs = np.array([s.x for s in phantom.scatterers])
    zs = np.array([s.z for s in phantom.scatterers])
    amps = np.array([s.amplitude for s in phantom.scatterers])
    c = phantom.true_sos

    half_extent = (probe.num_elements - 1) * probe.pitch / 2.0
    if np.any(np.abs(xs) > 1.5 * half_extent):
        raise ValueError("scatterer outside the lateral aperture extended by 50%")
    zmax = float(np.max(zs))
    if duration < 2.0 * zmax / c:
        raise ValueError("duration too short to record the deepest echo")

    fs = probe.sampling_frequency
    nt = int(round(duration * fs))
    theta = angles.as_array()
    xe = probe.element_positions()
    ne = probe.num_elements

    st = pulse_sigma_t(probe.center_frequency, frac_bw)
    nwin = int(math.ceil(_PULSE_CUTOFF_SIGMAS * st * fs))
    win = np.arange(2 * nwin + 1)

    out = np.zeros((len(theta), nt * ne))
    elem_off = np.arange(ne)  # element index -> flat-array offset
    for k, th in enumerate(theta):
        tx = zs * math.cos(th) + xs * math.sin(th)
        for lo in range(0, len(xs), chunk):
            sl = slice(lo, lo + chunk)
            rx = np.sqrt(zs[sl, None] ** 2 + (xs[sl, None] - xe[None, :]) ** 2)
            tau = (tx[sl, None] + rx) / c                        # (ns, ne)
            n0 = np.floor((tau - t0) * fs).astype(np.int64) - nwin
            n = n0[:, :, None] + win[None, None, :]              # (ns, ne, w)
            t = n / fs + t0 - tau[:, :, None]
            vals = amps[sl, None, None] * gauss_pulse(t, probe.center_frequency, frac_bw)
            valid = (n >= 0) & (n < nt)
            flat = (n * ne + elem_off[None, :, None])[valid]
            out[k] += np.bincount(flat, weights=vals[valid], minlength=nt * ne)
    samples = out.reshape(len(theta), nt, ne).transpose(1, 2, 0)
    return RfCube(samples=np.ascontiguousarray(samples), fs=fs, t0=t0)


HYPO_AMPLITUDE = 10.0 ** (-30.0 / 20.0)   # -30 dB relative to background
HYPER_AMPLITUDE = 10.0 ** (12.0 / 20.0)   # +12 dB (applied pre-clip, see below)


def make_cyst_phantom(
    kind: str,
    seed: int,
    true_sos: float = 1540.0,
    depth_range=(10e-3, 30e-3),
    lateral_halfwidth: float = 9e-3,
    density_per_cell: float = 4.0,
    wavelength: float = 1540.0 / 8.48e6,
    cyst_radius: float = 3e-3,
    cyst_center_depth: float = 20e-3,
) -> Phantom:
    """Deterministic speckle phantom with a circular contrast target.

    kind:
      hypoechoic    background speckle with a -30 dB circular inclusion
      hyperechoic   background speckle with a +12 dB circular inclusion
      point_targets five isolated unit scatterers on a 10..50 mm depth ladder

    Background speckle is uniform random scatterers at ``density_per_cell``
    scatterers per wavelength-squared resolution cell, amplitudes uniform
    on [-1, 1]. Same seed -> identical phantom.
    """
    if kind == "point_targets":
        sc = tuple(Scatterer(0.0, z, 1.0) for z in (10e-3, 20e-3, 30e-3, 40e-3, 50e-3))
        return Phantom(scatterers=sc, true_sos=true_sos)
    if kind not in ("hypoechoic", "hyperechoic"):
        raise ValueError(f"unknown phantom kind {kind!r}")

    z0, z1 = depth_range
    area = (z1 - z0) * 2.0 * lateral_halfwidth
    n = max(1, int(round(density_per_cell * area / (wavelength * wavelength))))
    rng = np.random.Generator(np.random.Philox(key=seed))
    x = rng.uniform(-lateral_halfwidth, lateral_halfwidth, size=n)
    z = rng.uniform(z0, z1, size=n)
    a = rng.uniform(-1.0, 1.0, size=n)

    inside = (x * x + (z - cyst_center_depth) ** 2) < cyst_radius * cyst_radius
    scale = HYPO_AMPLITUDE if kind == "hypoechoic" else HYPER_AMPLITUDE
    a = np.where(inside, a * scale, a)
    # keep |amplitude| <= 1: for the hyperechoic case dim the background instead
    if kind == "hyperechoic":
        a = a / HYPER_AMPLITUDE
    sc = tuple(Scatterer(float(xi), float(zi), float(ai)) for xi, zi, ai in zip(x, z, a))
    return Phantom(scatterers=sc, true_sos=true_sos)
