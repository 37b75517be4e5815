"""Acquisition and reconstruction parameters shared by every pipeline stage."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

SOFT_TISSUE_SOS = 1540.0  # m/s, conventional scanner assumption


@dataclass(frozen=True)
class ProbeConfig:
    """Linear-array transducer geometry and sampling parameters."""

    num_elements: int = 192
    pitch: float = 0.2e-3          # m
    element_width: float = 0.14e-3  # m
    center_frequency: float = 8.48e6   # Hz
    sampling_frequency: float = 40e6   # Hz
    num_planewaves: int = 31

    def __post_init__(self):
        if self.num_elements < 2:
            raise ValueError("num_elements must be >= 2")
        if not (self.pitch > self.element_width > 0):
            raise ValueError("require pitch > element_width > 0")
        if not (0 < self.center_frequency < self.sampling_frequency / 2):
            raise ValueError("center_frequency must sit below Nyquist")
        if self.num_planewaves % 2 == 0:
            raise ValueError("num_planewaves must be odd so the 0-degree wave is included")

    @property
    def wavelength(self) -> float:
        return SOFT_TISSUE_SOS / self.center_frequency

    def element_positions(self) -> np.ndarray:
        """Lateral element-center coordinates in meters, centered on 0."""
        n = self.num_elements
        return (np.arange(n) - (n - 1) / 2.0) * self.pitch


@dataclass(frozen=True)
class AngleSet:
    """Ordered plane-wave steering angles in radians, symmetric about 0."""

    angles: tuple

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("angles must be a non-empty 1-D sequence")
        if np.any(np.diff(a) <= 0):
            raise ValueError("angles must be strictly increasing")
        if np.max(np.abs(a)) >= math.pi / 4:
            raise ValueError("steering angles must stay below 45 degrees")
        if np.max(np.abs(a + a[::-1])) > 1e-12:
            raise ValueError("angle set must be symmetric about 0")
        if a.size % 2 == 1 and abs(a[a.size // 2]) > 1e-12:
            raise ValueError("odd-sized angle set must contain 0")

    def __len__(self) -> int:
        return len(self.angles)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.angles, dtype=float)


@dataclass(frozen=True)
class ImagingConfig:
    """Reconstruction grid and display parameters."""

    depth_start: float = 20e-3   # m
    depth_end: float = 80e-3     # m
    num_depth_samples: int = 1024
    num_scanlines: int = 192
    assumed_sos: float = SOFT_TISSUE_SOS
    dynamic_range: float = 60.0  # dB

    def __post_init__(self):
        if not (0 <= self.depth_start < self.depth_end):
            raise ValueError("require 0 <= depth_start < depth_end")
        if self.num_depth_samples < 1:
            raise ValueError("num_depth_samples must be >= 1")
        if self.num_scanlines < 1:
            raise ValueError("num_scanlines must be >= 1")
        if not (1000.0 <= self.assumed_sos <= 2000.0):
            raise ValueError("assumed_sos outside plausible tissue range [1000, 2000] m/s")
        if self.dynamic_range <= 0:
            raise ValueError("dynamic_range must be positive")


def default_probe() -> ProbeConfig:
    """The L3-12H linear-array configuration used throughout."""
    return ProbeConfig()


def subset_indices(k_full: int, subset_k: int) -> list:
    """Symmetric uniform decimation of ``range(k_full)`` down to ``subset_k`` indices.

    Keeps both extremes and the center index; the upper half mirrors the
    lower half so the selection is exactly symmetric.
    """
    if k_full % 2 == 0 or subset_k % 2 == 0:
        raise ValueError("counts must be odd")
    if not (1 <= subset_k <= k_full):
        raise ValueError("subset size must be in [1, k_full]")
    if subset_k == 1:
        return [(k_full - 1) // 2]
    idx = [0] * subset_k
    for i in range((subset_k + 1) // 2):
        j = int(math.floor(i * (k_full - 1) / (subset_k - 1) + 0.5))
        idx[i] = j
        idx[subset_k - 1 - i] = k_full - 1 - j
    if len(set(idx)) != subset_k:
        raise ValueError("decimation produced duplicate indices")
    return idx


def make_angle_set(k_full: int, span_deg: float, subset_k: int) -> AngleSet:
    """Uniform symmetric angle fan over ±span_deg, optionally decimated.

    The full fan has ``k_full`` angles; ``subset_k`` of them are retained by
    symmetric index decimation that always keeps ±span and 0.
    """
    if span_deg <= 0:
        raise ValueError("span_deg must be positive")
    if k_full % 2 == 0 or subset_k % 2 == 0:
        raise ValueError("plane-wave counts must be odd")
    if subset_k > k_full:
        raise ValueError("subset_k cannot exceed k_full")
    span = math.radians(span_deg)
    full = np.linspace(-span, span, k_full)
    full[(k_full - 1) // 2] = 0.0  # kill linspace rounding at the center
    sel = full[subset_indices(k_full, subset_k)]
    return AngleSet(tuple(sel.tolist()))


def pixel_grid(cfg: ImagingConfig, probe: ProbeConfig):
    """Reconstruction grid: uniform depths and scanlines at element centers.

    Returns (depths[A], laterals[L]) in meters. Scanlines coincide with
    element lateral positions, so L must equal the element count.
    """
    if cfg.num_scanlines != probe.num_elements:
        raise ValueError("num_scanlines must equal num_elements (one scanline per element)")
    if cfg.num_depth_samples == 1:
        depths = np.array([cfg.depth_start])
    else:
        depths = np.linspace(cfg.depth_start, cfg.depth_end, cfg.num_depth_samples)
    return depths, probe.element_positions()


_CONFIG_FIELDS = {
    **{f.name: (ProbeConfig, f.type) for f in fields(ProbeConfig)},
    **{f.name: (ImagingConfig, f.type) for f in fields(ImagingConfig)},
}

_INT_FIELDS = {"num_elements", "num_planewaves", "num_depth_samples", "num_scanlines"}


def load_config_file(path):
    """Parse a flat key=value config file into (ProbeConfig, ImagingConfig).

    Keys are exactly the dataclass field names, values in SI units; unknown
    keys are rejected. Missing keys fall back to the defaults.
    """
    probe_kw, img_kw = {}, {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in _CONFIG_FIELDS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            value = int(val) if key in _INT_FIELDS else float(val)
            (probe_kw if _CONFIG_FIELDS[key][0] is ProbeConfig else img_kw)[key] = value
    return ProbeConfig(**probe_kw), ImagingConfig(**img_kw)
