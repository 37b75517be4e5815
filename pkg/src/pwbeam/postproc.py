"""IQ conversion, envelope detection, and log compression to B-mode."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import hilbert

from .compound import CompoundImage


@dataclass(frozen=True)
class IqImage:
    """Complex analytic image, shape (A, L)."""

    iq: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.iq.ndim != 2:
            raise ValueError("IQ image must be A x L")


@dataclass(frozen=True)
class BmodeImage:
    """Log-compressed image in dB, values in [-dynamic_range, 0]."""

    db: np.ndarray = field(repr=False)
    dynamic_range: float = 60.0

    def __post_init__(self):
        if self.db.ndim != 2:
            raise ValueError("B-mode image must be A x L")
        if np.any(self.db > 1e-12) or np.any(self.db < -self.dynamic_range - 1e-9):
            raise ValueError("B-mode values must lie in [-dynamic_range, 0]")


def analytic_signal(column: np.ndarray) -> np.ndarray:
    """Discrete analytic signal of a real vector via the FFT method.

    Negative-frequency bins are zeroed and positive bins doubled (DC and
    Nyquist unchanged); exact-length transform, no padding. The real part
    equals the input to numerical precision.
    """
    column = np.asarray(column, dtype=float)
    if column.ndim != 1 or column.size < 2:
        raise ValueError("input must be a 1-D vector of length >= 2")
    return hilbert(column)


def envelope(img: CompoundImage) -> np.ndarray:
    """Per-scanline envelope: magnitude of the depth-direction analytic signal."""
    return np.abs(hilbert(img.v, axis=0))


def iq_image(img: CompoundImage) -> IqImage:
    """Complex analytic image, depth-direction Hilbert per scanline."""
    return IqImage(iq=hilbert(img.v, axis=0))


def log_compress(env: np.ndarray, dynamic_range: float = 60.0) -> BmodeImage:
    """Normalize to the global envelope maximum and clamp to [-DR, 0] dB."""
    env = np.asarray(env, dtype=float)
    if np.any(env < 0):
        raise ValueError("envelope must be non-negative")
    peak = env.max()
    if peak <= 0:
        raise ValueError("all-zero envelope cannot be log compressed")
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(env / peak)
    return BmodeImage(db=np.clip(db, -dynamic_range, 0.0), dynamic_range=dynamic_range)


def bmode(img: CompoundImage, dynamic_range: float = 60.0) -> BmodeImage:
    """Envelope detection followed by log compression."""
    return log_compress(envelope(img), dynamic_range)
