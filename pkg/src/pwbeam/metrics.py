"""Region-of-interest contrast metrics: CR, CNR, GCNR."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .postproc import BmodeImage

MIN_ROI_PIXELS = 16


@dataclass(frozen=True)
class RoiSpec:
    """Circular or rectangular ROI in grid (row, column) coordinates.

    circle: center = (a, l), radius in pixels.
    rect:   origin = (a0, l0), extent = (height, width) in pixels.
    """

    kind: str
    center: tuple = None   # circle
    radius: float = 0.0    # circle
    origin: tuple = None   # rect
    extent: tuple = None   # rect

    def __post_init__(self):
        if self.kind not in ("circle", "rect"):
            raise ValueError("kind must be 'circle' or 'rect'")
        if self.kind == "circle" and (self.center is None or self.radius <= 0):
            raise ValueError("circle ROI needs center and positive radius")
        if self.kind == "rect" and (self.origin is None or self.extent is None):
            raise ValueError("rect ROI needs origin and extent")

    def mask(self, shape) -> np.ndarray:
        if self.kind == "circle":
            aa, ll = np.ogrid[: shape[0], : shape[1]]
            m = (aa - self.center[0]) ** 2 + (ll - self.center[1]) ** 2 <= self.radius ** 2
        else:
            m = np.zeros(shape, dtype=bool)
            a0, l0 = self.origin
            h, w = self.extent
            m[a0:a0 + h, l0:l0 + w] = True
        return m


@dataclass(frozen=True)
class MetricsReport:
    cr_db: float
    cnr: float
    gcnr: float
    n_a: int
    n_b: int
    domain: str = "db"  # pixel domain the statistics were computed on


def _roi_values(img, roi: RoiSpec) -> np.ndarray:
    pix = img.db if isinstance(img, BmodeImage) else np.asarray(img, dtype=float)
    vals = pix[roi.mask(pix.shape)]
    if vals.size < MIN_ROI_PIXELS:
        raise ValueError(f"ROI holds {vals.size} pixels, need >= {MIN_ROI_PIXELS}")
    return vals


def _check_disjoint(img, ra: RoiSpec, rb: RoiSpec):
    pix = img.db if isinstance(img, BmodeImage) else np.asarray(img, dtype=float)
    if np.any(ra.mask(pix.shape) & rb.mask(pix.shape)):
        raise ValueError("ROIs must be disjoint")


def cr(img, ra: RoiSpec, rb: RoiSpec) -> float:
    """Contrast recovery: |mean(Ra) - mean(Rb)| of the pixel values."""
    _check_disjoint(img, ra, rb)
    return float(abs(_roi_values(img, ra).mean() - _roi_values(img, rb).mean()))


def cnr(img, ra: RoiSpec, rb: RoiSpec) -> float:
    """Contrast-to-noise ratio with population variances."""
    _check_disjoint(img, ra, rb)
    va, vb = _roi_values(img, ra), _roi_values(img, rb)
    denom = va.var() + vb.var()
    if denom == 0:
        raise ValueError("CNR undefined: both ROIs have zero variance")
    return float(abs(va.mean() - vb.mean()) / np.sqrt(denom))


def gcnr(img, ra: RoiSpec, rb: RoiSpec, bins: int = 256) -> float:
    """Generalized CNR: one minus the overlap of the two ROI histograms.

    Histograms share bin edges spanning the combined value range of both
    ROIs and are normalized to unit mass, so the result is in [0, 1].
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    _check_disjoint(img, ra, rb)
    va, vb = _roi_values(img, ra), _roi_values(img, rb)
    lo = min(va.min(), vb.min())
    hi = max(va.max(), vb.max())
    if lo == hi:
        return 0.0  # both ROIs constant at the same value: identical distributions
    edges = np.linspace(lo, hi, bins + 1)
    pa, _ = np.histogram(va, bins=edges)
    pb, _ = np.histogram(vb, bins=edges)
    overlap = np.minimum(pa / va.size, pb / vb.size).sum()
    return float(1.0 - overlap)


def report(img, ra: RoiSpec, rb: RoiSpec, bins: int = 256, domain: str = "db") -> MetricsReport:
    pix = img.db if isinstance(img, BmodeImage) else np.asarray(img, dtype=float)
    return MetricsReport(
        cr_db=cr(img, ra, rb),
        cnr=cnr(img, ra, rb),
        gcnr=gcnr(img, ra, rb, bins=bins),
        n_a=int(ra.mask(pix.shape).sum()),
        n_b=int(rb.mask(pix.shape).sum()),
        domain=domain,
    )
