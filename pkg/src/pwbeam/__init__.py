"""Plane-wave ultrasound beamforming with stochastic SoS aberration,
SVD-based compounding, contrast metrics, and training-data emission."""

__version__ = "0.1.0"
