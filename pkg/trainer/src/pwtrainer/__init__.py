"""Learned plane-wave compounding: a small 3D CNN trained to map an
angle-resolved beamformed tensor to the clean compound image, using the
tensor-blob datasets emitted by the beamforming pipeline."""

__version__ = "0.1.0"
