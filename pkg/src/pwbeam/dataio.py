"""Binary tensor-blob format, PGM emission, and self-supervised dataset export."""

from __future__ import annotations

import json
import math
import os
import struct
from dataclasses import dataclass, field, asdict

import numpy as np

from . import aberration, beamform, compound, config, rfsim

MAGIC = b"UTB1"

_DTYPE_CODES = {0: np.dtype("<f4"), 1: np.dtype("<f8"), 2: np.dtype("<c8")}
_CODE_FOR_KIND = {"f4": 0, "f8": 1, "c8": 2}


class BlobError(Exception):
    """Base class for tensor-blob format errors."""


class BadMagicError(BlobError):
    pass


class TruncatedBlobError(BlobError):
    pass


class UnsupportedDtypeError(BlobError):
    pass


def write_blob(path, tensor: np.ndarray):
    """Write a tensor as magic, dtype code, ndim, u32 dims, row-major LE payload."""
    tensor = np.asarray(tensor)
    if tensor.ndim == 0 or 0 in tensor.shape:
        raise BlobError("tensor must have at least one dimension and no zero dims")
    if tensor.dtype in (np.float32, np.dtype("<f4")):
        code = 0
    elif tensor.dtype in (np.float64, np.dtype("<f8")):
        code = 1
    elif tensor.dtype in (np.complex64, np.dtype("<c8")):
        code = 2
    else:
        raise UnsupportedDtypeError(f"unsupported dtype {tensor.dtype}")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<BB", code, tensor.ndim))
        fh.write(struct.pack(f"<{tensor.ndim}I", *tensor.shape))
        fh.write(np.ascontiguousarray(tensor).astype(_DTYPE_CODES[code]).tobytes())


def read_blob(path) -> np.ndarray:
    """Read a tensor blob; raises a distinct error per corruption mode."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 6 or data[:4] != MAGIC:
        raise BadMagicError(f"{path}: not a UTB1 tensor blob")
    code, ndim = struct.unpack_from("<BB", data, 4)
    if code not in _DTYPE_CODES:
        raise UnsupportedDtypeError(f"{path}: unknown dtype code {code}")
    header_end = 6 + 4 * ndim
    if len(data) < header_end:
        raise TruncatedBlobError(f"{path}: truncated header")
    dims = struct.unpack_from(f"<{ndim}I", data, 6)
    dtype = _DTYPE_CODES[code]
    expected = math.prod(dims) * dtype.itemsize
    if len(data) - header_end != expected:
        raise TruncatedBlobError(
            f"{path}: payload is {len(data) - header_end} bytes, expected {expected}"
        )
    return np.frombuffer(data[header_end:], dtype=dtype).reshape(dims).copy()


def write_pgm(path, bmode):
    """8-bit binary PGM: pixel = round(255 * (db + DR) / DR)."""
    db, dr = bmode.db, bmode.dynamic_range
    pix = np.round(255.0 * (db + dr) / dr).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{pix.shape[1]} {pix.shape[0]}\n255\n".encode("ascii"))
        fh.write(pix.tobytes())


def read_pgm(path, dynamic_range: float = 60.0) -> np.ndarray:
    """Read a binary PGM back into dB values in [-dynamic_range, 0]."""
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h = map(int, parts[1].split())
    maxval = int(parts[2])
    pix = np.frombuffer(parts[3][: w * h], dtype=np.uint8).reshape(h, w)
    return pix.astype(float) / maxval * dynamic_range - dynamic_range


@dataclass(frozen=True)
class DatasetRecord:
    input_path: str
    target_path: str
    sigma: float
    seed: int
    K: int
    phantom: str
    scale: float


@dataclass(frozen=True)
class DatasetManifest:
    records: tuple

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for rec in self.records:
                fh.write(json.dumps(asdict(rec), sort_keys=True) + "\n")

    @staticmethod
    def read(path) -> "DatasetManifest":
        records = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    records.append(DatasetRecord(**json.loads(line)))
        return DatasetManifest(records=tuple(records))


@dataclass(frozen=True)
class EmissionConfig:
    """Everything needed to synthesize one training scene."""

    probe: config.ProbeConfig
    imaging: config.ImagingConfig
    apod: beamform.ApodizationSpec = beamform.ApodizationSpec()
    span_deg: float = 15.0
    k_list: tuple = (31, 25, 15)
    phantom_kind: str = "hypoechoic"
    phantom_depth_range: tuple = (10e-3, 30e-3)
    phantom_lateral_halfwidth: float = 9e-3
    density_per_cell: float = 4.0
    cyst_radius: float = 3e-3
    cyst_center_depth: float = 20e-3
    true_sos: float = 1540.0
    duration_margin: float = 1.3  # record length relative to the two-way deepest echo


def _scene_tensors(ecfg: EmissionConfig, seed: int):
    """Simulate one scene and beamform it at every sigma level.

    Returns (tensors_by_sigma, target) where each tensor has K_full slabs
    and the target is the clean full compound.
    """
    angles = config.make_angle_set(ecfg.probe.num_planewaves, ecfg.span_deg,
                                   ecfg.probe.num_planewaves)
    phantom = rfsim.make_cyst_phantom(
        ecfg.phantom_kind, seed,
        true_sos=ecfg.true_sos,
        depth_range=ecfg.phantom_depth_range,
        lateral_halfwidth=ecfg.phantom_lateral_halfwidth,
        density_per_cell=ecfg.density_per_cell,
        wavelength=ecfg.true_sos / ecfg.probe.center_frequency,
        cyst_radius=ecfg.cyst_radius,
        cyst_center_depth=ecfg.cyst_center_depth,
    )
    zmax = max(s.z for s in phantom.scatterers)
    duration = ecfg.duration_margin * 2.0 * zmax / phantom.true_sos
    cube = rfsim.simulate(phantom, ecfg.probe, angles, duration)

    c = ecfg.imaging.assumed_sos
    L, K = ecfg.imaging.num_scanlines, len(angles)
    tensors = {}
    for j, sigma in enumerate(aberration.sigma_levels()):
        profile = aberration.sample_profile(c, sigma, L, K, seed=seed * 8 + j)
        tensors[sigma] = beamform.das_all(cube, profile, ecfg.apod,
                                          ecfg.imaging, ecfg.probe, angles)
    target = compound.cpc(tensors[0.0], range(K))
    return tensors, target


def emit_dataset(num_scenes: int, out_dir, seeds, ecfg: EmissionConfig) -> DatasetManifest:
    """Write the self-supervised corpus: per scene, one clean target and one
    input tensor per (sigma, K) pair, plus a JSONL manifest.

    The per-record scale is the joint max-abs over input and target so the
    trainer can map both into [-1, 1].
    """
    seeds = list(seeds)
    if len(seeds) < num_scenes:
        raise ValueError("need at least one seed per scene")
    os.makedirs(out_dir, exist_ok=True)
    k_full = ecfg.probe.num_planewaves
    records = []
    for i in range(num_scenes):
        seed = seeds[i]
        tensors, target = _scene_tensors(ecfg, seed)
        target_name = f"scene{seed:05d}_target.utb"
        write_blob(os.path.join(out_dir, target_name), target.v)
        tmax = float(np.abs(target.v).max())
        for sigma in aberration.sigma_levels():
            for k in ecfg.k_list:
                sel = config.subset_indices(k_full, k)
                zin = tensors[sigma].z[:, :, sel]
                name = f"scene{seed:05d}_sigma{sigma:.2f}_k{k:02d}.utb"
                write_blob(os.path.join(out_dir, name), zin)
                scale = max(float(np.abs(zin).max()), tmax)
                records.append(DatasetRecord(
                    input_path=name, target_path=target_name,
                    sigma=sigma, seed=seed, K=k,
                    phantom=ecfg.phantom_kind, scale=scale,
                ))
    manifest = DatasetManifest(records=tuple(records))
    manifest.write(os.path.join(out_dir, "manifest.jsonl"))
    return manifest
