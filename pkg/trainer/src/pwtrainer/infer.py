"""Apply a trained compounding model to one beamformed tensor blob."""

import numpy as np
import torch

from . import blobs, model


def load_weights(weights_path):
    ckpt = torch.load(weights_path, map_location="cpu", weights_only=True)
    net = model.build_model(ckpt["a"], ckpt["l"], ckpt["k"],
                            model.NetworkSpec(filters=ckpt["filters"]))
    net.load_state_dict(ckpt["state_dict"])
    net.eval()
    return net


def infer(weights_path, in_path, out_path, scale):
    """Normalize by scale, run the network, rescale, write an A x L blob."""
    if scale is None or scale <= 0:
        raise ValueError("a positive normalization scale is required")
    net = load_weights(weights_path)
    z = blobs.read_blob(in_path)
    if z.ndim != 3:
        raise ValueError(f"{in_path}: expected an A x L x K tensor")
    x = torch.from_numpy((z / scale).astype(np.float32)).unsqueeze(0)
    with torch.no_grad():
        v = net(x)[0].numpy() * scale
    blobs.write_blob(out_path, v.astype(np.float32))
    return v
