"""Three-block 3D-CNN that collapses the plane-wave axis into a compound image.

Each block convolves a single-channel A x L x M volume with J filters of
size 15 x 3 x M (stride M along the third axis, "same" padding along the
first two), so the third dimension collapses to 1; the J channels are
then permuted back into the third dimension for the next block. Blocks 1
and 2 batch-normalize between convolution and ReLU, block 3 has no
normalization. A 1x1 2D
convolution merges the final J channels and a tanh bounds the output.
"""

from dataclasses import dataclass

import torch
from torch import nn

KERNEL_AXIAL = 15
KERNEL_LATERAL = 3


@dataclass(frozen=True)
class NetworkSpec:
    num_blocks: int = 3
    filters: int = 64

    def __post_init__(self):
        if self.num_blocks != 3:
            raise ValueError("architecture is fixed at three blocks")
        if self.filters < 1:
            raise ValueError("filters must be positive")


class _Block(nn.Module):
    def __init__(self, depth, filters, normalize):
        super().__init__()
        self.conv = nn.Conv3d(1, filters, (KERNEL_AXIAL, KERNEL_LATERAL, depth),
                              stride=(1, 1, depth),
                              padding=(KERNEL_AXIAL // 2, KERNEL_LATERAL // 2, 0))
        self.norm = nn.BatchNorm3d(filters) if normalize else None

    def forward(self, x):
        # (n, 1, a, l, depth) -> (n, filters, a, l, 1)
        x = self.conv(x)
        if self.norm is not None:
            x = self.norm(x)
        x = torch.relu(x)
        # channels become the new third dimension
        return x.squeeze(-1).permute(0, 2, 3, 1).unsqueeze(1)


class CompoundNet(nn.Module):
    """Maps an (n, a, l, k) tensor to (n, a, l) compound images in [-1, 1]."""

    def __init__(self, a, l, k, spec: NetworkSpec = NetworkSpec()):
        super().__init__()
        if k < 1:
            raise ValueError("need at least one plane-wave slab")
        if a < KERNEL_AXIAL or l < KERNEL_LATERAL:
            raise ValueError(
                f"grid {a}x{l} smaller than the {KERNEL_AXIAL}x{KERNEL_LATERAL}"
                " kernel footprint")
        self.a, self.l, self.k = a, l, k
        self.spec = spec
        self.block1 = _Block(k, spec.filters, normalize=True)
        self.block2 = _Block(spec.filters, spec.filters, normalize=True)
        self.block3 = _Block(spec.filters, spec.filters, normalize=False)
        self.head = nn.Conv2d(spec.filters, 1, kernel_size=1)

    def forward(self, x):
        if x.shape[1:] != (self.a, self.l, self.k):
            raise ValueError(f"expected (n, {self.a}, {self.l}, {self.k}) "
                             f"input, got {tuple(x.shape)}")
        x = x.unsqueeze(1)
        x = self.block1(x)
        x = self.block2(x)
        x = self.block3(x)
        x = self.head(x.squeeze(1).permute(0, 3, 1, 2))
        return torch.tanh(x).squeeze(1)


def build_model(a, l, k, spec: NetworkSpec = NetworkSpec()) -> CompoundNet:
    return CompoundNet(a, l, k, spec)
