"""Torch mirror of the engine's base network.

Inference semantics must match the engine bit-closely: TensorFlow-style
asymmetric SAME padding (extra row/column at the end), batch norm with
eps 1e-3, swish activations, no conv biases, squeeze-excitation as two
dense layers over globally pooled channels, and a final L2-normalized
256-unit dense layer.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn
import torch.nn.functional as F

BN_EPS = 1e-3
EMBED_DIM = 256
SE_RATIO = 0.25

# (name, kernel, stride, expand, in_ch, out_ch) - must stay in sync with the
# engine's weight manifest ordering.
MBCONV_TABLE = (
    ("stage1.block1", 3, 1, 1, 32, 16),
    ("stage2.block1", 3, 2, 6, 16, 24),
    ("stage2.block2", 3, 1, 6, 24, 24),
    ("stage3.block1", 5, 2, 6, 24, 40),
    ("stage3.block2", 5, 1, 6, 40, 40),
    ("stage4.block1", 3, 2, 6, 40, 80),
    ("stage4.block2", 3, 1, 6, 80, 80),
    ("stage4.block3", 3, 1, 6, 80, 80),
)


def se_channels(block_in_ch: int) -> int:
    return max(1, round(block_in_ch * SE_RATIO))


def _same_pad(size: int, kernel: int, stride: int) -> tuple[int, int]:
    total = max((math.ceil(size / stride) - 1) * stride + kernel - size, 0)
    begin = total // 2
    return begin, total - begin


class SameConv2d(nn.Module):
    """Conv2d with TF SAME padding (pad split favors the trailing edge)."""

    def __init__(self, in_ch, out_ch, kernel, stride, groups=1):
        super().__init__()
        self.kernel = kernel
        self.stride = stride
        self.conv = nn.Conv2d(in_ch, out_ch, kernel, stride, padding=0,
                              groups=groups, bias=False)

    def forward(self, x):
        top, bottom = _same_pad(x.shape[2], self.kernel, self.stride)
        left, right = _same_pad(x.shape[3], self.kernel, self.stride)
        return self.conv(F.pad(x, (left, right, top, bottom)))


class SqueezeExcite(nn.Module):
    def __init__(self, channels, reduced):
        super().__init__()
        self.reduce = nn.Linear(channels, reduced)
        self.expand = nn.Linear(reduced, channels)

    def forward(self, x):
        pooled = x.mean(dim=(2, 3))
        gate = torch.sigmoid(self.expand(F.silu(self.reduce(pooled))))
        return x * gate[:, :, None, None]


class MBConv(nn.Module):
    def __init__(self, kernel, stride, expand, in_ch, out_ch):
        super().__init__()
        self.use_skip = stride == 1 and in_ch == out_ch
        exp_ch = in_ch * expand
        self.expand_conv = None
        if expand != 1:
            self.expand_conv = SameConv2d(in_ch, exp_ch, 1, 1)
            self.expand_bn = nn.BatchNorm2d(exp_ch, eps=BN_EPS)
        self.dw = SameConv2d(exp_ch, exp_ch, kernel, stride, groups=exp_ch)
        self.dw_bn = nn.BatchNorm2d(exp_ch, eps=BN_EPS)
        self.se = SqueezeExcite(exp_ch, se_channels(in_ch))
        self.project = SameConv2d(exp_ch, out_ch, 1, 1)
        self.project_bn = nn.BatchNorm2d(out_ch, eps=BN_EPS)

    def forward(self, x):
        residual = x
        if self.expand_conv is not None:
            x = F.silu(self.expand_bn(self.expand_conv(x)))
        x = F.silu(self.dw_bn(self.dw(x)))
        x = self.se(x)
        x = self.project_bn(self.project(x))
        if self.use_skip:
            x = x + residual
        return x


class BaseNetwork(nn.Module):
    """98x64x1 log mel input -> unit-norm 256-d embedding."""

    def __init__(self):
        super().__init__()
        self.stem_conv = SameConv2d(1, 32, 3, 2)
        self.stem_bn = nn.BatchNorm2d(32, eps=BN_EPS)
        self.blocks = nn.ModuleDict(
            {name.replace(".", "_"): MBConv(k, s, e, ci, co)
             for name, k, s, e, ci, co in MBCONV_TABLE}
        )
        self.head_conv1 = SameConv2d(80, 32, 3, 1)
        self.head_bn1 = nn.BatchNorm2d(32, eps=BN_EPS)
        self.head_conv2 = SameConv2d(32, 32, 3, 1)
        self.head_bn2 = nn.BatchNorm2d(32, eps=BN_EPS)
        self.pool = nn.MaxPool2d(2, 2)
        self.dense = nn.Linear(32, EMBED_DIM)

    def forward(self, x):
        # x: (N, 98, 64) or (N, 1, 98, 64)
        if x.dim() == 3:
            x = x[:, None, :, :]
        x = F.silu(self.stem_bn(self.stem_conv(x)))
        for name, *_ in MBCONV_TABLE:
            x = self.blocks[name.replace(".", "_")](x)
        x = self.pool(self.head_bn1(self.head_conv1(x)))
        x = self.pool(self.head_bn2(self.head_conv2(x)))
        x = x.flatten(1)
        x = self.dense(x)
        return F.normalize(x, p=2, dim=1, eps=1e-12)
