"""Inference-only tensor kernels for the embedder network.

Tensors are plain float32 numpy arrays, feature maps laid out (H, W, C).
Kernels are single-threaded and deterministic so they can be checked
bit-for-bit against naive loop oracles.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParamError, ShapeError

_KERNEL_SIZES = (1, 3, 5)
_STRIDES = (1, 2, 3)


def _as_f32(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float32)


def same_padding(size: int, kernel: int, stride: int) -> tuple[int, int]:
    """SAME padding split (begin, end); ties put the extra sample at the end."""
    total = max((math.ceil(size / stride) - 1) * stride + kernel - size, 0)
    begin = total // 2
    return begin, total - begin


def _check_conv_params(kernel: int, stride: int, padding: str) -> None:
    if kernel not in _KERNEL_SIZES:
        raise ParamError(f"kernel size {kernel} not in {_KERNEL_SIZES}")
    if stride not in _STRIDES:
        raise ParamError(f"stride {stride} not in {_STRIDES}")
    if padding not in ("same", "valid"):
        raise ParamError(f"padding must be 'same' or 'valid', got {padding!r}")


def _pad_input(x: np.ndarray, kh: int, kw: int, stride: int, padding: str) -> np.ndarray:
    if padding == "same":
        top, bottom = same_padding(x.shape[0], kh, stride)
        left, right = same_padding(x.shape[1], kw, stride)
        return np.pad(x, ((top, bottom), (left, right), (0, 0)))
    if x.shape[0] < kh or x.shape[1] < kw:
        raise ShapeError(f"input {x.shape[:2]} smaller than kernel {(kh, kw)}")
    return x


def conv2d(x, kernels, stride: int = 1, padding: str = "same") -> np.ndarray:
    """2-D convolution: x (H,W,Cin), kernels (k,k,Cin,Cout)."""
    x, kernels = _as_f32(x), _as_f32(kernels)
    if x.ndim != 3 or kernels.ndim != 4:
        raise ShapeError("conv2d wants x (H,W,Cin) and kernels (k,k,Cin,Cout)")
    kh, kw, cin, cout = kernels.shape
    _check_conv_params(kh, stride, padding)
    if x.shape[2] != cin:
        raise ShapeError(f"input has {x.shape[2]} channels, kernels expect {cin}")
    x = _pad_input(x, kh, kw, stride, padding)
    oh = (x.shape[0] - kh) // stride + 1
    ow = (x.shape[1] - kw) // stride + 1
    out = np.zeros((oh, ow, cout), dtype=np.float32)
    for i in range(kh):
        for j in range(kw):
            window = x[i : i + stride * oh : stride, j : j + stride * ow : stride, :]
            out += window @ kernels[i, j]
    return out


def depthwise_conv2d(x, kernels, stride: int = 1, padding: str = "same") -> np.ndarray:
    """Per-channel convolution: x (H,W,C), kernels (k,k,C)."""
    x, kernels = _as_f32(x), _as_f32(kernels)
    if x.ndim != 3 or kernels.ndim != 3:
        raise ShapeError("depthwise_conv2d wants x (H,W,C) and kernels (k,k,C)")
    kh, kw, channels = kernels.shape
    _check_conv_params(kh, stride, padding)
    if x.shape[2] != channels:
        raise ShapeError(f"input has {x.shape[2]} channels, kernels expect {channels}")
    x = _pad_input(x, kh, kw, stride, padding)
    oh = (x.shape[0] - kh) // stride + 1
    ow = (x.shape[1] - kw) // stride + 1
    out = np.zeros((oh, ow, channels), dtype=np.float32)
    for i in range(kh):
        for j in range(kw):
            window = x[i : i + stride * oh : stride, j : j + stride * ow : stride, :]
            out += window * kernels[i, j]
    return out


def batchnorm_inf(x, gamma, beta, mean, var, eps: float = 1e-3) -> np.ndarray:
    """Per-channel inference batch norm: gamma*(x-mean)/sqrt(var+eps) + beta."""
    x = _as_f32(x)
    gamma, beta = _as_f32(gamma), _as_f32(beta)
    mean, var = _as_f32(mean), _as_f32(var)
    channels = x.shape[-1]
    for name, param in (("gamma", gamma), ("beta", beta), ("mean", mean), ("var", var)):
        if param.shape != (channels,):
            raise ShapeError(f"{name} must have shape ({channels},), got {param.shape}")
    scale = gamma / np.sqrt(var + np.float32(eps))
    return (x - mean) * scale + beta


def sigmoid(x) -> np.ndarray:
    x = _as_f32(x)
    # exp(-|x|) is in (0, 1], so neither branch can overflow float32
    decay = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + decay), decay / (1.0 + decay)).astype(np.float32)


def swish(x) -> np.ndarray:
    x = _as_f32(x)
    return x * sigmoid(x)


def global_avg_pool(x) -> np.ndarray:
    """(H,W,C) -> (C,) mean over the spatial grid."""
    x = _as_f32(x)
    if x.ndim != 3:
        raise ShapeError("global_avg_pool wants (H,W,C)")
    return x.mean(axis=(0, 1), dtype=np.float64).astype(np.float32)


def max_pool2d(x, kernel: int = 2, stride: int = 2) -> np.ndarray:
    """VALID max pooling with floor output sizes."""
    x = _as_f32(x)
    if x.ndim != 3:
        raise ShapeError("max_pool2d wants (H,W,C)")
    if x.shape[0] < kernel or x.shape[1] < kernel:
        raise ShapeError(f"input {x.shape[:2]} smaller than pool kernel {kernel}")
    oh = (x.shape[0] - kernel) // stride + 1
    ow = (x.shape[1] - kernel) // stride + 1
    out = np.full((oh, ow, x.shape[2]), -np.inf, dtype=np.float32)
    for i in range(kernel):
        for j in range(kernel):
            window = x[i : i + stride * oh : stride, j : j + stride * ow : stride, :]
            np.maximum(out, window, out=out)
    return out


def dense(x, weights, bias) -> np.ndarray:
    """Fully connected layer: x (N,), weights (N,M), bias (M,)."""
    x, weights, bias = _as_f32(x), _as_f32(weights), _as_f32(bias)
    if x.ndim != 1 or weights.ndim != 2 or bias.ndim != 1:
        raise ShapeError("dense wants x (N,), weights (N,M), bias (M,)")
    if weights.shape[0] != x.shape[0] or weights.shape[1] != bias.shape[0]:
        raise ShapeError(
            f"dense shapes disagree: x {x.shape}, weights {weights.shape}, bias {bias.shape}"
        )
    return (x @ weights + bias).astype(np.float32)


def l2_normalize(x, eps: float = 1e-12) -> np.ndarray:
    """Scale a vector onto the unit sphere: x / max(||x||, eps)."""
    x = _as_f32(x)
    norm = float(np.linalg.norm(x.astype(np.float64)))
    return (x / np.float32(max(norm, eps))).astype(np.float32)
