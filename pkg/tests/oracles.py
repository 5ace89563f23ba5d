"""Independent naive-loop oracles for the tensor kernels.

Deliberately written as quadruple-nested loops with separate padding
arithmetic so they share no code path with hotword.kernels.
"""

import math

import numpy as np


def same_pad_amounts(size, kernel, stride):
    total = max((math.ceil(size / stride) - 1) * stride + kernel - size, 0)
    begin = total // 2
    return begin, total - begin


def pad_same(x, kh, kw, stride):
    top, bottom = same_pad_amounts(x.shape[0], kh, stride)
    left, right = same_pad_amounts(x.shape[1], kw, stride)
    padded = np.zeros(
        (x.shape[0] + top + bottom, x.shape[1] + left + right, x.shape[2]), dtype=np.float64
    )
    padded[top : top + x.shape[0], left : left + x.shape[1], :] = x
    return padded


def conv2d_naive(x, kernels, stride, padding):
    x = np.asarray(x, dtype=np.float64)
    kernels = np.asarray(kernels, dtype=np.float64)
    kh, kw, cin, cout = kernels.shape
    if padding == "same":
        x = pad_same(x, kh, kw, stride)
    oh = (x.shape[0] - kh) // stride + 1
    ow = (x.shape[1] - kw) // stride + 1
    out = np.zeros((oh, ow, cout))
    for i in range(oh):
        for j in range(ow):
            for co in range(cout):
                acc = 0.0
                for ki in range(kh):
                    for kj in range(kw):
                        for ci in range(cin):
                            acc += x[i * stride + ki, j * stride + kj, ci] * kernels[ki, kj, ci, co]
                out[i, j, co] = acc
    return out


def depthwise_naive(x, kernels, stride, padding):
    x = np.asarray(x, dtype=np.float64)
    kernels = np.asarray(kernels, dtype=np.float64)
    kh, kw, channels = kernels.shape
    if padding == "same":
        x = pad_same(x, kh, kw, stride)
    oh = (x.shape[0] - kh) // stride + 1
    ow = (x.shape[1] - kw) // stride + 1
    out = np.zeros((oh, ow, channels))
    for i in range(oh):
        for j in range(ow):
            for c in range(channels):
                acc = 0.0
                for ki in range(kh):
                    for kj in range(kw):
                        acc += x[i * stride + ki, j * stride + kj, c] * kernels[ki, kj, c]
                out[i, j, c] = acc
    return out


def dense_naive(x, weights, bias):
    x = np.asarray(x, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    out = np.zeros(weights.shape[1])
    for m in range(weights.shape[1]):
        acc = float(bias[m])
        for n in range(weights.shape[0]):
            acc += x[n] * weights[n, m]
        out[m] = acc
    return out


def max_pool_naive(x, kernel, stride):
    x = np.asarray(x, dtype=np.float64)
    oh = (x.shape[0] - kernel) // stride + 1
    ow = (x.shape[1] - kernel) // stride + 1
    out = np.zeros((oh, ow, x.shape[2]))
    for i in range(oh):
        for j in range(ow):
            for c in range(x.shape[2]):
                best = -np.inf
                for ki in range(kernel):
                    for kj in range(kernel):
                        best = max(best, x[i * stride + ki, j * stride + kj, c])
                out[i, j, c] = best
    return out


def global_avg_pool_naive(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros(x.shape[2])
    for c in range(x.shape[2]):
        acc = 0.0
        for i in range(x.shape[0]):
            for j in range(x.shape[1]):
                acc += x[i, j, c]
        out[c] = acc / (x.shape[0] * x.shape[1])
    return out
