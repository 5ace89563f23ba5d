"""The base network: a compact CNN mapping 98x64 log mel input to a unit
256-d embedding, plus the EWN1 weight file format.

The architecture is fixed. A weight file must carry exactly the tensors the
architecture expects (same names, kinds, shapes, hyperparameters) or loading
fails; tensors are addressed by name, not file position.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels as K
from .errors import BadMagic, ManifestMismatch, NonFiniteTensor, ShapeError
from .features import MelSpectrogram, N_FRAMES, N_MELS

MAGIC = b"EWN1"
EMBED_DIM = 256
SE_RATIO = 0.25
BN_EPS = 1e-3

# Inverted-bottleneck blocks: (name, kernel, stride, expand, in_ch, out_ch).
# Residual skip applies iff stride == 1 and in_ch == out_ch.
_MBCONV = (
    ("stage1.block1", 3, 1, 1, 32, 16),
    ("stage2.block1", 3, 2, 6, 16, 24),
    ("stage2.block2", 3, 1, 6, 24, 24),
    ("stage3.block1", 5, 2, 6, 24, 40),
    ("stage3.block2", 5, 1, 6, 40, 40),
    ("stage4.block1", 3, 2, 6, 40, 80),
    ("stage4.block2", 3, 1, 6, 80, 80),
    ("stage4.block3", 3, 1, 6, 80, 80),
)

_STEM_CH = 32
_HEAD_CH = 32
_FLAT_DIM = 1 * 1 * _HEAD_CH


def se_channels(block_in_ch: int) -> int:
    """Squeeze-excitation bottleneck width for a block's input channel count."""
    return max(1, round(block_in_ch * SE_RATIO))


@dataclass(frozen=True)
class TensorSpec:
    """One named tensor the architecture expects in a weight file."""

    name: str
    kind: str
    shape: tuple[int, ...]
    hyperparams: dict = field(default_factory=dict)


def _bn_specs(prefix: str, channels: int) -> list[TensorSpec]:
    return [
        TensorSpec(f"{prefix}.gamma", "bn_gamma", (channels,)),
        TensorSpec(f"{prefix}.beta", "bn_beta", (channels,)),
        TensorSpec(f"{prefix}.mean", "bn_mean", (channels,)),
        TensorSpec(f"{prefix}.var", "bn_var", (channels,)),
    ]


def arch_manifest() -> tuple[TensorSpec, ...]:
    """The canonical ordered tensor list defining the network."""
    specs: list[TensorSpec] = []
    specs.append(
        TensorSpec("stem.conv.kernel", "conv_kernel", (3, 3, 1, _STEM_CH),
                   {"stride": 2, "padding": "same"})
    )
    specs += _bn_specs("stem.bn", _STEM_CH)

    for name, kernel, stride, expand, in_ch, out_ch in _MBCONV:
        exp_ch = in_ch * expand
        if expand != 1:
            specs.append(
                TensorSpec(f"{name}.expand.kernel", "conv_kernel", (1, 1, in_ch, exp_ch),
                           {"stride": 1, "padding": "same"})
            )
            specs += _bn_specs(f"{name}.expand_bn", exp_ch)
        specs.append(
            TensorSpec(f"{name}.dw.kernel", "dw_kernel", (kernel, kernel, exp_ch),
                       {"stride": stride, "padding": "same"})
        )
        specs += _bn_specs(f"{name}.dw_bn", exp_ch)
        se_ch = se_channels(in_ch)
        specs.append(TensorSpec(f"{name}.se.reduce.kernel", "dense_kernel", (exp_ch, se_ch)))
        specs.append(TensorSpec(f"{name}.se.reduce.bias", "dense_bias", (se_ch,)))
        specs.append(TensorSpec(f"{name}.se.expand.kernel", "dense_kernel", (se_ch, exp_ch)))
        specs.append(TensorSpec(f"{name}.se.expand.bias", "dense_bias", (exp_ch,)))
        specs.append(
            TensorSpec(f"{name}.project.kernel", "conv_kernel", (1, 1, exp_ch, out_ch),
                       {"stride": 1, "padding": "same"})
        )
        specs += _bn_specs(f"{name}.project_bn", out_ch)

    in_ch = _MBCONV[-1][5]
    for stage in (1, 2):
        specs.append(
            TensorSpec(f"head.conv{stage}.kernel", "conv_kernel", (3, 3, in_ch, _HEAD_CH),
                       {"stride": 1, "padding": "same"})
        )
        specs += _bn_specs(f"head.bn{stage}", _HEAD_CH)
        in_ch = _HEAD_CH

    specs.append(TensorSpec("embed.dense.kernel", "dense_kernel", (_FLAT_DIM, EMBED_DIM)))
    specs.append(TensorSpec("embed.dense.bias", "dense_bias", (EMBED_DIM,)))
    return tuple(specs)


_ARCH = arch_manifest()


def intermediate_shapes() -> list[tuple[str, tuple[int, ...]]]:
    """Shape chain of the forward pass, stem through the embedding."""

    def halve(h, w):
        return math.ceil(h / 2), math.ceil(w / 2)

    chain: list[tuple[str, tuple[int, ...]]] = []
    h, w = N_FRAMES, N_MELS
    h, w = halve(h, w)
    chain.append(("stem", (h, w, _STEM_CH)))
    for name, _, stride, _, _, out_ch in _MBCONV:
        if stride == 2:
            h, w = halve(h, w)
        chain.append((name, (h, w, out_ch)))
    for stage in (1, 2):
        chain.append((f"head.conv{stage}", (h, w, _HEAD_CH)))
        h, w = (h - 2) // 2 + 1, (w - 2) // 2 + 1
        chain.append((f"head.pool{stage}", (h, w, _HEAD_CH)))
    chain.append(("flatten", (h * w * _HEAD_CH,)))
    chain.append(("embedding", (EMBED_DIM,)))
    return chain


@dataclass(frozen=True)
class ModelWeights:
    """Validated, immutable tensor container for the fixed architecture."""

    tensors: dict[str, np.ndarray]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]


def _validate_tensors(tensors: dict[str, np.ndarray]) -> None:
    expected = {spec.name for spec in _ARCH}
    missing = expected - tensors.keys()
    extra = tensors.keys() - expected
    if missing or extra:
        raise ManifestMismatch(f"missing={sorted(missing)} extra={sorted(extra)}")
    for spec in _ARCH:
        tensor = tensors[spec.name]
        if tuple(tensor.shape) != spec.shape:
            raise ManifestMismatch(
                f"{spec.name}: shape {tuple(tensor.shape)} != expected {spec.shape}"
            )
        if not np.isfinite(tensor).all():
            raise NonFiniteTensor(spec.name)


def save_weights(weights: ModelWeights, path: str | Path) -> None:
    """Write the EWN1 container: magic | u32 manifest_len | JSON | payload."""
    _validate_tensors(weights.tensors)
    records = []
    payload = bytearray()
    for spec in _ARCH:
        blob = weights[spec.name].astype("<f4").tobytes()
        records.append(
            {
                "name": spec.name,
                "kind": spec.kind,
                "hyperparams": spec.hyperparams,
                "shape": list(spec.shape),
                "byte_offset": len(payload),
                "byte_len": len(blob),
            }
        )
        payload += blob
    manifest = json.dumps(records, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(MAGIC)
        handle.write(struct.pack("<I", len(manifest)))
        handle.write(manifest)
        handle.write(payload)


def load_weights(path: str | Path) -> ModelWeights:
    """Load and fully validate an EWN1 file; never yields a partial model."""
    data = Path(path).read_bytes()
    if len(data) < 8 or data[:4] != MAGIC:
        raise BadMagic(f"{path}: not an EWN1 file")
    (manifest_len,) = struct.unpack_from("<I", data, 4)
    manifest_end = 8 + manifest_len
    if manifest_end > len(data):
        raise BadMagic(f"{path}: truncated manifest")
    try:
        records = json.loads(data[8:manifest_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BadMagic(f"{path}: unreadable manifest: {exc}") from exc
    if not isinstance(records, list) or len(records) != len(_ARCH):
        raise ManifestMismatch(
            f"{path}: {len(records) if isinstance(records, list) else '?'} records, "
            f"expected {len(_ARCH)}"
        )

    payload = data[manifest_end:]
    tensors: dict[str, np.ndarray] = {}
    for record, spec in zip(records, _ARCH):
        name = record.get("name")
        if name != spec.name or record.get("kind") != spec.kind:
            raise ManifestMismatch(f"record {name!r} where {spec.name!r} expected")
        if tuple(record.get("shape", ())) != spec.shape:
            raise ManifestMismatch(
                f"{spec.name}: shape {record.get('shape')} != expected {list(spec.shape)}"
            )
        if record.get("hyperparams", {}) != spec.hyperparams:
            raise ManifestMismatch(f"{spec.name}: hyperparams drift")
        offset, length = record.get("byte_offset"), record.get("byte_len")
        count = int(np.prod(spec.shape))
        if length != count * 4 or offset < 0 or offset + length > len(payload):
            raise BadMagic(f"{path}: tensor {spec.name} outside payload")
        tensor = np.frombuffer(payload, dtype="<f4", count=count, offset=offset)
        tensors[name] = tensor.reshape(spec.shape)
    _validate_tensors(tensors)
    return ModelWeights(tensors)


def random_weights(seed: int = 0) -> ModelWeights:
    """Randomly initialized but valid weights (fixtures and untrained runs).

    He-normal conv kernels, Glorot dense kernels, identity batch norm.
    """
    rng = np.random.default_rng(seed)
    tensors: dict[str, np.ndarray] = {}
    for spec in _ARCH:
        if spec.kind == "conv_kernel":
            kh, kw, cin, _ = spec.shape
            std = math.sqrt(2.0 / (kh * kw * cin))
            tensor = rng.normal(0.0, std, spec.shape)
        elif spec.kind == "dw_kernel":
            kh, kw, _ = spec.shape
            std = math.sqrt(2.0 / (kh * kw))
            tensor = rng.normal(0.0, std, spec.shape)
        elif spec.kind == "dense_kernel":
            fan_in, fan_out = spec.shape
            limit = math.sqrt(6.0 / (fan_in + fan_out))
            tensor = rng.uniform(-limit, limit, spec.shape)
        elif spec.kind == "bn_gamma":
            tensor = np.ones(spec.shape)
        elif spec.kind == "bn_var":
            tensor = np.ones(spec.shape)
        else:  # bn_beta, bn_mean, dense_bias
            tensor = np.zeros(spec.shape)
        tensors[spec.name] = tensor.astype(np.float32)
    return ModelWeights(tensors)


def _batchnorm(x: np.ndarray, weights: ModelWeights, prefix: str) -> np.ndarray:
    return K.batchnorm_inf(
        x,
        weights[f"{prefix}.gamma"],
        weights[f"{prefix}.beta"],
        weights[f"{prefix}.mean"],
        weights[f"{prefix}.var"],
        eps=BN_EPS,
    )


def _mbconv(x: np.ndarray, weights: ModelWeights, name: str, kernel: int,
            stride: int, expand: int, in_ch: int, out_ch: int) -> np.ndarray:
    residual = x
    if expand != 1:
        x = K.conv2d(x, weights[f"{name}.expand.kernel"], 1, "same")
        x = K.swish(_batchnorm(x, weights, f"{name}.expand_bn"))
    x = K.depthwise_conv2d(x, weights[f"{name}.dw.kernel"], stride, "same")
    x = K.swish(_batchnorm(x, weights, f"{name}.dw_bn"))

    squeezed = K.global_avg_pool(x)
    squeezed = K.swish(
        K.dense(squeezed, weights[f"{name}.se.reduce.kernel"], weights[f"{name}.se.reduce.bias"])
    )
    gate = K.sigmoid(
        K.dense(squeezed, weights[f"{name}.se.expand.kernel"], weights[f"{name}.se.expand.bias"])
    )
    x = x * gate

    x = K.conv2d(x, weights[f"{name}.project.kernel"], 1, "same")
    x = _batchnorm(x, weights, f"{name}.project_bn")
    if stride == 1 and in_ch == out_ch:
        x = x + residual
    return x


def embed(spec: MelSpectrogram | np.ndarray, weights: ModelWeights) -> np.ndarray:
    """Forward pass: 98x64 log mel input -> unit-norm 256-d embedding."""
    values = spec.values if isinstance(spec, MelSpectrogram) else np.asarray(spec, np.float32)
    if values.shape != (N_FRAMES, N_MELS):
        raise ShapeError(f"expected {N_FRAMES}x{N_MELS} input, got {values.shape}")
    x = values.reshape(N_FRAMES, N_MELS, 1).astype(np.float32)

    x = K.conv2d(x, weights["stem.conv.kernel"], 2, "same")
    x = K.swish(_batchnorm(x, weights, "stem.bn"))
    for block in _MBCONV:
        x = _mbconv(x, weights, *block)
    for stage in (1, 2):
        x = K.conv2d(x, weights[f"head.conv{stage}.kernel"], 1, "same")
        x = _batchnorm(x, weights, f"head.bn{stage}")
        x = K.max_pool2d(x, 2, 2)
    flat = x.reshape(-1)
    vector = K.dense(flat, weights["embed.dense.kernel"], weights["embed.dense.bias"])
    return K.l2_normalize(vector)
