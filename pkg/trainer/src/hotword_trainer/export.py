"""EWN1 weight export and cross-component parity fixtures.

The engine validates weight files against its fixed manifest (names, kinds,
shapes, hyperparameters, in order), so the record layout here must mirror
that table exactly. Tensors convert from torch layouts to the engine's:
conv (out,in,kh,kw) -> (kh,kw,in,out), depthwise (C,1,kh,kw) -> (kh,kw,C),
linear (out,in) -> (in,out).
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
import torch

from .model import MBCONV_TABLE, BaseNetwork, se_channels

MAGIC = b"EWN1"


def _conv_kernel(conv_module) -> np.ndarray:
    return conv_module.conv.weight.detach().numpy().transpose(2, 3, 1, 0).astype("<f4")


def _dw_kernel(conv_module) -> np.ndarray:
    return conv_module.conv.weight.detach().numpy()[:, 0].transpose(1, 2, 0).astype("<f4")


def _linear(linear_module) -> tuple[np.ndarray, np.ndarray]:
    weight = linear_module.weight.detach().numpy().T.astype("<f4")
    bias = linear_module.bias.detach().numpy().astype("<f4")
    return weight, bias


def _bn(bn_module) -> dict[str, np.ndarray]:
    return {
        "gamma": bn_module.weight.detach().numpy().astype("<f4"),
        "beta": bn_module.bias.detach().numpy().astype("<f4"),
        "mean": bn_module.running_mean.detach().numpy().astype("<f4"),
        "var": bn_module.running_var.detach().numpy().astype("<f4"),
    }


def _conv_record(name, tensor, stride):
    return (name, "conv_kernel", tensor, {"stride": stride, "padding": "same"})


def _dw_record(name, tensor, stride):
    return (name, "dw_kernel", tensor, {"stride": stride, "padding": "same"})


def _bn_records(prefix, bn_module):
    tensors = _bn(bn_module)
    return [
        (f"{prefix}.gamma", "bn_gamma", tensors["gamma"], {}),
        (f"{prefix}.beta", "bn_beta", tensors["beta"], {}),
        (f"{prefix}.mean", "bn_mean", tensors["mean"], {}),
        (f"{prefix}.var", "bn_var", tensors["var"], {}),
    ]


def collect_tensors(model: BaseNetwork) -> list[tuple[str, str, np.ndarray, dict]]:
    """(name, kind, tensor, hyperparams) in the engine's manifest order."""
    records = [_conv_record("stem.conv.kernel", _conv_kernel(model.stem_conv), 2)]
    records += _bn_records("stem.bn", model.stem_bn)

    for name, kernel, stride, expand, in_ch, out_ch in MBCONV_TABLE:
        block = model.blocks[name.replace(".", "_")]
        if expand != 1:
            records.append(_conv_record(f"{name}.expand.kernel", _conv_kernel(block.expand_conv), 1))
            records += _bn_records(f"{name}.expand_bn", block.expand_bn)
        records.append(_dw_record(f"{name}.dw.kernel", _dw_kernel(block.dw), stride))
        records += _bn_records(f"{name}.dw_bn", block.dw_bn)
        reduce_w, reduce_b = _linear(block.se.reduce)
        expand_w, expand_b = _linear(block.se.expand)
        assert reduce_w.shape == (in_ch * expand, se_channels(in_ch))
        records.append((f"{name}.se.reduce.kernel", "dense_kernel", reduce_w, {}))
        records.append((f"{name}.se.reduce.bias", "dense_bias", reduce_b, {}))
        records.append((f"{name}.se.expand.kernel", "dense_kernel", expand_w, {}))
        records.append((f"{name}.se.expand.bias", "dense_bias", expand_b, {}))
        records.append(_conv_record(f"{name}.project.kernel", _conv_kernel(block.project), 1))
        records += _bn_records(f"{name}.project_bn", block.project_bn)

    records.append(_conv_record("head.conv1.kernel", _conv_kernel(model.head_conv1), 1))
    records += _bn_records("head.bn1", model.head_bn1)
    records.append(_conv_record("head.conv2.kernel", _conv_kernel(model.head_conv2), 1))
    records += _bn_records("head.bn2", model.head_bn2)

    dense_w, dense_b = _linear(model.dense)
    records.append(("embed.dense.kernel", "dense_kernel", dense_w, {}))
    records.append(("embed.dense.bias", "dense_bias", dense_b, {}))
    return records


def export_weights(model: BaseNetwork, path: str | Path) -> Path:
    """Write the trained network as an EWN1 file the engine can load."""
    path = Path(path)
    manifest = []
    payload = bytearray()
    for name, kind, tensor, hyperparams in collect_tensors(model):
        if not np.isfinite(tensor).all():
            raise ValueError(f"tensor {name} is not finite; refusing to export")
        blob = np.ascontiguousarray(tensor).tobytes()
        manifest.append(
            {
                "name": name,
                "kind": kind,
                "hyperparams": hyperparams,
                "shape": list(tensor.shape),
                "byte_offset": len(payload),
                "byte_len": len(blob),
            }
        )
        payload += blob
    blob = json.dumps(manifest, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(MAGIC)
        handle.write(struct.pack("<I", len(blob)))
        handle.write(blob)
        handle.write(payload)
    return path


def export_parity_fixture(
    model: BaseNetwork, out_dir: str | Path, seed: int = 0
) -> tuple[Path, Path]:
    """Write (spec.f32, embedding.f32): a fixed input and this model's output.

    The engine loads spec.f32, runs its own forward pass under the exported
    weights, and must land within cosine 0.9999 of embedding.f32.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    spec = rng.normal(-5.0, 4.0, size=(98, 64)).astype(np.float32)

    model.eval()
    with torch.no_grad():
        embedding = model(torch.from_numpy(spec)[None])[0].numpy().astype("<f4")

    spec_path = out_dir / "spec.f32"
    embedding_path = out_dir / "embedding.f32"
    spec_path.write_bytes(spec.astype("<f4").tobytes())
    embedding_path.write_bytes(embedding.tobytes())
    return spec_path, embedding_path
