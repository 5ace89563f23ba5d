"""One-shot enrollment and similarity scoring.

A template stores one or more reference embeddings for a hotword. Matching
takes the minimum Euclidean distance over the references and maps it through
the score curve score(x) = 1 - x^4 / (tau^4 + x^4), which is 1 at distance 0
and exactly 0.5 at distance tau. A window is accepted when score >= cutoff;
with the default cutoff of 0.5 that is equivalent to distance <= tau.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import AudioClip, fit_window
from .errors import ParamError, TemplateError
from .features import log_mel
from .network import EMBED_DIM, ModelWeights, embed

DEFAULT_TAU = 0.2
DEFAULT_CUTOFF = 0.5
MAX_REFS = 32

_TEMPLATE_MAGIC = b"EWNT"
_TEMPLATE_VERSION = 1


@dataclass(frozen=True)
class HotwordTemplate:
    """Enrollment artifact: reference embeddings plus decision thresholds."""

    name: str
    refs: tuple[np.ndarray, ...]
    tau: float = DEFAULT_TAU
    cutoff: float = DEFAULT_CUTOFF

    def __post_init__(self):
        if not 1 <= len(self.refs) <= MAX_REFS:
            raise ValueError(f"need 1..{MAX_REFS} references, got {len(self.refs)}")
        refs = []
        for ref in self.refs:
            ref = np.asarray(ref, dtype=np.float32)
            if ref.shape != (EMBED_DIM,):
                raise ValueError(f"reference must be ({EMBED_DIM},), got {ref.shape}")
            if abs(float(np.linalg.norm(ref.astype(np.float64))) - 1.0) > 1e-4:
                raise ValueError("reference embedding is not unit-norm")
            refs.append(ref)
        if not 0.0 < self.tau <= 2.0:
            raise ValueError(f"tau must be in (0, 2], got {self.tau}")
        if not 0.0 < self.cutoff < 1.0:
            raise ValueError(f"cutoff must be in (0, 1), got {self.cutoff}")
        object.__setattr__(self, "refs", tuple(refs))


@dataclass(frozen=True)
class MatchResult:
    distance: float
    score: float
    accepted: bool


def euclidean(a: np.ndarray, b: np.ndarray) -> float:
    """L2 distance; in [0, 2] for unit vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return float(np.linalg.norm(a - b))


def similarity_score(distance: float, tau: float = DEFAULT_TAU) -> float:
    """Map a distance to (0, 1]: 1 at zero distance, exactly 0.5 at tau."""
    if distance < 0:
        raise ParamError(f"distance must be >= 0, got {distance}")
    if tau <= 0:
        raise ParamError(f"tau must be > 0, got {tau}")
    x4 = float(distance) ** 4
    t4 = float(tau) ** 4
    # algebraically 1 - x^4/(t^4 + x^4); this form avoids cancellation near 1
    return t4 / (t4 + x4)


def match(embedding: np.ndarray, template: HotwordTemplate) -> MatchResult:
    """Score an embedding against a template (min distance over references)."""
    distance = min(euclidean(embedding, ref) for ref in template.refs)
    score = similarity_score(distance, template.tau)
    return MatchResult(distance=distance, score=score, accepted=score >= template.cutoff)


def enroll(
    name: str,
    ref_clips: list[AudioClip],
    weights: ModelWeights,
    tau: float = DEFAULT_TAU,
    cutoff: float = DEFAULT_CUTOFF,
) -> HotwordTemplate:
    """Build a template from one or a few reference utterances."""
    if not ref_clips:
        raise ValueError("enroll needs at least one reference clip")
    refs = tuple(embed(log_mel(fit_window(clip)), weights) for clip in ref_clips)
    return HotwordTemplate(name=name, refs=refs, tau=tau, cutoff=cutoff)


def save_template(template: HotwordTemplate, path: str | Path) -> None:
    """Write the .ewnt container: magic | u32 version | u32 json_len | JSON | refs."""
    header = json.dumps(
        {
            "name": template.name,
            "tau": template.tau,
            "cutoff": template.cutoff,
            "ref_count": len(template.refs),
        },
        separators=(",", ":"),
    ).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(_TEMPLATE_MAGIC)
        handle.write(struct.pack("<I", _TEMPLATE_VERSION))
        handle.write(struct.pack("<I", len(header)))
        handle.write(header)
        for ref in template.refs:
            handle.write(ref.astype("<f4").tobytes())


def load_template(path: str | Path) -> HotwordTemplate:
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != _TEMPLATE_MAGIC:
        raise TemplateError(f"{path}: not a hotword template file")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != _TEMPLATE_VERSION:
        raise TemplateError(f"{path}: unsupported template version {version}")
    (header_len,) = struct.unpack_from("<I", data, 8)
    header_end = 12 + header_len
    if header_end > len(data):
        raise TemplateError(f"{path}: truncated header")
    try:
        header = json.loads(data[12:header_end].decode("utf-8"))
        name = header["name"]
        tau = float(header["tau"])
        cutoff = float(header["cutoff"])
        ref_count = int(header["ref_count"])
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise TemplateError(f"{path}: malformed header: {exc}") from exc
    payload = data[header_end:]
    if len(payload) != ref_count * EMBED_DIM * 4:
        raise TemplateError(
            f"{path}: payload is {len(payload)} bytes, expected {ref_count * EMBED_DIM * 4}"
        )
    refs = tuple(
        np.frombuffer(payload, dtype="<f4", count=EMBED_DIM, offset=i * EMBED_DIM * 4)
        for i in range(ref_count)
    )
    try:
        return HotwordTemplate(name=name, refs=refs, tau=tau, cutoff=cutoff)
    except ValueError as exc:
        raise TemplateError(f"{path}: {exc}") from exc
