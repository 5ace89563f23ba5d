"""Audio ingestion and dataset synthesis.

Clips are mono float32 in [-1, 1]. The engine standardizes on 16 kHz;
decoding keeps the file's native rate and callers resample explicitly.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path
from random import Random

import numpy as np

from .errors import DecodeError, EmptyCorpus, RateMismatch, UnsupportedFormat

TARGET_RATE = 16000

_WAVE_FORMAT_PCM = 1
_WAVE_FORMAT_IEEE_FLOAT = 3
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE


@dataclass(frozen=True)
class AudioClip:
    """Mono audio: float32 samples in [-1, 1] plus the sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float32)
        if samples.ndim != 1:
            raise ValueError("AudioClip is mono: samples must be 1-D")
        if not np.isfinite(samples).all():
            raise ValueError("AudioClip samples must be finite")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


def decode_wav(data: bytes) -> AudioClip:
    """Decode a RIFF/WAVE byte string (PCM-16 or float-32, 1-2 channels).

    Stereo is downmixed by per-sample average; PCM-16 is scaled by 1/32768.
    """
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise DecodeError("not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (chunk_len,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + chunk_len]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise DecodeError("fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < chunk_len:
                raise DecodeError("data chunk truncated")
            payload = body
        pos += 8 + chunk_len + (chunk_len & 1)  # chunks are word-aligned

    if fmt is None or payload is None:
        raise DecodeError("missing fmt or data chunk")

    audio_format, channels, sample_rate, _, _, bits = fmt
    if audio_format == _WAVE_FORMAT_EXTENSIBLE:
        raise UnsupportedFormat("WAVE_FORMAT_EXTENSIBLE not supported")
    if channels not in (1, 2):
        raise UnsupportedFormat(f"{channels} channels (mono/stereo only)")

    if audio_format == _WAVE_FORMAT_PCM and bits == 16:
        raw = np.frombuffer(payload[: len(payload) - len(payload) % 2], dtype="<i2")
        samples = raw.astype(np.float32) / 32768.0
    elif audio_format == _WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        raw = np.frombuffer(payload[: len(payload) - len(payload) % 4], dtype="<f4")
        samples = raw.astype(np.float32)
    else:
        raise UnsupportedFormat(f"format tag {audio_format} / {bits}-bit")

    if channels == 2:
        samples = samples[: len(samples) - len(samples) % 2]
        samples = samples.reshape(-1, 2).mean(axis=1).astype(np.float32)
    return AudioClip(samples, sample_rate)


def encode_wav(clip: AudioClip, float32: bool = False) -> bytes:
    """Serialize a clip as mono PCM-16 (default) or float-32 WAV bytes."""
    if float32:
        payload = clip.samples.astype("<f4").tobytes()
        audio_format, bits = _WAVE_FORMAT_IEEE_FLOAT, 32
    else:
        quantized = np.clip(np.rint(clip.samples * 32768.0), -32768, 32767)
        payload = quantized.astype("<i2").tobytes()
        audio_format, bits = _WAVE_FORMAT_PCM, 16
    block_align = bits // 8
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        audio_format,
        1,
        clip.sample_rate,
        clip.sample_rate * block_align,
        block_align,
        bits,
        b"data",
        len(payload),
    )
    return header + payload


def read_wav(path: str | Path) -> AudioClip:
    return decode_wav(Path(path).read_bytes())


def write_wav(path: str | Path, clip: AudioClip, float32: bool = False) -> None:
    Path(path).write_bytes(encode_wav(clip, float32=float32))


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Linear-interpolation resample; identity when rates already match."""
    if target_rate <= 0:
        raise ValueError("target_rate must be positive")
    if target_rate == clip.sample_rate:
        return clip
    n_in = len(clip.samples)
    n_out = int(round(n_in * target_rate / clip.sample_rate))
    if n_in == 0 or n_out == 0:
        return AudioClip(np.zeros(n_out, dtype=np.float32), target_rate)
    positions = np.arange(n_out, dtype=np.float64) * (clip.sample_rate / target_rate)
    samples = np.interp(positions, np.arange(n_in, dtype=np.float64), clip.samples)
    return AudioClip(samples.astype(np.float32), target_rate)


def mix_noise(clean: AudioClip, noise: AudioClip, noise_factor: float) -> AudioClip:
    """Blend (1-a)*clean + a*noise, looping/truncating noise to clean length.

    Peak-normalized only if the mix exceeds full scale.
    """
    if clean.sample_rate != noise.sample_rate:
        raise RateMismatch(f"{clean.sample_rate} Hz vs {noise.sample_rate} Hz")
    if not 0.0 <= noise_factor <= 1.0:
        raise ValueError("noise_factor must be in [0, 1]")
    n = len(clean.samples)
    bed = noise.samples
    if len(bed) == 0:
        bed = np.zeros(n, dtype=np.float32)
    elif len(bed) < n:
        bed = np.tile(bed, -(-n // len(bed)))
    bed = bed[:n]
    mixed = (1.0 - noise_factor) * clean.samples + noise_factor * bed
    peak = float(np.max(np.abs(mixed))) if n else 0.0
    if peak > 1.0:
        mixed = mixed / peak
    return AudioClip(mixed.astype(np.float32), clean.sample_rate)


def fit_window(clip: AudioClip, length_s: float = 1.0) -> AudioClip:
    """Force a clip to exactly length_s: symmetric zero-pad or center-crop."""
    if len(clip.samples) == 0:
        raise ValueError("clip is empty")
    target = int(round(length_s * clip.sample_rate))
    n = len(clip.samples)
    if n == target:
        return clip
    if n < target:
        pad_left = (target - n) // 2
        pad_right = target - n - pad_left
        samples = np.pad(clip.samples, (pad_left, pad_right))
    else:
        start = (n - target) // 2
        samples = clip.samples[start : start + target]
    return AudioClip(samples.astype(np.float32), clip.sample_rate)


def _wav_paths(directory: Path) -> list[Path]:
    return sorted(p for p in directory.iterdir() if p.suffix.lower() == ".wav")


def _word_recordings(words_dir: Path) -> dict[str, list[Path]]:
    """Map word -> clean recordings: subdirectory per word, or loose wav per word."""
    words: dict[str, list[Path]] = {}
    for entry in sorted(words_dir.iterdir()):
        if entry.is_dir():
            recordings = _wav_paths(entry)
            if recordings:
                words[entry.name] = recordings
        elif entry.suffix.lower() == ".wav":
            words.setdefault(entry.stem, []).append(entry)
    return words


def synth_dataset(
    words_dir: str | Path,
    noises_dir: str | Path,
    out_dir: str | Path,
    per_word: int = 5,
    alpha_range: tuple[float, float] = (0.05, 0.2),
    seed: int = 0,
) -> Path:
    """Generate per_word noisy variants of each word recording at 16 kHz.

    Every variant picks a recording, a noise clip and a noise factor from a
    seeded PRNG, so reruns with the same seed are byte-identical. Returns the
    path of the manifest CSV (columns: word,path,noise_path,alpha).
    """
    words_dir, noises_dir, out_dir = Path(words_dir), Path(noises_dir), Path(out_dir)
    words = _word_recordings(words_dir)
    noises = _wav_paths(noises_dir)
    if not words:
        raise EmptyCorpus(f"no word recordings under {words_dir}")
    if not noises:
        raise EmptyCorpus(f"no noise clips under {noises_dir}")

    rng = Random(seed)
    lo, hi = alpha_range
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for word in sorted(words):
        word_out = out_dir / word
        word_out.mkdir(exist_ok=True)
        for variant in range(per_word):
            recording = rng.choice(words[word])
            noise_path = rng.choice(noises)
            alpha = rng.uniform(lo, hi)
            clean = resample(read_wav(recording), TARGET_RATE)
            noise = resample(read_wav(noise_path), TARGET_RATE)
            mixed = mix_noise(clean, noise, alpha)
            variant_path = word_out / f"{word}_{variant:02d}.wav"
            write_wav(variant_path, mixed)
            rows.append((word, variant_path.relative_to(out_dir).as_posix(), str(noise_path), repr(alpha)))

    manifest_path = out_dir / "manifest.csv"
    with open(manifest_path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["word", "path", "noise_path", "alpha"])
        writer.writerows(rows)
    return manifest_path
