"""Log mel front end for training data.

Mirrors the engine's fixed feature parameters (25 ms / 10 ms / 512-point FFT,
64 mel bands over 80-7600 Hz, natural log floored at 1e-10). The two sides
must agree on these numbers or exported weights are useless.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

SAMPLE_RATE = 16000
WINDOW = 400
HOP = 160
N_FFT = 512
N_MELS = 64
N_FRAMES = 98
F_MIN = 80.0
F_MAX = 7600.0
LOG_FLOOR = 1e-10

_filterbank_cache: np.ndarray | None = None


def read_wav_mono(path: str | Path) -> np.ndarray:
    """Minimal PCM-16 / float-32 RIFF reader; returns float32 at 16 kHz."""
    data = Path(path).read_bytes()
    if data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise ValueError(f"{path}: not a WAV file")
    fmt = payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (chunk_len,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + chunk_len]
        if chunk_id == b"fmt ":
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            payload = body
        pos += 8 + chunk_len + (chunk_len & 1)
    if fmt is None or payload is None:
        raise ValueError(f"{path}: missing fmt/data chunk")
    audio_format, channels, rate, _, _, bits = fmt
    if audio_format == 1 and bits == 16:
        samples = np.frombuffer(payload, dtype="<i2").astype(np.float32) / 32768.0
    elif audio_format == 3 and bits == 32:
        samples = np.frombuffer(payload, dtype="<f4").astype(np.float32)
    else:
        raise ValueError(f"{path}: unsupported format {audio_format}/{bits}")
    if channels == 2:
        samples = samples.reshape(-1, 2).mean(axis=1).astype(np.float32)
    elif channels != 1:
        raise ValueError(f"{path}: {channels} channels")
    if rate != SAMPLE_RATE:
        n_out = int(round(len(samples) * SAMPLE_RATE / rate))
        positions = np.arange(n_out) * (rate / SAMPLE_RATE)
        samples = np.interp(positions, np.arange(len(samples)), samples).astype(np.float32)
    return samples


def write_wav_mono(path: str | Path, samples: np.ndarray, rate: int = SAMPLE_RATE) -> None:
    quantized = np.clip(np.rint(samples * 32768.0), -32768, 32767).astype("<i2")
    payload = quantized.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, 1, 1, rate, rate * 2, 2, 16,
        b"data", len(payload),
    )
    Path(path).write_bytes(header + payload)


def fit_one_second(samples: np.ndarray) -> np.ndarray:
    """Symmetric zero-pad or center-crop to exactly one second."""
    n = len(samples)
    if n == SAMPLE_RATE:
        return samples
    if n < SAMPLE_RATE:
        pad_left = (SAMPLE_RATE - n) // 2
        return np.pad(samples, (pad_left, SAMPLE_RATE - n - pad_left))
    start = (n - SAMPLE_RATE) // 2
    return samples[start : start + SAMPLE_RATE]


def _mel_filterbank() -> np.ndarray:
    global _filterbank_cache
    if _filterbank_cache is not None:
        return _filterbank_cache
    mel = lambda f: 2595.0 * np.log10(1.0 + f / 700.0)
    mel_inv = lambda m: 700.0 * (10.0 ** (m / 2595.0) - 1.0)
    edges = mel_inv(np.linspace(mel(F_MIN), mel(F_MAX), N_MELS + 2))
    bins_hz = np.arange(N_FFT // 2 + 1) * SAMPLE_RATE / N_FFT
    weights = np.zeros((N_MELS, N_FFT // 2 + 1))
    for band in range(N_MELS):
        lower, center, upper = edges[band : band + 3]
        rising = (bins_hz - lower) / (center - lower)
        falling = (upper - bins_hz) / (upper - center)
        weights[band] = np.maximum(0.0, np.minimum(rising, falling))
    weights /= weights.max(axis=1, keepdims=True)
    _filterbank_cache = weights
    return weights


def log_mel(samples: np.ndarray) -> np.ndarray:
    """98x64 float32 log mel matrix from exactly one second of audio."""
    if len(samples) != SAMPLE_RATE:
        raise ValueError(f"expected {SAMPLE_RATE} samples, got {len(samples)}")
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(WINDOW) / WINDOW)
    offsets = np.arange(N_FRAMES) * HOP
    frames = samples.astype(np.float64)[offsets[:, None] + np.arange(WINDOW)[None, :]]
    spectrum = np.fft.rfft(frames * window, n=N_FFT, axis=1)
    power = spectrum.real**2 + spectrum.imag**2
    mel_power = power @ _mel_filterbank().T
    return np.log(np.maximum(mel_power, LOG_FLOOR)).astype(np.float32)


def spectrogram_for_file(path: str | Path) -> np.ndarray:
    return log_mel(fit_one_second(read_wav_mono(path)))
