"""Log mel spectrogram front end.

One second of 16 kHz audio becomes a 98x64 matrix: 25 ms Hann windows with
a 10 ms hop, 512-point FFT power, 64 triangular mel filters over 80-7600 Hz,
natural log with a 1e-10 floor. These values are shared with the trainer;
changing any of them breaks weight compatibility.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .audio import AudioClip
from .errors import ParamError, ShapeError

SAMPLE_RATE = 16000
WINDOW = 400
HOP = 160
N_FFT = 512
N_BINS = N_FFT // 2 + 1
N_MELS = 64
N_FRAMES = 98
F_MIN = 80.0
F_MAX = 7600.0
LOG_FLOOR = 1e-10


@dataclass(frozen=True)
class MelSpectrogram:
    """98x64 float32 matrix of log mel power, the network's input."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float32)
        if values.shape != (N_FRAMES, N_MELS):
            raise ShapeError(f"expected {N_FRAMES}x{N_MELS}, got {values.shape}")
        object.__setattr__(self, "values", values)

    def tobytes(self) -> bytes:
        """Raw little-endian float32, row-major."""
        return self.values.astype("<f4").tobytes()


@dataclass(frozen=True)
class MelFilterbank:
    """64x257 matrix mapping FFT power bins to mel bands, row peaks at 1.0."""

    weights: np.ndarray


def hz_to_mel(freq_hz):
    return 2595.0 * np.log10(1.0 + np.asarray(freq_hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def frame_count(n_samples: int, window: int = WINDOW, hop: int = HOP) -> int:
    return (n_samples - window) // hop + 1


def _hann_periodic(n: int) -> np.ndarray:
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def stft_power(clip: AudioClip) -> np.ndarray:
    """Power spectrogram of a 1 s clip: 98 frames x 257 bins, no pre-emphasis."""
    if clip.sample_rate != SAMPLE_RATE or len(clip.samples) != SAMPLE_RATE:
        raise ShapeError(
            f"expected {SAMPLE_RATE} samples @ {SAMPLE_RATE} Hz, "
            f"got {len(clip.samples)} @ {clip.sample_rate} Hz"
        )
    n_frames = frame_count(len(clip.samples))
    samples = clip.samples.astype(np.float64)
    offsets = np.arange(n_frames) * HOP
    frames = samples[offsets[:, None] + np.arange(WINDOW)[None, :]]
    spectrum = np.fft.rfft(frames * _hann_periodic(WINDOW), n=N_FFT, axis=1)
    power = (spectrum.real**2 + spectrum.imag**2).astype(np.float32)
    return power


@lru_cache(maxsize=4)
def build_filterbank(
    n_mels: int = N_MELS,
    n_fft: int = N_FFT,
    rate: int = SAMPLE_RATE,
    f_min: float = F_MIN,
    f_max: float = F_MAX,
) -> MelFilterbank:
    """Triangular filters with peaks equally spaced on the mel scale.

    Each row is rescaled so its maximum over the FFT bin grid is exactly 1.0.
    """
    if not (0.0 <= f_min < f_max <= rate / 2):
        raise ParamError(f"need 0 <= f_min < f_max <= rate/2, got {f_min}, {f_max}")
    edges_hz = mel_to_hz(np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), n_mels + 2))
    bins_hz = np.arange(n_fft // 2 + 1, dtype=np.float64) * rate / n_fft
    weights = np.zeros((n_mels, n_fft // 2 + 1), dtype=np.float64)
    for band in range(n_mels):
        lower, center, upper = edges_hz[band : band + 3]
        rising = (bins_hz - lower) / (center - lower)
        falling = (upper - bins_hz) / (upper - center)
        weights[band] = np.maximum(0.0, np.minimum(rising, falling))
    weights /= weights.max(axis=1, keepdims=True)
    return MelFilterbank(weights.astype(np.float32))


def log_mel(clip: AudioClip) -> MelSpectrogram:
    """98x64 log mel spectrogram; no per-clip mean/variance normalization."""
    power = stft_power(clip)
    filterbank = build_filterbank()
    mel_power = power.astype(np.float64) @ filterbank.weights.astype(np.float64).T
    values = np.log(np.maximum(mel_power, LOG_FLOOR))
    return MelSpectrogram(values.astype(np.float32))


def dump_f32(spec: MelSpectrogram, path: str | Path) -> None:
    """Write the spectrogram as raw LE float32, row-major, for fixture exchange."""
    Path(path).write_bytes(spec.tobytes())


def load_f32(path: str | Path) -> MelSpectrogram:
    data = np.frombuffer(Path(path).read_bytes(), dtype="<f4")
    if data.size != N_FRAMES * N_MELS:
        raise ShapeError(f"expected {N_FRAMES * N_MELS} floats, got {data.size}")
    return MelSpectrogram(data.reshape(N_FRAMES, N_MELS))
