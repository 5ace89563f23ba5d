import numpy as np
import pytest

from hotword import AudioClip, random_weights

FIXTURE_SEED = 0


@pytest.fixture(scope="session")
def weights():
    return random_weights(FIXTURE_SEED)


def sine_clip(freq_hz: float, duration_s: float = 1.0, rate: int = 16000,
              amplitude: float = 0.5) -> AudioClip:
    t = np.arange(int(round(duration_s * rate))) / rate
    return AudioClip((amplitude * np.sin(2 * np.pi * freq_hz * t)).astype(np.float32), rate)


def noise_clip(seed: int, duration_s: float = 1.0, rate: int = 16000,
               amplitude: float = 0.3) -> AudioClip:
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * rate))
    return AudioClip(rng.uniform(-amplitude, amplitude, n).astype(np.float32), rate)
