import math

import numpy as np
import pytest

from hotword import (
    AudioClip,
    ParamError,
    ShapeError,
    build_filterbank,
    hz_to_mel,
    log_mel,
    stft_power,
)
from hotword.features import (
    HOP,
    LOG_FLOOR,
    MelSpectrogram,
    N_FRAMES,
    N_MELS,
    WINDOW,
    dump_f32,
    frame_count,
    load_f32,
    mel_to_hz,
)

from conftest import noise_clip, sine_clip


class TestStftPower:
    def test_zero_input_all_zero(self):
        power = stft_power(AudioClip(np.zeros(16000, dtype=np.float32), 16000))
        assert power.shape == (98, 257)
        assert np.all(power == 0)

    def test_frame_count_formula(self):
        # independent recomputation of floor((N - W) / H) + 1
        for n in (16000, 16160, 24000, 400, 401, 560):
            assert frame_count(n) == math.floor((n - WINDOW) / HOP) + 1
        assert frame_count(16000) == N_FRAMES

    def test_sine_lands_in_expected_bin(self):
        power = stft_power(sine_clip(1000, amplitude=1.0))
        expected_bin = round(1000 * 512 / 16000)
        assert expected_bin == 32
        assert np.all(power.argmax(axis=1) == expected_bin)

    def test_wrong_length_rejected(self):
        with pytest.raises(ShapeError):
            stft_power(AudioClip(np.zeros(15999, dtype=np.float32), 16000))
        with pytest.raises(ShapeError):
            stft_power(AudioClip(np.zeros(16000, dtype=np.float32), 8000))

    def test_deterministic(self):
        clip = noise_clip(5)
        np.testing.assert_array_equal(stft_power(clip), stft_power(clip))


class TestFilterbank:
    def test_mel_formula(self):
        assert hz_to_mel(700.0) == pytest.approx(2595 * math.log10(2), abs=1e-9)
        assert hz_to_mel(0.0) == 0.0
        assert mel_to_hz(hz_to_mel(1234.5)) == pytest.approx(1234.5, abs=1e-6)

    def test_row_peaks_exactly_one(self):
        fb = build_filterbank()
        assert fb.weights.shape == (64, 257)
        np.testing.assert_array_equal(fb.weights.max(axis=1), np.ones(64, dtype=np.float32))

    def test_rows_nonnegative_contiguous_overlapping(self):
        fb = build_filterbank()
        assert np.all(fb.weights >= 0)
        for band in range(64):
            nonzero = np.flatnonzero(fb.weights[band])
            assert nonzero.size > 0
            assert np.all(np.diff(nonzero) == 1)
        for band in range(63):
            shared = (fb.weights[band] > 0) & (fb.weights[band + 1] > 0)
            assert shared.any()

    def test_param_validation(self):
        with pytest.raises(ParamError):
            build_filterbank(f_min=4000.0, f_max=100.0)
        with pytest.raises(ParamError):
            build_filterbank(f_max=9000.0)  # above Nyquist


class TestLogMel:
    def test_zero_audio_floors(self):
        spec = log_mel(AudioClip(np.zeros(16000, dtype=np.float32), 16000))
        np.testing.assert_allclose(spec.values, math.log(LOG_FLOOR), atol=1e-9)

    def test_output_shape(self):
        spec = log_mel(noise_clip(0))
        assert spec.values.shape == (N_FRAMES, N_MELS)
        assert spec.values.dtype == np.float32

    def test_amplitude_doubling_adds_ln4(self):
        clip = sine_clip(1000, amplitude=0.25)
        louder = AudioClip(clip.samples * 2, 16000)
        quiet, loud = log_mel(clip).values, log_mel(louder).values
        active = quiet > math.log(LOG_FLOOR) + 1.0  # skip floored cells
        assert active.any()
        np.testing.assert_allclose(
            loud[active] - quiet[active], math.log(4.0), atol=1e-4
        )

    def test_monotone_in_amplitude(self):
        clip = noise_clip(6, amplitude=0.2)
        louder = AudioClip(clip.samples * 1.5, 16000)
        assert np.all(log_mel(louder).values >= log_mel(clip).values - 1e-6)

    def test_pure_tone_peaks_at_nearest_band(self):
        fb = build_filterbank()
        centers = mel_to_hz(np.linspace(hz_to_mel(80.0), hz_to_mel(7600.0), 66))[1:-1]
        for freq in (300.0, 1000.0, 3000.0):
            spec = log_mel(sine_clip(freq, amplitude=0.9))
            band_energy = spec.values.mean(axis=0)
            assert band_energy.argmax() == int(np.abs(centers - freq).argmin())

    def test_values_finite_and_floored(self):
        spec = log_mel(noise_clip(8))
        assert np.isfinite(spec.values).all()
        assert np.all(spec.values >= math.log(LOG_FLOOR) - 1e-6)

    def test_f32_dump_roundtrip(self, tmp_path):
        spec = log_mel(noise_clip(3))
        dump_f32(spec, tmp_path / "spec.f32")
        loaded = load_f32(tmp_path / "spec.f32")
        np.testing.assert_array_equal(loaded.values, spec.values)
        assert (tmp_path / "spec.f32").stat().st_size == 98 * 64 * 4

    def test_bad_shape_rejected(self):
        with pytest.raises(ShapeError):
            MelSpectrogram(np.zeros((97, 64), dtype=np.float32))
