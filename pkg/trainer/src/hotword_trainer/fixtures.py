"""Desk-scale synthetic corpus: tone-chord words with noise-mixed variants.

Stands in for the paper-scale TTS word pool so the pipeline can be exercised
end to end in minutes. Each word is a distinct two-tone chord; variants mix
in seeded noise at a factor drawn from [0.05, 0.2].
"""

from __future__ import annotations

import csv
from pathlib import Path
from random import Random

import numpy as np

from .features import SAMPLE_RATE, write_wav_mono


def _tone_word(word_index: int, rng: np.random.Generator) -> np.ndarray:
    duration = 0.7
    t = np.arange(int(duration * SAMPLE_RATE)) / SAMPLE_RATE
    base = 260.0 + 140.0 * word_index
    chord = 0.4 * np.sin(2 * np.pi * base * t) + 0.25 * np.sin(2 * np.pi * base * 2.3 * t)
    envelope = np.minimum(1.0, np.minimum(t / 0.05, (duration - t) / 0.05))
    jitter = 1.0 + 0.05 * rng.standard_normal()
    return (chord * envelope * jitter).astype(np.float32)


def make_tone_corpus(
    out_dir: str | Path,
    n_words: int = 10,
    variants: int = 5,
    seed: int = 0,
) -> Path:
    """Write wav variants plus a manifest CSV; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    choice = Random(seed)

    noise_dir = out_dir / "noise"
    noise_dir.mkdir(exist_ok=True)
    noise_paths = []
    for i in range(3):
        bed = rng.uniform(-0.5, 0.5, SAMPLE_RATE).astype(np.float32)
        path = noise_dir / f"noise_{i}.wav"
        write_wav_mono(path, bed)
        noise_paths.append(path)

    rows = []
    for word_index in range(n_words):
        word = f"word{word_index:02d}"
        word_dir = out_dir / word
        word_dir.mkdir(exist_ok=True)
        for variant in range(variants):
            clean = _tone_word(word_index, rng)
            noise_path = choice.choice(noise_paths)
            alpha = choice.uniform(0.05, 0.2)
            bed = np.frombuffer(Path(noise_path).read_bytes()[44:], dtype="<i2")
            bed = bed.astype(np.float32) / 32768.0
            bed = np.tile(bed, -(-len(clean) // len(bed)))[: len(clean)]
            mixed = (1.0 - alpha) * clean + alpha * bed
            peak = float(np.max(np.abs(mixed)))
            if peak > 1.0:
                mixed = mixed / peak
            variant_path = word_dir / f"{word}_{variant:02d}.wav"
            write_wav_mono(variant_path, mixed)
            rows.append(
                (word, variant_path.relative_to(out_dir).as_posix(), str(noise_path), repr(alpha))
            )

    manifest = out_dir / "manifest.csv"
    with open(manifest, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["word", "path", "noise_path", "alpha"])
        writer.writerows(rows)
    return manifest
