"""Pair construction from a dataset manifest.

True pairs come from two variants of the same word, false pairs from two
different words, sampled to balance the classes. Pairs are shuffled with a
seeded PRNG and split 80/20 by pair.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from pathlib import Path
from random import Random

import numpy as np

from .features import spectrogram_for_file


@dataclass(frozen=True)
class Pair:
    index_a: int
    index_b: int
    label: int  # 1 same word, 0 different words


@dataclass(frozen=True)
class PairSet:
    spectrograms: np.ndarray  # (n_clips, 98, 64) float32
    words: tuple[str, ...]  # word of each clip
    train: tuple[Pair, ...]
    test: tuple[Pair, ...]

    def batches(self, pairs, batch_size: int):
        for start in range(0, len(pairs), batch_size):
            chunk = pairs[start : start + batch_size]
            a = self.spectrograms[[p.index_a for p in chunk]]
            b = self.spectrograms[[p.index_b for p in chunk]]
            labels = np.array([p.label for p in chunk], dtype=np.float32)
            yield a, b, labels


def read_manifest(path: str | Path) -> list[tuple[str, Path]]:
    """(word, clip path) rows; relative paths resolve against the manifest."""
    path = Path(path)
    rows = []
    with open(path, newline="") as handle:
        for row in csv.DictReader(handle):
            clip = Path(row["path"])
            if not clip.is_absolute():
                clip = path.parent / clip
            rows.append((row["word"], clip))
    if not rows:
        raise ValueError(f"{path}: empty manifest")
    return rows


def build_pairs(manifest: str | Path, seed: int, train_fraction: float = 0.8) -> PairSet:
    rows = read_manifest(manifest)
    spectrograms = np.stack([spectrogram_for_file(clip) for _, clip in rows])
    words = tuple(word for word, _ in rows)

    by_word: dict[str, list[int]] = {}
    for index, word in enumerate(words):
        by_word.setdefault(word, []).append(index)

    true_pairs = [
        Pair(a, b, 1)
        for indices in by_word.values()
        for a, b in itertools.combinations(indices, 2)
    ]
    if not true_pairs:
        raise ValueError("need at least one word with two variants")
    word_names = sorted(by_word)
    if len(word_names) < 2:
        raise ValueError("need at least two distinct words for false pairs")

    rng = Random(seed)
    false_pairs: set[tuple[int, int]] = set()
    attempts = 0
    while len(false_pairs) < len(true_pairs) and attempts < 200 * len(true_pairs):
        attempts += 1
        word_a, word_b = rng.sample(word_names, 2)
        pair = (rng.choice(by_word[word_a]), rng.choice(by_word[word_b]))
        false_pairs.add((min(pair), max(pair)))
    if abs(len(false_pairs) - len(true_pairs)) > 0.05 * len(true_pairs):
        raise ValueError(
            f"could not balance classes: {len(true_pairs)} true vs {len(false_pairs)} false"
        )
    pairs = true_pairs + [Pair(a, b, 0) for a, b in sorted(false_pairs)]
    rng.shuffle(pairs)

    split = int(round(train_fraction * len(pairs)))
    return PairSet(
        spectrograms=spectrograms,
        words=words,
        train=tuple(pairs[:split]),
        test=tuple(pairs[split:]),
    )
