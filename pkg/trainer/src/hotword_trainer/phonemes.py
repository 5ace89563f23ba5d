"""Word-pool preparation: drop words whose phoneme sequences are too alike.

Similarity between two sequences is LCS length over the longer length; a
pair at or above the threshold keeps only the earlier word.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

SIMILARITY_THRESHOLD = 0.8


@dataclass(frozen=True)
class WordPool:
    words: tuple[tuple[str, tuple[str, ...]], ...]
    dropped: tuple[str, ...] = ()

    def names(self) -> list[str]:
        return [word for word, _ in self.words]


def parse_lexicon(path: str | Path) -> list[tuple[str, tuple[str, ...]]]:
    """Lines of `word  PH1 PH2 ...`; blank lines and # comments ignored."""
    entries = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        entries.append((parts[0], tuple(parts[1:])))
    return entries


def lcs_length(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for item_a in a:
        current = [0]
        for j, item_b in enumerate(b):
            current.append(
                previous[j] + 1 if item_a == item_b else max(previous[j + 1], current[j])
            )
        previous = current
    return previous[-1]


def phoneme_similarity(a: tuple[str, ...], b: tuple[str, ...]) -> float:
    if not a and not b:
        return 1.0
    longest = max(len(a), len(b))
    return lcs_length(a, b) / longest if longest else 0.0


def filter_word_pool(
    entries: list[tuple[str, tuple[str, ...]]],
    threshold: float = SIMILARITY_THRESHOLD,
) -> WordPool:
    """Keep words in order, dropping the later one of any too-similar pair."""
    kept: list[tuple[str, tuple[str, ...]]] = []
    dropped: list[str] = []
    for word, phonemes in entries:
        if any(phoneme_similarity(phonemes, other) >= threshold for _, other in kept):
            dropped.append(word)
        else:
            kept.append((word, phonemes))
    return WordPool(words=tuple(kept), dropped=tuple(dropped))
