"""FRR/FAR benchmark harness.

FRR: play positive clips (each holding one utterance of the hotword) and
report rejected/total, where a clip counts as accepted if any of its windows
scores at or above the cutoff. FAR: play a long hotword-free background
recording and report accepted events per hour of audio. The sweep evaluates
a grid of cutoffs from one pass of window scores, so rows are mutually
consistent and the CSV is reproducible byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .audio import AudioClip, fit_window, read_wav
from .errors import EmptyCorpus, ParamError
from .features import log_mel
from .matching import HotwordTemplate, match
from .network import ModelWeights, embed
from .stream import StreamConfig, file_windows

DEFAULT_CUTOFFS = tuple(round(0.05 * k, 2) for k in range(1, 20))  # 0.05 .. 0.95

CSV_HEADER = "cutoff,frr,far_per_hour,n_positives,background_hours"


@dataclass(frozen=True)
class BenchRow:
    cutoff: float
    frr: float
    far_per_hour: float
    n_positives: int
    background_hours: float


@dataclass(frozen=True)
class BenchReport:
    rows: tuple[BenchRow, ...]

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for row in self.rows:
            lines.append(
                f"{row.cutoff:.2f},{row.frr:.6f},{row.far_per_hour:.6f},"
                f"{row.n_positives},{row.background_hours:.6f}"
            )
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")


def window_scores(
    clip: AudioClip,
    template: HotwordTemplate,
    weights: ModelWeights,
    cfg: StreamConfig | None = None,
) -> list[tuple[float, float]]:
    """(t_start, score) for every full window of a clip; short clips get one."""
    cfg = cfg or StreamConfig()
    if len(clip.samples) < cfg.window_samples:
        clip = fit_window(clip, cfg.window_s)
    scores = []
    for t_start, window in file_windows(clip, cfg):
        embedding = embed(log_mel(window), weights)
        scores.append((t_start, match(embedding, template).score))
    return scores


def _positive_clips(positives: str | Path) -> list[Path]:
    paths = sorted(Path(positives).glob("*.wav"))
    if not paths:
        raise EmptyCorpus(f"no positive clips under {positives}")
    return paths


def _max_scores(positives, template, weights, cfg) -> list[float]:
    return [
        max(score for _, score in window_scores(read_wav(path), template, weights, cfg))
        for path in _positive_clips(positives)
    ]


def _count_accepts(
    scored: list[tuple[float, float]], cutoff: float, refractory_s: float | None
) -> int:
    """Accepted windows above cutoff, optionally debounced by refractory_s."""
    count = 0
    last = None
    for t_start, score in scored:
        if score < cutoff:
            continue
        if refractory_s is not None and last is not None and t_start - last < refractory_s:
            continue
        last = t_start
        count += 1
    return count


def measure_frr(
    positives: str | Path,
    template: HotwordTemplate,
    weights: ModelWeights,
    cutoff: float,
    cfg: StreamConfig | None = None,
) -> float:
    """Rejected positives / total positives at the given score cutoff."""
    max_scores = _max_scores(positives, template, weights, cfg)
    rejected = sum(1 for best in max_scores if best < cutoff)
    return rejected / len(max_scores)


def measure_far(
    background: AudioClip,
    template: HotwordTemplate,
    weights: ModelWeights,
    cutoff: float,
    cfg: StreamConfig | None = None,
    debounce: bool = True,
) -> float:
    """Accepted events per hour over hotword-free background audio."""
    cfg = cfg or StreamConfig()
    duration_s = background.duration_s
    if duration_s < 60.0:
        raise ParamError(f"background must be >= 60 s, got {duration_s:.1f} s")
    scored = window_scores(background, template, weights, cfg)
    accepts = _count_accepts(scored, cutoff, cfg.refractory_s if debounce else None)
    return accepts / (duration_s / 3600.0)


def sweep(
    positives: str | Path,
    background: AudioClip,
    template: HotwordTemplate,
    weights: ModelWeights,
    cutoffs: tuple[float, ...] = DEFAULT_CUTOFFS,
    cfg: StreamConfig | None = None,
    debounce: bool = True,
) -> BenchReport:
    """One FRR/FAR row per cutoff, all from a single scoring pass."""
    cfg = cfg or StreamConfig()
    duration_s = background.duration_s
    if duration_s < 60.0:
        raise ParamError(f"background must be >= 60 s, got {duration_s:.1f} s")
    positive_best = _max_scores(positives, template, weights, cfg)
    background_scored = window_scores(background, template, weights, cfg)
    hours = duration_s / 3600.0

    rows = []
    for cutoff in cutoffs:
        rejected = sum(1 for best in positive_best if best < cutoff)
        accepts = _count_accepts(
            background_scored, cutoff, cfg.refractory_s if debounce else None
        )
        rows.append(
            BenchRow(
                cutoff=cutoff,
                frr=rejected / len(positive_best),
                far_per_hour=accepts / hours,
                n_positives=len(positive_best),
                background_hours=hours,
            )
        )
    return BenchReport(rows=tuple(rows))
