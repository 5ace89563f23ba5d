"""Streaming detection loop.

Slides a 1 s window with a 0.25 s hop over incoming audio, embeds each
window, matches it against every enrolled template, and emits debounced
detection events. Window k covers [k*hop, k*hop + 1.0) seconds. The same
loop runs over files (deterministic) and live capture; pending windows sit
in a bounded ring that drops the oldest entry on overflow.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .audio import AudioClip
from .features import SAMPLE_RATE, log_mel
from .matching import HotwordTemplate, match
from .network import ModelWeights, embed


@dataclass(frozen=True)
class StreamConfig:
    window_s: float = 1.0
    hop_s: float = 0.25
    refractory_s: float = 1.0
    queue_capacity: int = 8

    def __post_init__(self):
        if self.hop_s > self.window_s:
            raise ValueError("hop_s must be <= window_s")
        if self.refractory_s < self.hop_s:
            raise ValueError("refractory_s must be >= hop_s")
        if self.queue_capacity < 1:
            raise ValueError("queue_capacity must be >= 1")

    @property
    def window_samples(self) -> int:
        return int(round(self.window_s * SAMPLE_RATE))

    @property
    def hop_samples(self) -> int:
        return int(round(self.hop_s * SAMPLE_RATE))


@dataclass(frozen=True)
class DetectionEvent:
    hotword: str
    t_start: float
    score: float
    distance: float

    def as_line(self) -> str:
        return f"{self.t_start}\t{self.hotword}\t{self.score}\t{self.distance}"


class WindowRing:
    """Bounded thread-safe FIFO; overflow drops the oldest item and counts it."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.dropped = 0
        self._items: deque = deque()
        self._lock = threading.Lock()

    def __len__(self) -> int:
        with self._lock:
            return len(self._items)

    def push(self, item) -> None:
        with self._lock:
            if len(self._items) >= self.capacity:
                self._items.popleft()
                self.dropped += 1
            self._items.append(item)

    def pop(self):
        with self._lock:
            return self._items.popleft() if self._items else None


@dataclass
class DetectorState:
    """Mutable per-stream state: templates, weights, debounce bookkeeping."""

    templates: list[HotwordTemplate]
    weights: ModelWeights
    cfg: StreamConfig = field(default_factory=StreamConfig)
    next_t: float = 0.0
    last_event_t: dict[str, float] = field(default_factory=dict)


def step(window: AudioClip, state: DetectorState) -> list[DetectionEvent]:
    """Process one 1 s window synchronously; advances stream time by one hop."""
    t_start = state.next_t
    state.next_t = t_start + state.cfg.hop_s
    embedding = embed(log_mel(window), state.weights)
    events = []
    for template in state.templates:
        result = match(embedding, template)
        if not result.accepted:
            continue
        last = state.last_event_t.get(template.name)
        if last is not None and t_start - last < state.cfg.refractory_s:
            continue
        state.last_event_t[template.name] = t_start
        events.append(
            DetectionEvent(
                hotword=template.name,
                t_start=t_start,
                score=result.score,
                distance=result.distance,
            )
        )
    return events


def run_stream(
    source: Iterable[np.ndarray],
    templates: list[HotwordTemplate],
    weights: ModelWeights,
    cfg: StreamConfig | None = None,
) -> Iterator[DetectionEvent]:
    """Detect hotwords over a pull-based 16 kHz mono sample source.

    Yields events as windows complete. A failing source propagates its error
    only after events from already-processed windows have been yielded.
    """
    cfg = cfg or StreamConfig()
    state = DetectorState(templates=list(templates), weights=weights, cfg=cfg)
    ring = WindowRing(cfg.queue_capacity)
    buffer = np.zeros(0, dtype=np.float32)
    consumed = 0  # absolute stream position of buffer[0]
    next_window = 0

    def process_one():
        item = ring.pop()
        if item is None:
            return []
        t_start, window = item
        state.next_t = t_start
        return step(AudioClip(window, SAMPLE_RATE), state)

    for chunk in source:
        chunk = np.asarray(chunk, dtype=np.float32).reshape(-1)
        buffer = np.concatenate([buffer, chunk])
        while consumed + len(buffer) >= next_window * cfg.hop_samples + cfg.window_samples:
            local = next_window * cfg.hop_samples - consumed
            ring.push((next_window * cfg.hop_s, buffer[local : local + cfg.window_samples].copy()))
            next_window += 1
            if len(ring) >= ring.capacity:  # keep the pull-based path lossless
                yield from process_one()
        keep_from = min(next_window * cfg.hop_samples - consumed, len(buffer))
        if keep_from > 0:
            buffer = buffer[keep_from:]
            consumed += keep_from
        while len(ring):
            yield from process_one()


def file_windows(
    clip: AudioClip, cfg: StreamConfig | None = None
) -> Iterator[tuple[float, AudioClip]]:
    """(t_start, window) pairs over a whole decoded clip, stream-identical."""
    cfg = cfg or StreamConfig()
    if clip.sample_rate != SAMPLE_RATE:
        raise ValueError(f"expected {SAMPLE_RATE} Hz input, got {clip.sample_rate}")
    k = 0
    while k * cfg.hop_samples + cfg.window_samples <= len(clip.samples):
        start = k * cfg.hop_samples
        yield k * cfg.hop_s, AudioClip(
            clip.samples[start : start + cfg.window_samples], SAMPLE_RATE
        )
        k += 1
