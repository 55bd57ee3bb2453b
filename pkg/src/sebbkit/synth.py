"""Seeded synthetic corpora of frame-level scores with planted events.

Each planted event is rendered as a trapezoid: a plateau at the event height
with linear ramps of ``ramp_width`` seconds at either end. ``ramp_anchor``
places the ramps relative to the true boundary: 0.5 centres them on it
(score crosses half height at the boundary), 1.0 puts them entirely outside
the event (full height throughout the event). Uniform noise is added and the
result clamped to ``[0, 1]``.

Randomness comes from ``numpy.random.default_rng`` (PCG64). Clip ``i`` of a
corpus draws from ``default_rng([seed, i])``, so a clip does not depend on
how many clips precede it and clips can be generated in any order.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sebbkit.core import Event, GroundTruth, ScoreTrack


@dataclass(frozen=True)
class SynthSpec:
    n_clips: int = 10
    clip_duration: float = 10.0
    frame_width: float = 0.04
    classes: tuple[str, ...] = ("class_a",)
    # expected planted events per clip and class (Poisson)
    event_rate: float = 1.0
    min_event_length: float = 0.5
    max_event_length: float = 3.0
    heights: tuple[float, ...] = (0.9, 0.4)
    ramp_width: float = 0.2
    ramp_anchor: float = 0.5
    noise: float = 0.0
    # expected unlabelled bumps per clip and class, rendered like events
    distractor_rate: float = 0.0
    seed: int = 0
    max_retries: int = 100

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "heights", tuple(float(h) for h in self.heights))
        if self.n_clips < 1:
            raise ValueError("n_clips must be positive")
        if not (self.frame_width > 0 and self.clip_duration > 0):
            raise ValueError("clip duration and frame width must be positive")
        ratio = self.clip_duration / self.frame_width
        if abs(ratio - round(ratio)) > 1e-6:
            raise ValueError("frame_width must divide clip_duration")
        if not self.classes or len(set(self.classes)) != len(self.classes):
            raise ValueError("classes must be non-empty and unique")
        if not 0 < self.min_event_length <= self.max_event_length <= self.clip_duration:
            raise ValueError("event lengths must satisfy 0 < min <= max <= clip_duration")
        if not self.heights or any(not 0 <= h <= 1 for h in self.heights):
            raise ValueError("heights must lie in [0, 1]")
        if self.ramp_width < 0 or not 0 <= self.ramp_anchor <= 1:
            raise ValueError("ramp_width must be non-negative and ramp_anchor in [0, 1]")
        if not 0 <= self.noise <= 1:
            raise ValueError("noise amplitude must lie in [0, 1]")
        if self.event_rate < 0 or self.distractor_rate < 0:
            raise ValueError("rates must be non-negative")

    @property
    def n_frames(self) -> int:
        return int(round(self.clip_duration / self.frame_width))

    @property
    def boundaries(self) -> np.ndarray:
        return np.arange(self.n_frames + 1) * self.frame_width

    def clip_id(self, index: int) -> str:
        return f"synth_{index:04d}"


def trapezoid(
    t: np.ndarray, onset: float, offset: float, height: float, ramp: float, anchor: float
) -> np.ndarray:
    """Trapezoid evaluated at times ``t``; a (near) zero ramp gives a rectangle on [onset, offset)."""
    t = np.asarray(t, dtype=float)
    if ramp < 1e-12:
        return np.where((t >= onset) & (t < offset), height, 0.0)
    rise = (t - (onset - anchor * ramp)) / ramp
    fall = ((offset + anchor * ramp) - t) / ramp
    return height * np.clip(np.minimum(rise, fall), 0.0, 1.0)


def _support(spec: SynthSpec, onset: float, offset: float) -> tuple[float, float]:
    """Interval where a plant's trapezoid is non-zero."""
    reach = spec.ramp_anchor * spec.ramp_width
    return onset - reach, offset + reach


def _try_layout(rng, spec: SynthSpec, count: int) -> list[tuple[float, float]] | None:
    """Frame-aligned intervals with pairwise disjoint supports, or None if one did not fit."""
    w, n = spec.frame_width, spec.n_frames
    out, taken = [], []
    for _ in range(count):
        for _attempt in range(spec.max_retries):
            length = rng.uniform(spec.min_event_length, spec.max_event_length)
            n_len = min(max(int(round(length / w)), 1), n)
            start = int(rng.integers(0, n - n_len + 1))
            on, off = start * w, (start + n_len) * w
            lo, hi = _support(spec, on, off)
            if all(hi <= a or lo >= b for a, b in taken):
                taken.append((lo, hi))
                out.append((round(on, 9), round(off, 9)))
                break
        else:
            return None
    return out


def _draw_layout(rng, spec: SynthSpec, count: int) -> list[tuple[float, float]]:
    """Re-draw the whole layout of a class until its plants do not overlap."""
    for _ in range(spec.max_retries):
        layout = _try_layout(rng, spec, count)
        if layout is not None:
            return layout
    raise RuntimeError(f"could not place {count} non-overlapping events in {spec.max_retries} attempts")


def generate_clip(spec: SynthSpec, index: int) -> tuple[ScoreTrack, list[Event]]:
    rng = np.random.default_rng([spec.seed, index])
    b = spec.boundaries
    centres = (b[:-1] + b[1:]) / 2
    scores = np.zeros((spec.n_frames, len(spec.classes)))
    events = []
    for c, label in enumerate(spec.classes):
        n_plants = int(rng.poisson(spec.event_rate))
        n_bumps = int(rng.poisson(spec.distractor_rate))
        layout = _draw_layout(rng, spec, n_plants + n_bumps)
        for k, (on, off) in enumerate(layout):
            height = spec.heights[int(rng.integers(len(spec.heights)))]
            shape = trapezoid(centres, on, off, height, spec.ramp_width, spec.ramp_anchor)
            scores[:, c] = np.maximum(scores[:, c], shape)
            if k < n_plants:
                events.append(Event(label, on, off))
        if spec.noise > 0:
            scores[:, c] += rng.uniform(-spec.noise, spec.noise, spec.n_frames)
    np.clip(scores, 0.0, 1.0, out=scores)
    track = ScoreTrack(spec.clip_id(index), spec.classes, b, scores)
    return track, sorted(events, key=lambda e: (e.onset, e.class_label))


def generate(spec: SynthSpec) -> tuple[dict[str, ScoreTrack], GroundTruth]:
    """Score tracks and planted ground truth of every clip; deterministic in ``spec``."""
    tracks, events = {}, {}
    for i in range(spec.n_clips):
        track, evs = generate_clip(spec, i)
        tracks[track.clip_id] = track
        events[track.clip_id] = evs
    durations = {clip: spec.n_frames * spec.frame_width for clip in tracks}
    return tracks, GroundTruth(durations, events)


def two_peak_scenario(
    frame_width: float = 0.04,
    ramp_width: float = 0.48,
    length: float = 1.2,
    heights: tuple[float, float] = (0.9, 0.4),
) -> tuple[ScoreTrack, GroundTruth]:
    """One clip with a tall and a short event of equal length, without noise.

    Ramps lie outside the events, so any frame threshold low enough to detect
    the short event stretches the tall one well beyond its true extent.
    """
    duration = 8.0
    plants = [(2.0, 2.0 + length), (5.0, 5.0 + length)]
    b = np.arange(int(round(duration / frame_width)) + 1) * frame_width
    centres = (b[:-1] + b[1:]) / 2
    scores = np.zeros(len(centres))
    for (on, off), h in zip(plants, heights):
        scores = np.maximum(scores, trapezoid(centres, on, off, h, ramp_width, 1.0))
    track = ScoreTrack("two_peak", ("event",), b, scores)
    gt = GroundTruth({"two_peak": duration}, {"two_peak": [Event("event", a, z) for a, z in plants]})
    return track, gt


ACCEPTANCE_SEED = 20240917


def acceptance_spec(seed: int = ACCEPTANCE_SEED) -> SynthSpec:
    """The fixed 200-clip, 3-class corpus used by the ranking checks."""
    return SynthSpec(
        n_clips=200,
        clip_duration=10.0,
        frame_width=0.04,
        classes=("alarm", "dog", "speech"),
        event_rate=1.0,
        min_event_length=0.5,
        max_event_length=2.5,
        heights=(0.9, 0.6, 0.4),
        ramp_width=0.48,
        ramp_anchor=1.0,
        noise=0.15,
        distractor_rate=0.4,
        seed=seed,
    )


def write_corpus(tracks, gt: GroundTruth, directory) -> None:
    """Write ``scores/``, ``ground_truth.tsv`` and ``durations.tsv`` under ``directory``."""
    from sebbkit import dataio

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    dataio.write_scores(tracks, directory / "scores")
    dataio.write_ground_truth(gt, directory / "ground_truth.tsv")
    dataio.write_durations(gt, directory / "durations.tsv")
