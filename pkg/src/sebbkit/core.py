"""Domain types shared by every other module.

All containers are frozen dataclasses. Arrays held by a :class:`ScoreTrack`
are copied on construction and marked read-only, so instances can be shared
between threads without defensive copies.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

GAMMA_MODES = ("absolute", "relative")


class TrackValidationError(ValueError):
    """Raised by :func:`validate_track`; ``problems`` lists every violation."""

    def __init__(self, clip_id: str, problems: Sequence[str]):
        self.clip_id = clip_id
        self.problems = list(problems)
        super().__init__(f"{clip_id}: " + "; ".join(self.problems))


class UnknownClassError(KeyError):
    pass


def _frozen_array(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScoreTrack:
    """Frame-level confidences of one clip.

    ``scores[n, c]`` is the confidence of class ``class_labels[c]`` over the
    half-open frame ``[boundaries[n], boundaries[n + 1])``. Construction only
    normalizes types; use :func:`validate_track` to check the invariants.
    """

    clip_id: str
    class_labels: tuple[str, ...]
    boundaries: np.ndarray
    scores: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "class_labels", tuple(self.class_labels))
        object.__setattr__(self, "boundaries", _frozen_array(self.boundaries, 1))
        scores = np.array(self.scores, dtype=float)
        if scores.ndim == 1:
            scores = scores[:, None]
        object.__setattr__(self, "scores", _frozen_array(scores, 2))

    def __eq__(self, other):
        if not isinstance(other, ScoreTrack):
            return NotImplemented
        return (
            self.clip_id == other.clip_id
            and self.class_labels == other.class_labels
            and np.array_equal(self.boundaries, other.boundaries)
            and np.array_equal(self.scores, other.scores)
        )

    __hash__ = None

    @property
    def n_frames(self) -> int:
        return self.scores.shape[0]

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.boundaries)

    @property
    def start(self) -> float:
        return float(self.boundaries[0])

    @property
    def end(self) -> float:
        return float(self.boundaries[-1])

    def class_index(self, label: str) -> int:
        try:
            return self.class_labels.index(label)
        except ValueError:
            raise UnknownClassError(f"{self.clip_id}: unknown class label {label!r}") from None

    def column(self, label: str) -> np.ndarray:
        """Scores of one class as a read-only 1-d view."""
        return self.scores[:, self.class_index(label)]

    def replace_column(self, label: str, values) -> "ScoreTrack":
        scores = np.array(self.scores)
        scores[:, self.class_index(label)] = values
        return dataclasses.replace(self, scores=scores)


def validate_track(track: ScoreTrack) -> ScoreTrack:
    """Return ``track`` unchanged if it is well formed, else raise.

    All violated invariants are collected into a single
    :class:`TrackValidationError` rather than failing on the first one.
    """
    problems = []
    b, y = track.boundaries, track.scores
    if len(track.class_labels) < 1:
        problems.append("no class labels")
    if len(set(track.class_labels)) != len(track.class_labels):
        problems.append("duplicate class labels")
    if y.shape[0] < 1:
        problems.append("no frames")
    if y.shape[0] != len(b) - 1:
        problems.append(f"shape mismatch: {y.shape[0]} score rows for {len(b)} boundaries")
    if y.shape[1] != len(track.class_labels):
        problems.append(
            f"shape mismatch: {y.shape[1]} score columns for {len(track.class_labels)} classes"
        )
    if len(b) and not np.all(np.isfinite(b)):
        problems.append("non-finite boundaries")
    elif len(b) > 1 and np.any(np.diff(b) <= 0):
        problems.append("non-increasing boundaries")
    if len(b) and b[0] < 0:
        problems.append("negative start time")
    if y.size and (not np.all(np.isfinite(y)) or y.min() < 0 or y.max() > 1):
        problems.append("score out of range [0, 1]")
    if problems:
        raise TrackValidationError(track.clip_id, problems)
    return track


@dataclass(frozen=True)
class Event:
    class_label: str
    onset: float
    offset: float

    def __post_init__(self):
        if not self.onset < self.offset:
            raise ValueError(f"event onset {self.onset} must precede offset {self.offset}")

    @property
    def duration(self) -> float:
        return self.offset - self.onset


@dataclass(frozen=True)
class SEBB:
    """Sound event bounding box: an extent with one overall confidence."""

    class_label: str
    onset: float
    offset: float
    confidence: float

    def __post_init__(self):
        if not self.onset < self.offset:
            raise ValueError(f"SEBB onset {self.onset} must precede offset {self.offset}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"SEBB confidence {self.confidence} outside [0, 1]")

    @property
    def duration(self) -> float:
        return self.offset - self.onset

    def as_event(self) -> Event:
        return Event(self.class_label, self.onset, self.offset)


@dataclass(frozen=True)
class GroundTruth:
    """Reference events per clip plus the true duration of every clip.

    ``durations`` may list clips without events; they still count towards the
    total audio duration used for false-positive rates.
    """

    durations: Mapping[str, float]
    events: Mapping[str, tuple[Event, ...]] = field(default_factory=dict)
    n_repaired: int = 0

    def __post_init__(self):
        durations = {k: float(v) for k, v in self.durations.items()}
        events = {k: tuple(v) for k, v in self.events.items()}
        for clip, dur in durations.items():
            if not dur > 0:
                raise ValueError(f"{clip}: clip duration must be positive, got {dur}")
        for clip, evs in events.items():
            if clip not in durations:
                raise ValueError(f"{clip}: events given for a clip without duration")
            for ev in evs:
                if ev.onset < 0 or ev.offset > durations[clip]:
                    raise ValueError(f"{clip}: event {ev} outside [0, {durations[clip]}]")
        for clip in durations:
            events.setdefault(clip, ())
        object.__setattr__(self, "durations", durations)
        object.__setattr__(self, "events", events)

    @property
    def clip_ids(self) -> list[str]:
        return sorted(self.durations)

    @property
    def total_duration(self) -> float:
        return float(sum(self.durations.values()))

    @property
    def class_labels(self) -> list[str]:
        return sorted({ev.class_label for evs in self.events.values() for ev in evs})

    def events_of(self, clip_id: str, label: str) -> list[Event]:
        return [ev for ev in self.events[clip_id] if ev.class_label == label]

    def n_events(self, label: str) -> int:
        return sum(ev.class_label == label for evs in self.events.values() for ev in evs)

    def subset(self, clip_ids) -> "GroundTruth":
        ids = set(clip_ids)
        return GroundTruth(
            {k: v for k, v in self.durations.items() if k in ids},
            {k: v for k, v in self.events.items() if k in ids},
        )


@dataclass(frozen=True)
class EvalConfig:
    """Constants of the intersection-based and collar-based metrics.

    Defaults give the PSDS1 scenario (0.7 / 0.7 intersection, unit
    standard-deviation penalty, 100 FP per hour bound) and the 200 ms /
    20 % collars.
    """

    rho_dtc: float = 0.7
    rho_gtc: float = 0.7
    alpha_st: float = 1.0
    e_max: float = 100.0
    onset_collar: float = 0.2
    offset_collar_floor: float = 0.2
    offset_collar_frac: float = 0.2
    population_std: bool = True

    def __post_init__(self):
        for name in ("rho_dtc", "rho_gtc"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ValueError(f"{name} must be in (0, 1], got {value}")
        if self.alpha_st < 0:
            raise ValueError("alpha_st must be non-negative")
        if not self.e_max > 0:
            raise ValueError("e_max must be positive")
        for name in ("onset_collar", "offset_collar_floor", "offset_collar_frac"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class ClassParams:
    """Post-processing and decision parameters of a single class."""

    medfilt_len: float = 0.0
    lambda_ext: float = 0.5
    tau: float = 0.48
    gamma: float = 3.0
    gamma_mode: str = "relative"
    lambda_hyb: float = 0.5
    lambda_nopsds: float = 0.0
    lambda_f: float = 0.5

    def __post_init__(self):
        if self.medfilt_len < 0:
            raise ValueError("medfilt_len must be non-negative")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.gamma_mode not in GAMMA_MODES:
            raise ValueError(f"gamma_mode must be one of {GAMMA_MODES}")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.gamma_mode == "relative" and not self.gamma > 1:
            raise ValueError("relative gamma must exceed 1")
        for name in ("lambda_ext", "lambda_hyb", "lambda_nopsds", "lambda_f"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValueError(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class HyperParams:
    """Per-class :class:`ClassParams`; classes not listed use ``default``."""

    classes: Mapping[str, ClassParams] = field(default_factory=dict)
    default: ClassParams = field(default_factory=ClassParams)

    def __post_init__(self):
        object.__setattr__(self, "classes", dict(sorted(self.classes.items())))

    def for_class(self, label: str) -> ClassParams:
        return self.classes.get(label, self.default)

    def with_class(self, label: str, params: ClassParams) -> "HyperParams":
        classes = dict(self.classes)
        classes[label] = params
        return HyperParams(classes, self.default)

