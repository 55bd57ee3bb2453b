"""Conversion of frame-level scores into events and bounding boxes.

Three families live here:

* legacy event prediction: optional median filtering, frame thresholding and
  merging of consecutive positive frames (:func:`frame_threshold_merge`);
* threshold-based boxes (:func:`tsebb`), which reuse the legacy extents but
  attach an average confidence to each one;
* change-detection boxes (:func:`csebb`), whose extents come from extrema of a
  step-filter response, and the hybrid of both (:func:`hsebb`).

Every threshold comparison is strict (``score > threshold``).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from sebbkit.core import SEBB, ClassParams, Event, HyperParams, ScoreTrack

# deltas are rounded to this many decimals so that flat regions stay flat
# despite accumulated floating point error in the running integral
DELTA_DECIMALS = 12

SEBB_METHODS = ("tsebb", "csebb", "hsebb")
LEGACY_METHODS = ("legacy", "medfilt")
METHODS = LEGACY_METHODS + SEBB_METHODS


def _sort_key(box):
    return (box.onset, box.offset, box.class_label)


def _threshold_for(lam, label: str) -> float:
    if isinstance(lam, Mapping):
        return float(lam[label])
    return float(lam)


def window_size(length: float, boundaries: np.ndarray) -> int:
    """Odd median-filter window (in frames) closest to ``length`` seconds."""
    if length <= 0:
        return 1
    width = float(np.median(np.diff(boundaries)))
    k = int(np.floor(length / width + 0.5))
    if k % 2 == 0:
        k += 1
    return max(k, 1)


def median_filter_values(values: np.ndarray, k: int) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if k <= 1:
        return values.copy()
    pad = (k - 1) // 2
    padded = np.pad(values, pad, mode="edge")
    windows = np.lib.stride_tricks.sliding_window_view(padded, k)
    return np.median(windows, axis=1)


def median_filter(track: ScoreTrack, label: str, length: float) -> np.ndarray:
    """Median-filter one class column with a window of ``length`` seconds.

    The window is converted to an odd number of frames using the median frame
    width; both ends are padded by repeating the edge value.
    """
    if length < 0:
        raise ValueError("median filter length must be non-negative")
    values = track.column(label)
    if length == 0:
        return values.copy()
    return median_filter_values(values, window_size(length, track.boundaries))


def positive_runs(values: np.ndarray, lam: float) -> list[tuple[int, int]]:
    """Maximal runs of ``values > lam`` as ``(first, last + 1)`` frame indices."""
    z = np.concatenate(([0], (np.asarray(values) > lam).astype(np.int8), [0]))
    change = np.diff(z)
    starts = np.flatnonzero(change == 1)
    stops = np.flatnonzero(change == -1)
    return list(zip(starts.tolist(), stops.tolist()))


def frame_threshold_merge(
    track: ScoreTrack, label: str, lam: float, values: np.ndarray | None = None
) -> list[Event]:
    """Legacy event prediction for one class.

    ``values`` overrides the class column (e.g. with median-filtered scores).
    """
    if values is None:
        values = track.column(label)
    else:
        track.class_index(label)
    b = track.boundaries
    return [Event(label, float(b[i]), float(b[j])) for i, j in positive_runs(values, lam)]


def weighted_mean(boundaries: np.ndarray, values: np.ndarray, i: int, j: int) -> float:
    """Duration-weighted mean of ``values[i:j]`` (the exact time average)."""
    w = np.diff(boundaries[i : j + 1])
    mean = float(np.dot(w, values[i:j]) / w.sum())
    return min(max(mean, 0.0), 1.0)


def tsebb_class(track: ScoreTrack, label: str, medfilt_len: float, lambda_ext: float) -> list[SEBB]:
    return tsebb_from_values(track, label, median_filter(track, label, medfilt_len), lambda_ext)


def tsebb_from_values(
    track: ScoreTrack, label: str, filtered: np.ndarray, lambda_ext: float
) -> list[SEBB]:
    """tSEBBs of one class from already filtered scores."""
    b = track.boundaries
    return [
        SEBB(label, float(b[i]), float(b[j]), weighted_mean(b, filtered, i, j))
        for i, j in positive_runs(filtered, lambda_ext)
    ]


def tsebb(track: ScoreTrack, params: HyperParams) -> list[SEBB]:
    """Threshold-based boxes.

    Extents are legacy detections at ``lambda_ext`` on the median-filtered
    scores; the confidence of each box is the mean filtered score over it.
    """
    out = []
    for label in track.class_labels:
        p = params.for_class(label)
        out.extend(tsebb_class(track, label, p.medfilt_len, p.lambda_ext))
    return sorted(out, key=_sort_key)


@dataclass(frozen=True, eq=False)
class DeltaTrack:
    """Step-filter response sampled at every frame boundary."""

    clip_id: str
    class_label: str
    times: np.ndarray
    deltas: np.ndarray

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.deltas.tolist()))


EDGE_MODES = ("replicate", "zero")


def _running_integral(
    boundaries: np.ndarray, values: np.ndarray, t: np.ndarray, edge: str
) -> np.ndarray:
    """Integral of the extended piecewise-constant signal from ``boundaries[0]`` to ``t``.

    Outside the clip the signal repeats the edge frames (``replicate``) or is
    zero (``zero``).
    """
    cum = np.concatenate(([0.0], np.cumsum(np.diff(boundaries) * values)))
    out = np.interp(t, boundaries, cum)
    if edge == "replicate":
        before = t < boundaries[0]
        after = t > boundaries[-1]
        out[before] = values[0] * (t[before] - boundaries[0])
        out[after] = cum[-1] + values[-1] * (t[after] - boundaries[-1])
    elif edge != "zero":
        raise ValueError(f"edge must be one of {EDGE_MODES}, got {edge!r}")
    return out


def delta_values(
    boundaries: np.ndarray, values: np.ndarray, tau: float, edge: str = "replicate"
) -> np.ndarray:
    if not tau > 0:
        raise ValueError("tau must be positive")
    half = tau / 2
    t = np.asarray(boundaries, dtype=float)
    values = np.asarray(values, dtype=float)
    here = _running_integral(t, values, t, edge)
    ahead = _running_integral(t, values, t + half, edge)
    behind = _running_integral(t, values, t - half, edge)
    delta = ((ahead - here) - (here - behind)) / half
    return np.round(delta, DELTA_DECIMALS) + 0.0


def delta_scores(
    track: ScoreTrack, label: str, tau: float, edge: str = "replicate"
) -> DeltaTrack:
    """Mean score over the next ``tau/2`` seconds minus the mean over the previous ``tau/2``.

    Scores are treated as constant within each frame. By default the signal is
    extended past both clip ends by repeating the edge frames, so every window
    is full; ``edge="zero"`` treats the outside of the clip as silence instead.
    """
    deltas = delta_values(track.boundaries, track.column(label), tau, edge)
    return DeltaTrack(track.clip_id, label, np.array(track.boundaries), deltas)


@dataclass(frozen=True)
class TentativeSegmentation:
    """Alternating onset/offset times; ``onsets[i] < offsets[i] < onsets[i + 1]``."""

    onsets: tuple[float, ...]
    offsets: tuple[float, ...]
    implicit_onset: bool = False
    implicit_offset: bool = False

    def __post_init__(self):
        if len(self.onsets) != len(self.offsets):
            raise ValueError("onsets and offsets must pair up")
        seq = [t for pair in zip(self.onsets, self.offsets) for t in pair]
        if any(a >= b for a, b in zip(seq, seq[1:])):
            raise ValueError("tentative onsets and offsets must strictly alternate")

    @property
    def events(self) -> list[tuple[float, float]]:
        return list(zip(self.onsets, self.offsets))


def extract_segmentation(deltas: DeltaTrack) -> TentativeSegmentation:
    """Tentative onsets at local maxima of the deltas, offsets at local minima.

    Plateaus count as a single sample located at their first point; the clip
    ends themselves are never extrema. When the first extremum is an offset an
    onset is inserted at the clip start, and when the last one is an onset an
    offset is appended at the clip end.
    """
    t, v = deltas.times, deltas.deltas
    if len(v) == 0:
        raise ValueError("empty delta track")
    keep = np.flatnonzero(np.concatenate(([True], v[1:] != v[:-1])))
    r = v[keep]
    onsets: list[float] = []
    offsets: list[float] = []
    marks: list[tuple[float, bool]] = []
    if len(r) >= 3:
        mid = r[1:-1]
        is_max = (mid > r[:-2]) & (mid > r[2:])
        is_min = (mid < r[:-2]) & (mid < r[2:])
        for pos in np.flatnonzero(is_max | is_min):
            marks.append((float(t[keep[pos + 1]]), bool(is_max[pos])))
    implicit_onset = not marks or not marks[0][1]
    implicit_offset = not marks or marks[-1][1]
    if implicit_onset:
        marks.insert(0, (float(t[0]), True))
    if implicit_offset:
        marks.append((float(t[-1]), False))
    for time, is_onset in marks:
        (onsets if is_onset else offsets).append(time)
    return TentativeSegmentation(tuple(onsets), tuple(offsets), implicit_onset, implicit_offset)


def _boundary_index(boundaries: np.ndarray, time: float) -> int:
    i = int(np.searchsorted(boundaries, time))
    if i < len(boundaries) and abs(boundaries[i] - time) <= 1e-9:
        return i
    if i > 0 and abs(boundaries[i - 1] - time) <= 1e-9:
        return i - 1
    raise ValueError(f"time {time} is not a frame boundary")


def _should_merge(p: float, q: float, m: float, gamma: float, mode: str) -> bool:
    if mode == "absolute":
        return p - m < gamma and q - m < gamma
    if mode == "relative":
        return p < gamma * m and q < gamma * m
    raise ValueError(f"unknown gamma mode {mode!r}")


def merge_index_segments(
    values: np.ndarray, segments: list[list[int]], gamma: float, mode: str
) -> list[list[int]]:
    """Merge ``[start, stop)`` frame-index segments across weak gaps (see :func:`merge_gaps`)."""
    segs = [list(s) for s in segments]
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(segs) - 1:
            left, right = segs[i], segs[i + 1]
            p = values[left[0] : left[1]].max()
            q = values[right[0] : right[1]].max()
            m = values[left[1] : right[0]].min()
            if _should_merge(p, q, m, gamma, mode):
                segs[i] = [left[0], right[1]]
                del segs[i + 1]
                changed = True
            else:
                i += 1
    return segs


def merge_gaps(
    track: ScoreTrack, label: str, seg: TentativeSegmentation, gamma: float, mode: str
) -> TentativeSegmentation:
    """Drop tentative gaps that are only small dips between two events.

    A gap is removed when, with ``m`` its lowest score and ``p``/``q`` the
    highest scores of the tentative events on either side, both ``p`` and
    ``q`` stay below ``m + gamma`` (absolute mode) or ``gamma * m`` (relative
    mode). Gaps are scanned left to right, re-reading the neighbours after
    each merge, until a full pass merges nothing.
    """
    if mode == "relative" and not gamma > 1:
        raise ValueError("relative gamma must exceed 1")
    if mode == "absolute" and not gamma > 0:
        raise ValueError("absolute gamma must be positive")
    b = track.boundaries
    segments = [[_boundary_index(b, on), _boundary_index(b, off)] for on, off in seg.events]
    merged = merge_index_segments(track.column(label), segments, gamma, mode)
    return TentativeSegmentation(
        tuple(float(b[i]) for i, _ in merged),
        tuple(float(b[j]) for _, j in merged),
        seg.implicit_onset and merged[0][0] == 0,
        seg.implicit_offset and merged[-1][1] == len(b) - 1,
    )


def csebb_class(
    track: ScoreTrack, label: str, tau: float, gamma: float, mode: str, edge: str = "replicate"
) -> list[SEBB]:
    seg = extract_segmentation(delta_scores(track, label, tau, edge))
    seg = merge_gaps(track, label, seg, gamma, mode)
    b, values = track.boundaries, track.column(label)
    out = []
    for on, off in seg.events:
        i, j = _boundary_index(b, on), _boundary_index(b, off)
        out.append(SEBB(label, on, off, weighted_mean(b, values, i, j)))
    return out


def csebb(track: ScoreTrack, params: HyperParams) -> list[SEBB]:
    """Change-detection boxes for every class of ``track``.

    No box is discarded here, however low its confidence; selection is left to
    event-level thresholding.
    """
    out = []
    for label in track.class_labels:
        p = params.for_class(label)
        out.extend(csebb_class(track, label, p.tau, p.gamma, p.gamma_mode))
    return sorted(out, key=_sort_key)


def _overlaps(a, b) -> bool:
    return a.onset < b.offset and b.onset < a.offset


def hsebb(tsebbs: Sequence[SEBB], csebbs: Sequence[SEBB], lambda_hyb) -> list[SEBB]:
    """Confident tSEBBs, completed by cSEBBs that do not touch any of them."""
    selected = [t for t in tsebbs if t.confidence > _threshold_for(lambda_hyb, t.class_label)]
    by_class: dict[str, list[SEBB]] = {}
    for t in selected:
        by_class.setdefault(t.class_label, []).append(t)
    kept = [
        c for c in csebbs
        if not any(_overlaps(c, t) for t in by_class.get(c.class_label, ()))
    ]
    return sorted(selected + kept, key=_sort_key)


def select_events(sebbs: Sequence[SEBB], lam) -> list[Event]:
    """Events of all boxes whose confidence exceeds the (per-class) threshold."""
    return [
        s.as_event() for s in sebbs if s.confidence > _threshold_for(lam, s.class_label)
    ]


def predict_sebbs(track: ScoreTrack, params: HyperParams, method: str) -> list[SEBB]:
    if method == "tsebb":
        return tsebb(track, params)
    if method == "csebb":
        return csebb(track, params)
    if method == "hsebb":
        lam = {label: params.for_class(label).lambda_hyb for label in track.class_labels}
        return hsebb(tsebb(track, params), csebb(track, params), lam)
    raise ValueError(f"{method!r} does not produce SEBBs; expected one of {SEBB_METHODS}")


def legacy_events(
    track: ScoreTrack, params: HyperParams, method: str, lam=None
) -> list[Event]:
    """Legacy events at ``lam`` (default: each class's ``lambda_f``).

    ``legacy`` thresholds the raw scores; ``medfilt`` filters them first.
    """
    out = []
    for label in track.class_labels:
        p: ClassParams = params.for_class(label)
        length = p.medfilt_len if method == "medfilt" else 0.0
        values = median_filter(track, label, length)
        threshold = p.lambda_f if lam is None else _threshold_for(lam, label)
        out.extend(frame_threshold_merge(track, label, threshold, values))
    return sorted(out, key=_sort_key)
