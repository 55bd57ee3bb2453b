"""Intersection-based and collar-based evaluation.

Counting follows the detection/ground-truth tolerance criteria: a detection
is a false positive unless at least ``rho_dtc`` of it overlaps same-class
reference events, and a reference event is a true positive when the union of
non-false-positive detections covers at least ``rho_gtc`` of it.

PSD-ROC curves are kept as exact right-continuous staircases, so the area
under them (and therefore PSDS) is computed without quadrature error.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from sebbkit.core import SEBB, EvalConfig, Event, GroundTruth, ScoreTrack
from sebbkit.postproc import median_filter

# tolerance (seconds) on interval-length comparisons
TIME_EPS = 1e-9
SECONDS_PER_HOUR = 3600.0


@dataclass(frozen=True)
class ClassCounts:
    class_label: str
    tp: int
    fp: int
    n_gt: int

    def __post_init__(self):
        if not 0 <= self.tp <= self.n_gt:
            raise ValueError(f"tp={self.tp} must lie in [0, n_gt={self.n_gt}]")
        if self.fp < 0:
            raise ValueError("fp must be non-negative")

    @property
    def fn(self) -> int:
        return self.n_gt - self.tp


@dataclass(frozen=True)
class OperatingPoint:
    """Counts of every class at one decision threshold."""

    threshold: float
    counts: Mapping[str, ClassCounts]
    duration_hours: float

    @property
    def efpr(self) -> dict[str, float]:
        return {k: c.fp / self.duration_hours for k, c in self.counts.items()}

    @property
    def etpr(self) -> dict[str, float]:
        return {k: (c.tp / c.n_gt if c.n_gt else 0.0) for k, c in self.counts.items()}


@dataclass(frozen=True, eq=False)
class Staircase:
    """Right-continuous step function: ``ys[k]`` on ``[xs[k], xs[k + 1])``.

    ``xs[0]`` is always 0; the last step extends to infinity.
    """

    xs: np.ndarray
    ys: np.ndarray

    def __call__(self, e):
        idx = np.searchsorted(self.xs, e, side="right") - 1
        return np.where(idx >= 0, self.ys[np.clip(idx, 0, None)], 0.0)

    def area(self, e_max: float) -> float:
        edges = np.append(np.minimum(self.xs, e_max), e_max)
        return float(np.dot(np.diff(edges), self.ys))

    @classmethod
    def zero(cls) -> "Staircase":
        return cls(np.array([0.0]), np.array([0.0]))


@dataclass(frozen=True)
class PSDCurve:
    classes: Mapping[str, Staircase]
    e_max: float

    def class_auc(self, label: str) -> float:
        """Area under one class curve, normalized by ``e_max``."""
        return self.classes[label].area(self.e_max) / self.e_max


@dataclass(frozen=True)
class ClassF1:
    tp: int
    fp: int
    fn: int

    @property
    def f1(self) -> float:
        return f_score(self.tp, self.fp, self.fn)

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0


@dataclass(frozen=True)
class F1Report:
    per_class: Mapping[str, ClassF1]
    macro: float
    micro: float


def f_score(tp, fp, fn):
    tp, fp, fn = (np.asarray(x, dtype=float) for x in (tp, fp, fn))
    denom = 2 * tp + fp + fn
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(denom > 0, 2 * tp / np.where(denom > 0, denom, 1), 0.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# interval helpers
# ---------------------------------------------------------------------------


def _clip_intervals(on: np.ndarray, off: np.ndarray, duration: float):
    on = np.clip(on, 0.0, duration)
    off = np.clip(off, 0.0, duration)
    keep = off > on
    return on[keep], off[keep], keep


def _overlap_matrix(a_on, a_off, b_on, b_off) -> np.ndarray:
    lo = np.maximum(a_on[:, None], b_on[None, :])
    hi = np.minimum(a_off[:, None], b_off[None, :])
    return np.maximum(hi - lo, 0.0)


def union_coverage(on: np.ndarray, off: np.ndarray, g_on: float, g_off: float) -> float:
    """Length of ``[g_on, g_off)`` covered by the union of the given intervals."""
    on = np.clip(on, g_on, g_off)
    off = np.clip(off, g_on, g_off)
    keep = off > on
    if not keep.any():
        return 0.0
    order = np.argsort(on[keep], kind="stable")
    on, off = on[keep][order], off[keep][order]
    # running maximum of previous offsets bounds what is already covered
    reach = np.maximum.accumulate(off)
    prev = np.concatenate(([g_on], reach[:-1]))
    return float(np.sum(np.maximum(off - np.maximum(on, prev), 0.0)))


def _class_intervals(events: Iterable, label: str | None):
    sel = [(e.onset, e.offset) for e in events if label is None or e.class_label == label]
    if not sel:
        return np.empty(0), np.empty(0)
    arr = np.array(sel, dtype=float)
    return arr[:, 0], arr[:, 1]


def _check_clips(predictions: Mapping, gt: GroundTruth):
    missing = sorted(set(predictions) - set(gt.durations))
    if missing:
        raise KeyError(f"clips without ground truth: {', '.join(missing[:5])}")


# ---------------------------------------------------------------------------
# intersection-based counting
# ---------------------------------------------------------------------------


def intersection_counts(
    detections: Mapping[str, Sequence[Event]],
    gt: GroundTruth,
    label: str,
    rho_dtc: float = 0.7,
    rho_gtc: float = 0.7,
) -> ClassCounts:
    """TP/FP counts of one class over the whole dataset."""
    _check_clips(detections, gt)
    tp = fp = 0
    for clip in gt.clip_ids:
        g_on, g_off = _class_intervals(gt.events[clip], label)
        d_on, d_off = _class_intervals(detections.get(clip, ()), label)
        d_on, d_off, _ = _clip_intervals(d_on, d_off, gt.durations[clip])
        if len(d_on) == 0:
            continue
        inter = _overlap_matrix(d_on, d_off, g_on, g_off)
        passed = inter.sum(axis=1) >= rho_dtc * (d_off - d_on) - TIME_EPS
        fp += int(np.count_nonzero(~passed))
        for on, off in zip(g_on, g_off):
            covered = union_coverage(d_on[passed], d_off[passed], on, off)
            tp += covered >= rho_gtc * (off - on) - TIME_EPS
    return ClassCounts(label, int(tp), fp, gt.n_events(label))


@dataclass(frozen=True, eq=False)
class SebbActivation:
    """Per-class summary from which counts at any threshold follow directly.

    As boxes never change extent, a box's DTC verdict does not depend on the
    threshold, and a reference event stays a TP once enough confident boxes
    cover it. ``tp_level[g]`` is the confidence of the box that first makes
    reference event ``g`` a TP (``-inf`` if it never becomes one).
    """

    confidences: np.ndarray
    passed: np.ndarray
    tp_level: np.ndarray

    def counts(self, thresholds) -> tuple[np.ndarray, np.ndarray]:
        thr = np.atleast_1d(np.asarray(thresholds, dtype=float))
        fp_conf = np.sort(self.confidences[~self.passed])
        tp_conf = np.sort(self.tp_level)
        fp = len(fp_conf) - np.searchsorted(fp_conf, thr, side="right")
        tp = len(tp_conf) - np.searchsorted(tp_conf, thr, side="right")
        return tp, fp

    @classmethod
    def concat(cls, parts: Sequence["SebbActivation"]) -> "SebbActivation":
        if not parts:
            return cls(np.empty(0), np.empty(0, dtype=bool), np.empty(0))
        return cls(
            np.concatenate([p.confidences for p in parts]),
            np.concatenate([p.passed for p in parts]),
            np.concatenate([p.tp_level for p in parts]),
        )


def clip_activation(
    boxes: Sequence[SEBB], references: Sequence[Event], duration: float, config: EvalConfig
) -> SebbActivation:
    """:class:`SebbActivation` of one clip; all arguments are of a single class."""
    g_on, g_off = _class_intervals(references, None)
    if boxes:
        arr = np.array([(s.onset, s.offset, s.confidence) for s in boxes], dtype=float)
        d_on, d_off, keep = _clip_intervals(arr[:, 0], arr[:, 1], duration)
        conf = arr[keep, 2]
    else:
        d_on = d_off = conf = np.empty(0)
    inter = _overlap_matrix(d_on, d_off, g_on, g_off)
    ok = inter.sum(axis=1) >= config.rho_dtc * (d_off - d_on) - TIME_EPS
    levels = np.full(len(g_on), -np.inf)
    for k, (on, off) in enumerate(zip(g_on, g_off)):
        cand = np.flatnonzero(ok & (inter[:, k] > 0))
        need = config.rho_gtc * (off - on) - TIME_EPS
        for c in np.unique(conf[cand])[::-1]:
            use = cand[conf[cand] >= c]
            if union_coverage(d_on[use], d_off[use], on, off) >= need:
                levels[k] = c
                break
    return SebbActivation(conf, ok, levels)


def sebb_activation(
    sebbs: Mapping[str, Sequence[SEBB]], gt: GroundTruth, label: str, config: EvalConfig
) -> SebbActivation:
    _check_clips(sebbs, gt)
    return SebbActivation.concat([
        clip_activation(
            [s for s in sebbs.get(clip, ()) if s.class_label == label],
            gt.events_of(clip, label),
            gt.durations[clip],
            config,
        )
        for clip in gt.clip_ids
    ])


def _runs_per_threshold(values: np.ndarray, boundaries: np.ndarray, thr: np.ndarray):
    """Frame-threshold-and-merge detections for many thresholds at once.

    Returns the threshold index, onset and offset of every detection.
    """
    pos = np.asarray(values)[None, :] > thr[:, None]
    padded = np.pad(pos.astype(np.int8), ((0, 0), (1, 1)))
    change = np.diff(padded, axis=1)
    t_idx, start = np.nonzero(change == 1)
    _, stop = np.nonzero(change == -1)
    return t_idx, boundaries[start], boundaries[stop]


def clip_legacy_counts(
    values: np.ndarray,
    boundaries: np.ndarray,
    duration: float,
    references: Sequence[Event],
    thresholds,
    config: EvalConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """TP and FP of legacy detections of one clip and class at every threshold."""
    thr = np.atleast_1d(np.asarray(thresholds, dtype=float))
    n_thr = len(thr)
    t_idx, d_on, d_off = _runs_per_threshold(values, np.asarray(boundaries), thr)
    d_on, d_off, keep = _clip_intervals(d_on, d_off, duration)
    t_idx = t_idx[keep]
    g_on, g_off = _class_intervals(references, None)
    inter = _overlap_matrix(d_on, d_off, g_on, g_off)
    ok = inter.sum(axis=1) >= config.rho_dtc * (d_off - d_on) - TIME_EPS
    fp = np.bincount(t_idx[~ok], minlength=n_thr)
    tp = np.zeros(n_thr, dtype=int)
    if len(g_on):
        # detections at one threshold are disjoint, so coverage is a plain sum
        cover = np.zeros((n_thr, len(g_on)))
        np.add.at(cover, t_idx[ok], inter[ok])
        tp = np.sum(cover >= config.rho_gtc * (g_off - g_on) - TIME_EPS, axis=1)
    return tp, fp


def legacy_counts(
    values: Mapping[str, np.ndarray],
    boundaries: Mapping[str, np.ndarray],
    gt: GroundTruth,
    label: str,
    thresholds,
    config: EvalConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """TP and FP of frame-threshold-and-merge detections at every threshold.

    ``values[clip]`` holds the (possibly filtered) scores of ``label``.
    ``thresholds`` may be a 1-d array shared by all clips or a mapping of
    per-clip arrays of equal length (used when clips carry their own floor).
    """
    _check_clips(values, gt)
    tp = fp = 0
    for clip in sorted(values):
        thr = thresholds[clip] if isinstance(thresholds, Mapping) else thresholds
        ctp, cfp = clip_legacy_counts(
            values[clip], boundaries[clip], gt.durations[clip],
            gt.events_of(clip, label), thr, config,
        )
        tp, fp = tp + ctp, fp + cfp
    if isinstance(tp, int):
        n = len(np.atleast_1d(thresholds if not isinstance(thresholds, Mapping) else []))
        return np.zeros(n, dtype=int), np.zeros(n, dtype=int)
    return tp, fp


def operating_points(
    predictions: Mapping[str, Sequence[SEBB]] | Mapping[str, ScoreTrack],
    gt: GroundTruth,
    config: EvalConfig,
    thresholds: Sequence[float],
    classes: Sequence[str] | None = None,
    medfilt: Mapping[str, float] | None = None,
) -> list[OperatingPoint]:
    """One :class:`OperatingPoint` per threshold (given in descending order).

    ``predictions`` maps clip ids either to SEBB lists (event-level selection)
    or to :class:`ScoreTrack` objects (legacy frame thresholding, optionally
    after per-class median filtering of ``medfilt[label]`` seconds).
    """
    thr = np.asarray(thresholds, dtype=float)
    if thr.size == 0:
        raise ValueError("empty threshold list")
    if np.any(np.diff(thr) > 0):
        raise ValueError("thresholds must be sorted in descending order")
    legacy = any(isinstance(v, ScoreTrack) for v in predictions.values())
    if classes is None:
        if legacy:
            classes = sorted({c for t in predictions.values() for c in t.class_labels})
        else:
            found = {s.class_label for v in predictions.values() for s in v}
            classes = sorted(found | set(gt.class_labels))
    hours = gt.total_duration / SECONDS_PER_HOUR
    per_class = {}
    for label in classes:
        if legacy:
            length = (medfilt or {}).get(label, 0.0)
            values = {k: median_filter(t, label, length) for k, t in predictions.items()}
            bounds = {k: t.boundaries for k, t in predictions.items()}
            tp, fp = legacy_counts(values, bounds, gt, label, thr, config)
        else:
            tp, fp = sebb_activation(predictions, gt, label, config).counts(thr)
        per_class[label] = (tp, fp)
    n_gt = {label: gt.n_events(label) for label in classes}
    return [
        OperatingPoint(
            float(t),
            {
                label: ClassCounts(label, int(per_class[label][0][i]), int(per_class[label][1][i]), n_gt[label])
                for label in classes
            },
            hours,
        )
        for i, t in enumerate(thr)
    ]


# ---------------------------------------------------------------------------
# PSD-ROC curves and PSDS
# ---------------------------------------------------------------------------


def _staircase(efpr: np.ndarray, etpr: np.ndarray, e_max: float) -> Staircase:
    """Staircase through points already ordered by efpr, zero before the first."""
    keep = efpr <= e_max
    efpr, etpr = efpr[keep], etpr[keep]
    if len(efpr) == 0:
        return Staircase.zero()
    # among equal efpr the last point wins
    last = np.concatenate((efpr[1:] != efpr[:-1], [True]))
    xs, ys = efpr[last], etpr[last]
    if xs[0] > 0:
        xs, ys = np.concatenate(([0.0], xs)), np.concatenate(([0.0], ys))
    return Staircase(xs, ys)


def class_points(points: Sequence[OperatingPoint], label: str):
    """Threshold, efpr and etpr arrays of every point that reports ``label``."""
    sel = [p for p in points if label in p.counts]
    thr = np.array([p.threshold for p in sel], dtype=float)
    efpr = np.array([p.efpr[label] for p in sel], dtype=float)
    etpr = np.array([p.etpr[label] for p in sel], dtype=float)
    return thr, efpr, etpr


def _labels(points: Sequence[OperatingPoint]) -> list[str]:
    return sorted({label for p in points for label in p.counts})


def envelope_staircase(efpr: np.ndarray, etpr: np.ndarray, e_max: float) -> Staircase:
    order = np.argsort(efpr, kind="stable")
    return _staircase(efpr[order], np.maximum.accumulate(etpr[order]), e_max)


def raw_staircase(
    thresholds: np.ndarray, efpr: np.ndarray, etpr: np.ndarray, lam: float, e_max: float
) -> Staircase:
    keep = thresholds >= lam
    thresholds, efpr, etpr = thresholds[keep], efpr[keep], etpr[keep]
    # efpr ascending; within equal efpr the lowest threshold comes last and wins
    order = np.lexsort((-thresholds, efpr))
    return _staircase(efpr[order], etpr[order], e_max)


def psd_roc_envelope(points: Sequence[OperatingPoint], e_max: float = 100.0) -> PSDCurve:
    """Best-case curve: ``r(e)`` is the highest etpr among points with efpr <= e."""
    if not points:
        raise ValueError("no operating points")
    curves = {}
    for label in _labels(points):
        _, efpr, etpr = class_points(points, label)
        curves[label] = envelope_staircase(efpr, etpr, e_max)
    return PSDCurve(curves, e_max)


def psd_roc_raw(
    points: Sequence[OperatingPoint], lambda_nopsds, e_max: float = 100.0
) -> PSDCurve:
    """Curve through the operating points themselves, without best-case selection.

    Points below the class floor ``lambda_nopsds`` are discarded; among points
    with equal efpr the one with the lowest threshold is kept.
    """
    if not points:
        raise ValueError("no operating points")
    curves = {}
    for label in _labels(points):
        lam = lambda_nopsds[label] if isinstance(lambda_nopsds, Mapping) else lambda_nopsds
        thr, efpr, etpr = class_points(points, label)
        curves[label] = raw_staircase(thr, efpr, etpr, float(lam), e_max)
    return PSDCurve(curves, e_max)


def combined_curve(curve: PSDCurve, config: EvalConfig) -> tuple[np.ndarray, np.ndarray]:
    """Breakpoints ``e`` and ``mu(e) = mean - alpha * std`` over classes."""
    labels = sorted(curve.classes)
    if not labels:
        return np.array([0.0]), np.array([0.0])
    xs = np.unique(np.concatenate([curve.classes[k].xs for k in labels]))
    xs = xs[xs < curve.e_max]
    r = np.stack([curve.classes[k](xs) for k in labels])
    ddof = 0 if config.population_std else 1
    std = r.std(axis=0, ddof=ddof) if len(labels) > ddof else np.zeros(len(xs))
    return xs, r.mean(axis=0) - config.alpha_st * std


def psds(curve: PSDCurve, config: EvalConfig) -> float:
    """Normalized area under ``max(0, mu(e))`` on ``[0, e_max]``."""
    xs, mu = combined_curve(curve, config)
    widths = np.diff(np.append(xs, curve.e_max))
    return float(np.dot(widths, np.maximum(mu, 0.0)) / curve.e_max)


# ---------------------------------------------------------------------------
# collar-based F1
# ---------------------------------------------------------------------------


def _offset_collar(g_len: float, config: EvalConfig) -> float:
    return max(config.offset_collar_floor, config.offset_collar_frac * g_len)


def collar_matches(dets: Sequence[Event], gts: Sequence[Event], config: EvalConfig) -> int:
    """Greedy one-to-one matching of same-class events; returns the TP count.

    Reference events are visited by ascending onset and take the unmatched
    detection with the earliest onset that satisfies both collars.
    """
    dets = sorted(dets, key=lambda e: (e.onset, e.offset))
    used = [False] * len(dets)
    tp = 0
    for g in sorted(gts, key=lambda e: (e.onset, e.offset)):
        off_collar = _offset_collar(g.duration, config) + TIME_EPS
        on_collar = config.onset_collar + TIME_EPS
        for i, d in enumerate(dets):
            if used[i]:
                continue
            if abs(d.onset - g.onset) <= on_collar and abs(d.offset - g.offset) <= off_collar:
                used[i] = True
                tp += 1
                break
    return tp


def collar_counts(
    detections: Mapping[str, Sequence[Event]], gt: GroundTruth, label: str, config: EvalConfig
) -> ClassF1:
    _check_clips(detections, gt)
    tp = fp = fn = 0
    for clip in gt.clip_ids:
        dets = [e for e in detections.get(clip, ()) if e.class_label == label]
        gts = gt.events_of(clip, label)
        m = collar_matches(dets, gts, config)
        tp += m
        fp += len(dets) - m
        fn += len(gts) - m
    return ClassF1(tp, fp, fn)


def collar_f1(
    detections: Mapping[str, Sequence[Event]],
    gt: GroundTruth,
    config: EvalConfig,
    classes: Sequence[str] | None = None,
) -> F1Report:
    """Per-class, macro-averaged and micro-averaged collar-based F1.

    Without ``classes``, every label present in the reference or the
    detections is scored.
    """
    if classes is None:
        found = {e.class_label for v in detections.values() for e in v}
        classes = sorted(found | set(gt.class_labels))
    per_class = {label: collar_counts(detections, gt, label, config) for label in classes}
    macro = float(np.mean([c.f1 for c in per_class.values()])) if per_class else 0.0
    tot = [sum(getattr(c, k) for c in per_class.values()) for k in ("tp", "fp", "fn")]
    return F1Report(per_class, macro, f_score(*tot))


@dataclass(frozen=True, eq=False)
class CollarSteps:
    """Collar TP count of event-level selection as a step function of the threshold.

    Selecting boxes with confidence above ``levels[i]`` (exclusive of it)
    loses ``steps[i]`` matches relative to selecting down to ``levels[i]``.
    """

    levels: np.ndarray
    steps: np.ndarray
    confidences: np.ndarray
    n_gt: int

    def counts(self, thresholds) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        thr = np.atleast_1d(np.asarray(thresholds, dtype=float))
        order = np.argsort(self.levels, kind="stable")
        levels = self.levels[order]
        # suffix sums: matches gained by every level above a threshold
        gained = np.append(np.cumsum(self.steps[order][::-1])[::-1], 0)
        tp = gained[np.searchsorted(levels, thr, side="right")].astype(int)
        conf = np.sort(self.confidences)
        n_sel = len(conf) - np.searchsorted(conf, thr, side="right")
        return tp, n_sel - tp, self.n_gt - tp

    @classmethod
    def concat(cls, parts: Sequence["CollarSteps"]) -> "CollarSteps":
        if not parts:
            return cls(np.empty(0), np.empty(0, dtype=int), np.empty(0), 0)
        return cls(
            np.concatenate([p.levels for p in parts]),
            np.concatenate([p.steps for p in parts]),
            np.concatenate([p.confidences for p in parts]),
            sum(p.n_gt for p in parts),
        )


def clip_collar_steps(
    boxes: Sequence[SEBB], references: Sequence[Event], config: EvalConfig
) -> CollarSteps:
    """Exact collar sweep of one clip and class.

    Matching is re-run at each distinct confidence of the clip; greedy matching
    is not guaranteed monotone in the selection, so steps may be negative.
    """
    levels, steps = [], []
    if boxes and references:
        prev = 0
        for level in sorted({s.confidence for s in boxes}, reverse=True):
            chosen = [s.as_event() for s in boxes if s.confidence >= level]
            m = collar_matches(chosen, references, config)
            if m != prev:
                levels.append(level)
                steps.append(m - prev)
                prev = m
    return CollarSteps(
        np.array(levels, dtype=float),
        np.array(steps, dtype=int),
        np.array([s.confidence for s in boxes], dtype=float),
        len(references),
    )


def sebb_collar_sweep(
    sebbs: Mapping[str, Sequence[SEBB]],
    gt: GroundTruth,
    label: str,
    thresholds,
    config: EvalConfig,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Collar TP/FP/FN of event-level selection at every threshold."""
    _check_clips(sebbs, gt)
    steps = CollarSteps.concat([
        clip_collar_steps(
            [s for s in sebbs.get(clip, ()) if s.class_label == label],
            gt.events_of(clip, label),
            config,
        )
        for clip in gt.clip_ids
    ])
    return steps.counts(thresholds)


def clip_legacy_collar(
    values: np.ndarray,
    boundaries: np.ndarray,
    label: str,
    references: Sequence[Event],
    thresholds,
    config: EvalConfig,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Collar TP/FP/FN of legacy detections of one clip and class per threshold."""
    thr = np.atleast_1d(np.asarray(thresholds, dtype=float))
    t_idx, d_on, d_off = _runs_per_threshold(values, np.asarray(boundaries), thr)
    n_det = np.bincount(t_idx, minlength=len(thr))
    tp = np.zeros(len(thr), dtype=int)
    if references:
        for t in np.unique(t_idx):
            sel = t_idx == t
            dets = [Event(label, a, b) for a, b in zip(d_on[sel].tolist(), d_off[sel].tolist())]
            tp[t] = collar_matches(dets, references, config)
    return tp, n_det - tp, len(references) - tp
