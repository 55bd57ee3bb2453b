"""Threshold enumeration, per-class grid search and k-fold cross-validation.

Tuning is organised around per-clip summaries. For every (clip, class, grid
point) the expensive work (median filtering, box extraction, matching) is done
once and reduced to small arrays; the objective on any subset of clips is then
a cheap sum. Cross-validation reuses the same summaries for every fold, and
because each summary depends on one clip only, a held-out clip can never
influence the parameters tuned without it.
"""
from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from sebbkit.core import SEBB, ClassParams, EvalConfig, GroundTruth, HyperParams, ScoreTrack
from sebbkit.metrics import (
    SECONDS_PER_HOUR,
    CollarSteps,
    PSDCurve,
    SebbActivation,
    clip_activation,
    clip_collar_steps,
    clip_legacy_collar,
    clip_legacy_counts,
    collar_f1,
    envelope_staircase,
    f_score,
    psds,
    raw_staircase,
)
from sebbkit.postproc import (
    LEGACY_METHODS,
    METHODS,
    csebb_class,
    hsebb,
    legacy_events,
    median_filter,
    predict_sebbs,
    tsebb_from_values,
)

METRICS = ("psds1", "nopsds1", "cbf1")


def _grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    n = int(round((stop - start) / step))
    return tuple(round(start + i * step, 10) for i in range(n + 1))


@dataclass(frozen=True)
class Grid:
    """Hyperparameter candidates searched per class.

    ``legacy_thresholds`` is the fixed decision-threshold sweep used for
    frame-level (legacy) predictions, whose exact sweep would need one
    threshold per distinct score value.
    """

    medfilt_lengths: tuple[float, ...] = _grid(0.0, 2.0, 0.2)
    taus: tuple[float, ...] = (0.32, 0.48, 0.64)
    gammas: tuple[tuple[float, str], ...] = (
        (0.15, "absolute"),
        (0.2, "absolute"),
        (0.3, "absolute"),
        (1.5, "relative"),
        (2.0, "relative"),
        (3.0, "relative"),
    )
    ext_thresholds: tuple[float, ...] = _grid(0.1, 0.9, 0.1)
    hyb_thresholds: tuple[float, ...] = _grid(0.1, 0.9, 0.1)
    legacy_thresholds: tuple[float, ...] = _grid(0.0, 1.0, 0.01)
    metric: str = "psds1"

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if f.name == "metric":
                continue
            value = tuple(getattr(self, f.name))
            if not value:
                raise ValueError(f"grid {f.name} must not be empty")
            object.__setattr__(self, f.name, value)
        object.__setattr__(self, "gammas", tuple((float(g), str(m)) for g, m in self.gammas))
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")
        for g, mode in self.gammas:
            ClassParams(gamma=g, gamma_mode=mode)
        if any(not 0 <= t <= 1 for t in self.legacy_thresholds):
            raise ValueError("legacy thresholds must lie in [0, 1]")

    @property
    def sweep(self) -> np.ndarray:
        """Legacy thresholds in descending order."""
        return np.unique(np.asarray(self.legacy_thresholds, dtype=float))[::-1]

    def points(self, method: str) -> list[dict]:
        """Grid points of ``method`` as partial :class:`ClassParams` fields."""
        if method == "legacy":
            return [{}]
        if method == "medfilt":
            return [{"medfilt_len": m} for m in self.medfilt_lengths]
        if method == "tsebb":
            return [
                {"medfilt_len": m, "lambda_ext": lam}
                for m in self.medfilt_lengths
                for lam in self.ext_thresholds
            ]
        if method == "csebb":
            return [
                {"tau": tau, "gamma": g, "gamma_mode": mode}
                for tau in self.taus
                for g, mode in self.gammas
            ]
        if method == "hsebb":
            return [{"lambda_hyb": lam} for lam in self.hyb_thresholds]
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def candidate_thresholds(confidences) -> np.ndarray:
    """Distinct confidences, midpoints between neighbours and the sentinels 0 and 1.

    Returned in descending order. With strict selection (``confidence > t``)
    every distinct selection is produced by at least one of them.
    """
    u = np.unique(np.asarray(confidences, dtype=float).ravel())
    mids = (u[1:] + u[:-1]) / 2
    return np.unique(np.concatenate((u, mids, [0.0, 1.0])))[::-1]


def tune_nopsds_threshold(tp_by_threshold: Mapping[float, int]) -> float:
    """Smallest threshold whose TP count equals the maximum over all thresholds."""
    if not tp_by_threshold:
        raise ValueError("no thresholds given")
    best = max(tp_by_threshold.values())
    return float(min(t for t, tp in tp_by_threshold.items() if tp == best))


# ---------------------------------------------------------------------------
# objectives
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Objective:
    """Class-wise score of one grid point plus the thresholds fitted with it."""

    value: float
    lambda_nopsds: float = 0.0
    lambda_f: float = 0.5


def _roc_objective(thr, tp, fp, n_gt, hours, metric, config) -> Objective:
    efpr = np.asarray(fp, dtype=float) / hours
    etpr = np.asarray(tp, dtype=float) / n_gt if n_gt else np.zeros(len(thr))
    if metric == "psds1":
        curve = envelope_staircase(efpr, etpr, config.e_max)
        return Objective(curve.area(config.e_max) / config.e_max)
    lam = tune_nopsds_threshold(dict(zip(thr.tolist(), np.asarray(tp).tolist())))
    curve = raw_staircase(thr, efpr, etpr, lam, config.e_max)
    return Objective(curve.area(config.e_max) / config.e_max, lambda_nopsds=lam)


def _f1_objective(thr, tp, fp, fn) -> Objective:
    f1 = np.atleast_1d(f_score(tp, fp, fn))
    # thresholds are descending, so argmax keeps the highest among ties
    best = int(np.argmax(f1))
    return Objective(float(f1[best]), lambda_f=float(thr[best]))


def sebb_objective(parts: Sequence, n_gt: int, hours: float, metric: str, config: EvalConfig) -> Objective:
    """Objective of event-level selection from per-clip summaries."""
    if metric == "cbf1":
        steps = CollarSteps.concat(parts)
        thr = candidate_thresholds(steps.confidences)
        return _f1_objective(thr, *steps.counts(thr))
    act = SebbActivation.concat(parts)
    thr = candidate_thresholds(act.confidences)
    tp, fp = act.counts(thr)
    return _roc_objective(thr, tp, fp, n_gt, hours, metric, config)


def legacy_objective(
    parts: Sequence, thr: np.ndarray, n_gt: int, hours: float, metric: str, config: EvalConfig
) -> Objective:
    """Objective of frame thresholding from per-clip count arrays."""
    n = 3 if metric == "cbf1" else 2
    sums = [np.zeros(len(thr), dtype=int) for _ in range(n)]
    for part in parts:
        sums = [a + b for a, b in zip(sums, part)]
    if metric == "cbf1":
        return _f1_objective(thr, *sums)
    return _roc_objective(thr, sums[0], sums[1], n_gt, hours, metric, config)


# ---------------------------------------------------------------------------
# per-clip summary cache
# ---------------------------------------------------------------------------


def _key(method: str, point: Mapping) -> tuple:
    return (method,) + tuple(sorted(point.items()))


class Workspace:
    """Memoized per-clip summaries of one corpus under one metric.

    Summaries are computed for all clips at once (optionally on a thread
    pool) and are only ever combined in sorted clip order, so results do not
    depend on the number of threads.
    """

    def __init__(
        self,
        tracks: Mapping[str, ScoreTrack],
        gt: GroundTruth,
        grid: Grid,
        config: EvalConfig = EvalConfig(),
        threads: int = 1,
    ):
        if not tracks:
            raise ValueError("empty validation set")
        missing = sorted(set(tracks) - set(gt.durations))
        if missing:
            raise KeyError(f"clips without ground truth: {', '.join(missing[:5])}")
        self.tracks = dict(sorted(tracks.items()))
        self.gt = gt
        self.grid = grid
        self.config = config
        self.metric = grid.metric
        self.threads = max(int(threads), 1)
        labels = {t.class_labels for t in self.tracks.values()}
        if len(labels) != 1:
            raise ValueError("all score tracks must share the same class labels")
        self.labels = sorted(labels.pop())
        self._filtered: dict[tuple, np.ndarray] = {}
        self._boxes: dict[tuple, dict[str, list[SEBB]]] = {}
        self._parts: dict[tuple, dict[str, object]] = {}

    def _map(self, fn: Callable, clips: Sequence[str]) -> dict:
        if self.threads > 1 and len(clips) > 1:
            with ThreadPoolExecutor(self.threads) as pool:
                return dict(zip(clips, pool.map(fn, clips)))
        return {c: fn(c) for c in clips}

    def filtered(self, clip: str, label: str, length: float) -> np.ndarray:
        key = (clip, label, length)
        if key not in self._filtered:
            self._filtered[key] = median_filter(self.tracks[clip], label, length)
        return self._filtered[key]

    def boxes(self, label: str, key: tuple) -> dict[str, list[SEBB]]:
        """SEBBs of one class for every clip under the grid point ``key``."""
        cache_key = (label, key)
        if cache_key in self._boxes:
            return self._boxes[cache_key]
        method, p = key[0], dict(key[1:])
        if method == "hsebb":
            t_boxes = self.boxes(label, p["tsebb"])
            c_boxes = self.boxes(label, p["csebb"])
            out = {
                c: hsebb(t_boxes[c], c_boxes[c], p["lambda_hyb"]) for c in self.tracks
            }
        elif method == "tsebb":
            out = self._map(
                lambda c: tsebb_from_values(
                    self.tracks[c], label,
                    self.filtered(c, label, p["medfilt_len"]), p["lambda_ext"],
                ),
                list(self.tracks),
            )
        elif method == "csebb":
            out = self._map(
                lambda c: csebb_class(self.tracks[c], label, p["tau"], p["gamma"], p["gamma_mode"]),
                list(self.tracks),
            )
        else:
            raise ValueError(f"{method!r} does not produce SEBBs")
        self._boxes[cache_key] = out
        return out

    def parts(self, label: str, key: tuple) -> dict[str, object]:
        """Per-clip summaries of one class under the grid point ``key``."""
        cache_key = (label, key)
        if cache_key in self._parts:
            return self._parts[cache_key]
        method, p = key[0], dict(key[1:])
        cfg, gt = self.config, self.gt
        if method in LEGACY_METHODS:
            thr = self.grid.sweep
            length = p.get("medfilt_len", 0.0)

            def work(c):
                track = self.tracks[c]
                values = self.filtered(c, label, length)
                refs = gt.events_of(c, label)
                if self.metric == "cbf1":
                    return clip_legacy_collar(values, track.boundaries, label, refs, thr, cfg)
                return clip_legacy_counts(
                    values, track.boundaries, gt.durations[c], refs, thr, cfg
                )

            out = self._map(work, list(self.tracks))
        else:
            boxes = self.boxes(label, key)

            def work(c):
                refs = gt.events_of(c, label)
                if self.metric == "cbf1":
                    return clip_collar_steps(boxes[c], refs, cfg)
                return clip_activation(boxes[c], refs, gt.durations[c], cfg)

            out = self._map(work, list(self.tracks))
        self._parts[cache_key] = out
        return out

    def objective(self, label: str, key: tuple, clips: Sequence[str]) -> Objective:
        clips = sorted(clips)
        parts = self.parts(label, key)
        selected = [parts[c] for c in clips]
        n_gt = sum(len(self.gt.events_of(c, label)) for c in clips)
        hours = sum(self.gt.durations[c] for c in clips) / SECONDS_PER_HOUR
        if key[0] in LEGACY_METHODS:
            return legacy_objective(selected, self.grid.sweep, n_gt, hours, self.metric, self.config)
        return sebb_objective(selected, n_gt, hours, self.metric, self.config)


# ---------------------------------------------------------------------------
# grid search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    """Tuned parameters plus the objective of every grid point per class."""

    params: HyperParams
    table: Mapping[str, tuple[tuple[dict, float], ...]]


def _best(ws: Workspace, label: str, method: str, points: list[dict], clips, to_key) -> tuple[int, list[Objective]]:
    objectives = [ws.objective(label, to_key(p), clips) for p in points]
    values = [o.value for o in objectives]
    return int(np.argmax(values)), objectives


def _fitted(base: dict, obj: Objective, metric: str) -> dict:
    out = dict(base)
    if metric == "nopsds1":
        out["lambda_nopsds"] = obj.lambda_nopsds
    if metric == "cbf1":
        out["lambda_f"] = obj.lambda_f
    return out


def search(
    ws: Workspace, method: str, clips: Sequence[str] | None = None
) -> SearchResult:
    """Per-class exhaustive search over ``ws.grid`` using ``clips`` only."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    clips = sorted(ws.tracks if clips is None else clips)
    if not clips:
        raise ValueError("empty validation set")
    metric = ws.metric
    classes, table = {}, {}
    if method == "hsebb":
        t_params = search(ws, "tsebb", clips).params
        c_params = search(ws, "csebb", clips).params
    for label in ws.labels:
        if method == "hsebb":
            tp_, cp_ = t_params.for_class(label), c_params.for_class(label)
            t_key = _key("tsebb", {"medfilt_len": tp_.medfilt_len, "lambda_ext": tp_.lambda_ext})
            c_key = _key("csebb", {"tau": cp_.tau, "gamma": cp_.gamma, "gamma_mode": cp_.gamma_mode})
            base = {
                "medfilt_len": tp_.medfilt_len, "lambda_ext": tp_.lambda_ext,
                "tau": cp_.tau, "gamma": cp_.gamma, "gamma_mode": cp_.gamma_mode,
            }

            def to_key(p, t_key=t_key, c_key=c_key):
                return ("hsebb", ("csebb", c_key), ("lambda_hyb", p["lambda_hyb"]), ("tsebb", t_key))
        else:
            base = {}

            def to_key(p):
                return _key(method, p)

        points = ws.grid.points(method)
        best, objectives = _best(ws, label, method, points, clips, to_key)
        classes[label] = ClassParams(**_fitted({**base, **points[best]}, objectives[best], metric))
        table[label] = tuple((dict(p), o.value) for p, o in zip(points, objectives))
    return SearchResult(HyperParams(classes), table)


def grid_search(
    tracks: Mapping[str, ScoreTrack],
    gt: GroundTruth,
    grid: Grid = Grid(),
    method: str = "csebb",
    config: EvalConfig = EvalConfig(),
    threads: int = 1,
) -> HyperParams:
    """Tune class-level parameters of ``method`` on a validation set.

    Each class independently takes the grid point maximizing its class-wise
    objective: the normalized area under its PSD-ROC for ``psds1`` and
    ``nopsds1``, the best-threshold F1 for ``cbf1``. The first grid point wins
    ties. The decision threshold belonging to the metric (``lambda_nopsds`` or
    ``lambda_f``) is fitted alongside.
    """
    return search(Workspace(tracks, gt, grid, config, threads), method).params


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Evaluation:
    """Metric value with per-class breakdown.

    ``per_class`` holds class AUCs for the PSDS metrics and class F1 for
    ``cbf1``; ``roc`` keeps ``(threshold, efpr, etpr)`` arrays per class for
    export.
    """

    metric: str
    value: float
    per_class: Mapping[str, float]
    micro: float | None = None
    curve: PSDCurve | None = None
    roc: Mapping[str, tuple[np.ndarray, np.ndarray, np.ndarray]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "metric": self.metric,
            "value": self.value,
            "per_class": dict(sorted(self.per_class.items())),
        }
        if self.micro is not None:
            out["micro"] = self.micro
        return out


ParamSource = HyperParams | Mapping[str, HyperParams]


def _params_of(params: ParamSource, clip: str) -> HyperParams:
    if isinstance(params, HyperParams):
        return params
    return params[clip]


def _eval_classes(labels: Sequence[str], gt: GroundTruth) -> list[str]:
    return sorted(set(labels) | set(gt.class_labels))


def _curve_eval(metric, roc, n_gt, hours, config) -> Evaluation:
    curves, per_class = {}, {}
    for label, (thr, tp, fp) in roc.items():
        efpr = np.asarray(fp, dtype=float) / hours
        etpr = np.asarray(tp, dtype=float) / n_gt[label] if n_gt[label] else np.zeros(len(thr))
        if metric == "psds1":
            curves[label] = envelope_staircase(efpr, etpr, config.e_max)
        else:
            # class floors were already applied per clip
            curves[label] = raw_staircase(thr, efpr, etpr, -np.inf, config.e_max)
        roc[label] = (thr, efpr, etpr)
    curve = PSDCurve(curves, config.e_max)
    per_class = {k: curve.class_auc(k) for k in curves}
    return Evaluation(metric, psds(curve, config), per_class, curve=curve, roc=roc)


def evaluate_sebbs(
    sebbs: Mapping[str, Sequence[SEBB]],
    gt: GroundTruth,
    metric: str,
    config: EvalConfig = EvalConfig(),
    params: ParamSource | None = None,
    classes: Sequence[str] | None = None,
) -> Evaluation:
    """Evaluate event-level selection of SEBBs.

    ``params`` supplies ``lambda_f`` (cbf1) and ``lambda_nopsds`` (nopsds1),
    either globally or per clip; without it the class defaults apply.
    PSDS-type metrics sweep every candidate threshold of each class. A class
    floor is applied per clip by dropping boxes at or below it, which equals
    clamping every threshold of that clip to the floor.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    missing = sorted(set(sebbs) - set(gt.durations))
    if missing:
        raise KeyError(f"clips without ground truth: {', '.join(missing[:5])}")
    params = HyperParams() if params is None else params
    found = {s.class_label for v in sebbs.values() for s in v}
    labels = _eval_classes(found if classes is None else classes, gt)
    clips = gt.clip_ids
    if metric == "cbf1":
        events = {
            c: [s.as_event() for s in sebbs.get(c, ())
                if s.confidence > _params_of(params, c).for_class(s.class_label).lambda_f]
            for c in clips
        }
        return _f1_eval(collar_f1(events, gt, config, labels))
    roc, n_gt = {}, {}
    for label in labels:
        parts = []
        for c in clips:
            floor = -np.inf
            if metric == "nopsds1":
                floor = _params_of(params, c).for_class(label).lambda_nopsds
            boxes = [s for s in sebbs.get(c, ()) if s.class_label == label and s.confidence > floor]
            parts.append(clip_activation(boxes, gt.events_of(c, label), gt.durations[c], config))
        act = SebbActivation.concat(parts)
        thr = candidate_thresholds(act.confidences)
        roc[label] = (thr, *act.counts(thr))
        n_gt[label] = gt.n_events(label)
    return _curve_eval(metric, roc, n_gt, gt.total_duration / SECONDS_PER_HOUR, config)


def _f1_eval(report) -> Evaluation:
    per_class = {k: c.f1 for k, c in report.per_class.items()}
    return Evaluation("cbf1", report.macro, per_class, micro=report.micro)


def evaluate_legacy(
    tracks: Mapping[str, ScoreTrack],
    gt: GroundTruth,
    metric: str,
    method: str = "legacy",
    config: EvalConfig = EvalConfig(),
    params: ParamSource | None = None,
    thresholds: Sequence[float] | None = None,
) -> Evaluation:
    """Evaluate legacy (frame-thresholded) predictions.

    PSDS-type metrics sweep ``thresholds`` (default: 0 to 1 in steps of
    0.01); ``nopsds1`` clamps the thresholds of each clip to its class floor.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    if method not in LEGACY_METHODS:
        raise ValueError(f"legacy method must be one of {LEGACY_METHODS}")
    missing = sorted(set(tracks) - set(gt.durations))
    if missing:
        raise KeyError(f"clips without ground truth: {', '.join(missing[:5])}")
    params = HyperParams() if params is None else params
    found = {label for t in tracks.values() for label in t.class_labels}
    labels = _eval_classes(found, gt)
    if metric == "cbf1":
        events = {
            c: legacy_events(t, _params_of(params, c), method) for c, t in sorted(tracks.items())
        }
        return _f1_eval(collar_f1(events, gt, config, labels))
    thr = Grid().sweep if thresholds is None else np.unique(np.asarray(thresholds, dtype=float))[::-1]
    roc, n_gt = {}, {}
    for label in labels:
        tp = np.zeros(len(thr), dtype=int)
        fp = np.zeros(len(thr), dtype=int)
        for c, track in sorted(tracks.items()):
            if label not in track.class_labels:
                continue
            p = _params_of(params, c).for_class(label)
            length = p.medfilt_len if method == "medfilt" else 0.0
            clip_thr = thr
            if metric == "nopsds1":
                clip_thr = np.maximum(thr, p.lambda_nopsds)
            ctp, cfp = clip_legacy_counts(
                median_filter(track, label, length), track.boundaries,
                gt.durations[c], gt.events_of(c, label), clip_thr, config,
            )
            tp, fp = tp + ctp, fp + cfp
        roc[label] = (thr, tp, fp)
        n_gt[label] = gt.n_events(label)
    return _curve_eval(metric, roc, n_gt, gt.total_duration / SECONDS_PER_HOUR, config)


def predict_all(
    tracks: Mapping[str, ScoreTrack], params: ParamSource, method: str
) -> dict[str, list[SEBB]]:
    return {c: predict_sebbs(t, _params_of(params, c), method) for c, t in sorted(tracks.items())}


def evaluate(
    tracks: Mapping[str, ScoreTrack],
    gt: GroundTruth,
    params: ParamSource,
    method: str,
    metric: str,
    config: EvalConfig = EvalConfig(),
    grid: Grid | None = None,
) -> Evaluation:
    """Predict with ``method`` under ``params`` and score the result."""
    if method in LEGACY_METHODS:
        thresholds = None if grid is None else grid.sweep
        return evaluate_legacy(tracks, gt, metric, method, config, params, thresholds)
    labels = sorted({label for t in tracks.values() for label in t.class_labels})
    return evaluate_sebbs(predict_all(tracks, params, method), gt, metric, config, params, labels)


# ---------------------------------------------------------------------------
# cross-validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FoldSplit:
    """Assignment of clips to ``k`` folds."""

    k: int
    seed: int
    assignment: Mapping[str, int]

    def fold(self, index: int) -> list[str]:
        return sorted(c for c, f in self.assignment.items() if f == index)

    def folds(self) -> list[list[str]]:
        return [self.fold(i) for i in range(self.k)]


def make_folds(clip_ids: Sequence[str], k: int, seed: int = 0) -> FoldSplit:
    """Shuffle the sorted clip ids with a seeded generator, then deal them round-robin."""
    if k < 2:
        raise ValueError("k must be at least 2")
    clips = sorted(set(clip_ids))
    if len(clips) < k:
        raise ValueError(f"cannot split {len(clips)} clips into {k} folds")
    order = np.random.default_rng(seed).permutation(len(clips))
    return FoldSplit(k, seed, {clips[j]: pos % k for pos, j in enumerate(order)})


@dataclass(frozen=True)
class FoldResult:
    index: int
    clips: tuple[str, ...]
    params: HyperParams
    evaluation: Evaluation


@dataclass(frozen=True)
class CVReport:
    method: str
    metric: str
    split: FoldSplit
    folds: tuple[FoldResult, ...]
    pooled: Evaluation

    def to_dict(self) -> dict:
        from sebbkit.dataio import params_to_dict

        return {
            "method": self.method,
            "metric": self.metric,
            "k": self.split.k,
            "seed": self.split.seed,
            "folds": [
                {
                    "fold": f.index,
                    "clips": list(f.clips),
                    "params": params_to_dict(f.params),
                    **f.evaluation.to_dict(),
                }
                for f in self.folds
            ],
            "pooled": self.pooled.to_dict(),
        }


def cross_validate(
    tracks: Mapping[str, ScoreTrack],
    gt: GroundTruth,
    grid: Grid = Grid(),
    method: str = "csebb",
    k: int = 5,
    seed: int = 0,
    config: EvalConfig = EvalConfig(),
    threads: int = 1,
) -> CVReport:
    """k-fold cross-validation of ``method`` under ``grid.metric``.

    Every fold is predicted with parameters tuned on the remaining folds. The
    pooled value scores all held-out predictions together, each clip under
    the parameters of its own fold.
    """
    split = make_folds(list(tracks), k, seed)
    ws = Workspace(tracks, gt, grid, config, threads)
    clips = sorted(tracks)
    fold_params, results = {}, []
    for i, held_out in enumerate(split.folds()):
        train = [c for c in clips if split.assignment[c] != i]
        params = search(ws, method, train).params
        for c in held_out:
            fold_params[c] = params
        sub = {c: tracks[c] for c in held_out}
        ev = evaluate(sub, gt.subset(held_out), params, method, grid.metric, config, grid)
        results.append(FoldResult(i, tuple(held_out), params, ev))
    pooled = evaluate(tracks, gt.subset(clips), fold_params, method, grid.metric, config, grid)
    return CVReport(method, grid.metric, split, tuple(results), pooled)
