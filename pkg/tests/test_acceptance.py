"""The eight acceptance criteria, one test each.

Every test records a single PASS/FAIL line; the lines are repeated in the
terminal summary. Time limits are part of each criterion.
"""
from __future__ import annotations

import json
import time
from decimal import Decimal
from pathlib import Path

import numpy as np
import pytest

import oracles
from sebbkit import dataio
from sebbkit.core import SEBB, ClassParams, EvalConfig, Event, GroundTruth, HyperParams
from sebbkit.metrics import (
    PSDCurve,
    Staircase,
    collar_f1,
    intersection_counts,
    operating_points,
    psd_roc_envelope,
    psds,
)
from sebbkit.postproc import csebb, select_events
from sebbkit.synth import acceptance_spec, generate, two_peak_scenario
from sebbkit.tuning import Grid, candidate_thresholds, cross_validate, predict_all

FIXTURES = Path(__file__).parent / "fixtures"
CFG = EvalConfig()


@pytest.fixture(scope="module")
def acceptance_corpus():
    return generate(acceptance_spec())


def _random_sebbs(rng, n):
    out = []
    for _ in range(n):
        on = float(rng.uniform(0, 9))
        out.append(SEBB(str(rng.choice(["a", "b"])), on, on + float(rng.uniform(0.01, 3)), float(rng.random())))
    return out


def test_1_extent_invariance(acceptance_line):
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    violations = 0
    for _ in range(1000):
        boxes = _random_sebbs(rng, int(rng.integers(0, 20)))
        if rng.random() < 0.3 and boxes:
            # repeated confidences exercise the strict comparison
            boxes = [SEBB(b.class_label, b.onset, b.offset, round(b.confidence, 1)) for b in boxes]
        t1, t2 = rng.random(2)
        if rng.random() < 0.2 and boxes:
            t2 = boxes[0].confidence
        lo, hi = min(t1, t2), max(t1, t2)
        sel_lo, sel_hi = select_events(boxes, lo), select_events(boxes, hi)
        quads_lo = {(e.class_label, e.onset, e.offset) for e in sel_lo}
        quads_hi = {(e.class_label, e.onset, e.offset) for e in sel_hi}
        source = {(b.class_label, b.onset, b.offset) for b in boxes}
        if not quads_hi <= quads_lo or not quads_lo <= source:
            violations += 1
    seconds = time.perf_counter() - start
    ok = violations == 0 and seconds < 1.0
    assert acceptance_line(1, "extent invariance", ok, f"{violations} violations in 1000 lists", seconds)


def test_2_monotone_roc(acceptance_line, acceptance_corpus):
    tracks, gt = acceptance_corpus
    start = time.perf_counter()
    violations, n_points = 0, 0
    for method in ("tsebb", "csebb", "hsebb"):
        sebbs = predict_all(tracks, HyperParams(), method)
        for label in gt.class_labels:
            confs = [s.confidence for v in sebbs.values() for s in v if s.class_label == label]
            points = operating_points(sebbs, gt, CFG, candidate_thresholds(confs), classes=[label])
            etpr = np.array([p.etpr[label] for p in points])
            efpr = np.array([p.efpr[label] for p in points])
            violations += int(np.sum(np.diff(etpr) < 0) + np.sum(np.diff(efpr) < 0))
            n_points += len(points)
    seconds = time.perf_counter() - start
    ok = violations == 0 and seconds < 10.0
    detail = f"{violations} violations over {n_points} operating points on 200 clips"
    assert acceptance_line(2, "monotone SEBB PSD-ROC", ok, detail, seconds)


def test_3_two_peak_phenomenon(acceptance_line):
    start = time.perf_counter()
    track, gt = two_peak_scenario()
    values = track.column("event")
    refs = gt.events["two_peak"]
    both_at = []
    # each distinct score value (plus 0) yields every distinct frame selection
    for lam in np.unique(np.concatenate(([0.0], values))):
        runs = oracles.threshold_runs(values, track.boundaries.tolist(), lam)
        tp = [oracles.counts(runs, [(r.onset, r.offset)], duration=8.0)[0] for r in refs]
        if sum(tp) == 2:
            both_at.append(float(lam))
    params = HyperParams(default=ClassParams(tau=0.48, gamma=3.0, gamma_mode="relative"))
    boxes = select_events(csebb(track, params), 0.0)
    counts = intersection_counts({"two_peak": boxes}, gt, "event")
    seconds = time.perf_counter() - start
    ok = not both_at and len(boxes) == 2 and counts.tp == 2 and seconds < 1.0
    detail = (
        f"frame thresholds with both TP: {len(both_at)}; "
        f"cSEBB boxes {len(boxes)}, TP {counts.tp}, FP {counts.fp}"
    )
    assert acceptance_line(3, "two-peak reproduction", ok, detail, seconds)


def test_4_oracle_equivalence(acceptance_line):
    start = time.perf_counter()
    rng = np.random.default_rng(4)
    mismatches = 0
    for _ in range(10_000):
        duration = 10.0
        gts = []
        for _ in range(rng.integers(0, 11)):
            a = int(rng.integers(0, 99))
            gts.append((a / 10, min(a + int(rng.integers(1, 40)), 100) / 10))
        dets = []
        for _ in range(rng.integers(0, 11)):
            a = int(rng.integers(0, 100))
            dets.append((a / 10, (a + int(rng.integers(1, 40))) / 10))
        gt = GroundTruth({"c": duration}, {"c": [Event("A", a, b) for a, b in gts]})
        c = intersection_counts({"c": [Event("A", a, b) for a, b in dets]}, gt, "A")
        if (c.tp, c.fp) != oracles.counts(dets, gts, duration=duration):
            mismatches += 1
    cases = json.loads((FIXTURES / "psds_curves.json").read_text())
    worst = 0.0
    for case in cases:
        curves = {
            k: Staircase(np.array([float(oracles.frac(x)) for x, _ in v]), np.array([float(oracles.frac(y)) for _, y in v]))
            for k, v in case["curves"].items()
        }
        cfg = EvalConfig(alpha_st=float(oracles.frac(case["alpha"])), e_max=case["e_max"], population_std=case["population"])
        got = psds(PSDCurve(curves, case["e_max"]), cfg)
        worst = max(worst, abs(float(Decimal(str(got)) - Decimal(case["expected"]))))
    seconds = time.perf_counter() - start
    ok = mismatches == 0 and len(cases) == 20 and worst <= 1e-12 and seconds < 30.0
    detail = f"{mismatches}/10000 count mismatches; max PSDS error {worst:.1e} on {len(cases)} curves"
    assert acceptance_line(4, "oracle equivalence", ok, detail, seconds)


def test_5_ranking_on_synthetic_corpus(acceptance_line, acceptance_corpus):
    tracks, gt = acceptance_corpus
    start = time.perf_counter()
    values = {}
    for method, metric in (("csebb", "nopsds1"), ("medfilt", "nopsds1"), ("tsebb", "cbf1"), ("legacy", "cbf1")):
        report = cross_validate(tracks, gt, Grid(metric=metric), method, k=5, seed=0)
        values[method] = report.pooled.value
    seconds = time.perf_counter() - start
    ok = values["csebb"] >= values["medfilt"] and values["tsebb"] >= values["legacy"] and seconds < 300
    detail = (
        f"noPSDS1 csebb {values['csebb']:.3f} vs medfilt {values['medfilt']:.3f}; "
        f"collar F1 tsebb {values['tsebb']:.3f} vs legacy {values['legacy']:.3f}"
    )
    assert acceptance_line(5, "synthetic ranking", ok, detail, seconds)


def test_6_metric_sanity(acceptance_line, acceptance_corpus):
    _, gt = acceptance_corpus
    start = time.perf_counter()
    perfect = {c: [SEBB(e.class_label, e.onset, e.offset, 1.0) for e in evs] for c, evs in gt.events.items()}
    empty: dict = {c: [] for c in gt.clip_ids}
    results = []
    for sebbs in (perfect, empty):
        confs = [s.confidence for v in sebbs.values() for s in v]
        curve = psd_roc_envelope(operating_points(sebbs, gt, CFG, candidate_thresholds(confs)))
        events = {c: [s.as_event() for s in v] for c, v in sebbs.items()}
        results.append((psds(curve, CFG), collar_f1(events, gt, CFG).macro))
    constant = PSDCurve({"x": Staircase(np.array([0.0]), np.array([1.0])),
                         "y": Staircase(np.array([0.0]), np.array([0.0]))}, 100.0)
    penalized = psds(constant, EvalConfig(alpha_st=1.0))
    seconds = time.perf_counter() - start
    ok = results == [(1.0, 1.0), (0.0, 0.0)] and penalized == 0.0 and seconds < 1.0
    detail = f"perfect {results[0]}, empty {results[1]}, constant {{1, 0}} -> {penalized}"
    assert acceptance_line(6, "metric sanity fixtures", ok, detail, seconds)


def test_7_interop(acceptance_line, tmp_path, acceptance_corpus):
    start = time.perf_counter()
    golden = FIXTURES / "golden"
    tracks = dataio.read_scores(golden / "scores")
    dataio.write_scores(tracks, tmp_path / "scores")
    gt_g = dataio.read_ground_truth(golden / "ground_truth.tsv", golden / "durations.tsv")
    dataio.write_ground_truth(gt_g, tmp_path / "ground_truth.tsv")
    dataio.write_durations(gt_g, tmp_path / "durations.tsv")
    dataio.write_sebbs(dataio.read_sebbs(golden / "sebbs.tsv"), tmp_path / "sebbs.tsv")
    dataio.write_params(dataio.read_params(golden / "params.json"), tmp_path / "params.json")
    names = ["scores/clip_a.tsv", "scores/clip_b.tsv", "ground_truth.tsv", "durations.tsv", "sebbs.tsv", "params.json"]
    differing = [n for n in names if (tmp_path / n).read_bytes() != (golden / n).read_bytes()]

    corpus_tracks, gt = acceptance_corpus
    sub = dict(list(corpus_tracks.items())[:40])
    gt = gt.subset(sub)
    sebbs = predict_all(sub, HyperParams(), "csebb")
    rng = np.random.default_rng(7)
    new_points = 0
    for label in gt.class_labels:
        confs = [s.confidence for v in sebbs.values() for s in v if s.class_label == label]
        base = candidate_thresholds(confs)
        extra = np.unique(np.concatenate((base, rng.random(100))))[::-1]
        pts = lambda thr: {(p.counts[label].tp, p.counts[label].fp) for p in operating_points(sebbs, gt, CFG, thr, [label])}
        new_points += len(pts(extra) - pts(base))
    seconds = time.perf_counter() - start
    ok = not differing and new_points == 0 and seconds < 5.0
    detail = f"{len(names) - len(differing)}/{len(names)} golden files identical; {new_points} new operating points"
    assert acceptance_line(7, "interop fixtures", ok, detail, seconds)


def test_8_determinism(acceptance_line, acceptance_corpus):
    tracks, gt = acceptance_corpus
    start = time.perf_counter()
    grid = Grid(metric="psds1")
    runs = [
        dataio.dumps_json(cross_validate(tracks, gt, grid, "hsebb", k=5, seed=3, threads=t).to_dict())
        for t in (1, 1, 8)
    ]
    seconds = time.perf_counter() - start
    ok = runs[0] == runs[1] == runs[2] and seconds < 300
    detail = f"hSEBB 5-fold reports identical across two runs and 1 vs 8 threads: {ok}"
    assert acceptance_line(8, "determinism", ok, detail, seconds)
