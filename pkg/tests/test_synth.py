from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from sebbkit.core import ClassParams, Event, GroundTruth, HyperParams, ScoreTrack
from sebbkit.metrics import intersection_counts
from sebbkit.postproc import csebb, select_events
from sebbkit.synth import SynthSpec, acceptance_spec, generate, generate_clip, trapezoid, two_peak_scenario, write_corpus


def test_noiseless_rectangle():
    spec = SynthSpec(n_clips=3, heights=(1.0,), ramp_width=0.0, noise=0.0, seed=5)
    tracks, gt = generate(spec)
    for clip, track in tracks.items():
        centres = (track.boundaries[:-1] + track.boundaries[1:]) / 2
        inside = np.zeros(track.n_frames, dtype=bool)
        for e in gt.events[clip]:
            inside |= (centres > e.onset) & (centres < e.offset)
        assert set(track.column("class_a")[inside].tolist()) <= {1.0}
        assert set(track.column("class_a")[~inside].tolist()) <= {0.0}


def test_same_seed_same_corpus():
    spec = SynthSpec(n_clips=5, classes=("a", "b"), noise=0.2, distractor_rate=0.5, seed=11)
    (t1, g1), (t2, g2) = generate(spec), generate(spec)
    assert g1 == g2
    for c in t1:
        assert np.array_equal(t1[c].scores, t2[c].scores)
    t3, _ = generate(SynthSpec(n_clips=5, classes=("a", "b"), noise=0.2, distractor_rate=0.5, seed=12))
    assert any(not np.array_equal(t1[c].scores, t3[c].scores) for c in t1)


def test_clip_independent_of_corpus_size():
    small, large = SynthSpec(n_clips=2, noise=0.1, seed=3), SynthSpec(n_clips=9, noise=0.1, seed=3)
    a, _ = generate_clip(small, 1)
    b, _ = generate_clip(large, 1)
    assert np.array_equal(a.scores, b.scores)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0, 1), st.floats(0, 1.0))
def test_scores_and_ground_truth_in_bounds(seed, noise, anchor):
    spec = SynthSpec(
        n_clips=3, classes=("a", "b"), noise=noise, ramp_width=0.3, ramp_anchor=anchor,
        distractor_rate=0.3, event_rate=0.5, max_event_length=1.5, seed=seed,
    )
    tracks, gt = generate(spec)
    for clip, track in tracks.items():
        assert track.scores.min() >= 0.0 and track.scores.max() <= 1.0
        for e in gt.events[clip]:
            assert 0.0 <= e.onset < e.offset <= gt.durations[clip]


def test_same_class_plants_do_not_overlap():
    tracks, gt = generate(acceptance_spec())
    for clip, events in gt.events.items():
        for label in gt.class_labels:
            evs = gt.events_of(clip, label)
            for a, b in zip(evs, evs[1:]):
                assert a.offset + 0.48 <= b.onset - 0.48 + 1e-9


def test_acceptance_corpus_shape():
    spec = acceptance_spec()
    tracks, gt = generate(spec)
    assert len(tracks) == 200 and list(gt.class_labels) == ["alarm", "dog", "speech"]
    assert sum(gt.n_events(k) for k in gt.class_labels) == 585


def test_overcrowded_layout_raises():
    spec = SynthSpec(n_clips=1, clip_duration=2.0, min_event_length=1.5, max_event_length=2.0,
                     event_rate=30, max_retries=3)
    with pytest.raises(RuntimeError):
        generate(spec)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"frame_width": 0.03},
        {"heights": (1.2,)},
        {"noise": -0.1},
        {"min_event_length": 3.0, "max_event_length": 2.0},
        {"classes": ("a", "a")},
        {"ramp_anchor": 2.0},
    ],
)
def test_invalid_spec(kwargs):
    with pytest.raises(ValueError):
        SynthSpec(**kwargs)


def test_trapezoid_anchor():
    t = np.array([0.9, 1.0, 1.1, 2.0])
    centred = trapezoid(t, 1.0, 2.0, 0.8, 0.2, 0.5)
    assert centred[1] == pytest.approx(0.4)
    outward = trapezoid(t, 1.0, 2.0, 0.8, 0.2, 1.0)
    assert outward[0] == pytest.approx(0.4) and outward[1] == pytest.approx(0.8)


def test_two_peak_frame_sweep_never_gets_both():
    track, gt = two_peak_scenario()
    values = track.column("event")
    refs = [(e.onset, e.offset) for e in gt.events["two_peak"]]
    # every distinct selection of frames is produced by one of these thresholds
    levels = np.unique(np.concatenate(([0.0], values)))
    for lam in levels:
        runs = oracles.threshold_runs(values, track.boundaries.tolist(), lam)
        tp_each = [oracles.counts(runs, [r], duration=8.0)[0] for r in refs]
        assert sum(tp_each) < 2
    assert track.scores.max() == pytest.approx(0.9)


def test_written_corpus_reads_back(tmp_path):
    from sebbkit import dataio

    tracks, gt = generate(SynthSpec(n_clips=3, noise=0.1, seed=2))
    write_corpus(tracks, gt, tmp_path)
    back = dataio.read_scores(tmp_path / "scores")
    gt_back = dataio.read_ground_truth(tmp_path / "ground_truth.tsv", tmp_path / "durations.tsv")
    assert sorted(back) == sorted(tracks)
    assert gt_back == gt
    for c in tracks:
        assert np.allclose(back[c].scores, tracks[c].scores, atol=5e-7)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(10, 60), st.integers(13, 60), st.floats(0.3, 1.0), st.floats(0.0, 0.29),
    st.integers(30, 80), st.integers(13, 60), st.floats(0.3, 1.0),
)
def test_csebb_recovers_clean_plants(start, n_len, height, ramp_frac, gap, n_len2, height2):
    """Noise-free plants with ramps narrower than (1 - rho) times their length."""
    w = 0.04
    plants = [(start * w, (start + n_len) * w, height)]
    s2 = start + n_len + gap
    plants.append((s2 * w, (s2 + n_len2) * w, height2))
    duration = round((s2 + n_len2 + 20) * w, 6)
    b = np.arange(int(round(duration / w)) + 1) * w
    centres = (b[:-1] + b[1:]) / 2
    scores = np.zeros(len(centres))
    for on, off, h in plants:
        ramp = ramp_frac * (off - on) * (1 - 0.7)
        scores = np.maximum(scores, trapezoid(centres, on, off, h, ramp, 0.5))
    track = ScoreTrack("p", ("a",), b, scores[:, None])
    gt = GroundTruth({"p": duration}, {"p": [Event("a", on, off) for on, off, _ in plants]})
    params = HyperParams(default=ClassParams(tau=0.48, gamma=3.0, gamma_mode="relative"))
    boxes = select_events(csebb(track, params), 0.0)
    counts = intersection_counts({"p": boxes}, gt, "a")
    assert counts.tp == 2
