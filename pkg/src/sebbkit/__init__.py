"""Sound event bounding boxes: conversion of frame-level scores and their evaluation."""
from __future__ import annotations

from sebbkit.core import (
    SEBB,
    ClassParams,
    EvalConfig,
    Event,
    GroundTruth,
    HyperParams,
    ScoreTrack,
    TrackValidationError,
    UnknownClassError,
    validate_track,
)
from sebbkit.metrics import (
    collar_f1,
    intersection_counts,
    operating_points,
    psd_roc_envelope,
    psd_roc_raw,
    psds,
)
from sebbkit.postproc import csebb, frame_threshold_merge, hsebb, median_filter, select_events, tsebb
from sebbkit.tuning import Grid, candidate_thresholds, cross_validate, grid_search, tune_nopsds_threshold

__version__ = "0.1.0"

__all__ = [
    "SEBB", "ClassParams", "EvalConfig", "Event", "GroundTruth", "HyperParams", "ScoreTrack",
    "TrackValidationError", "UnknownClassError", "validate_track",
    "collar_f1", "intersection_counts", "operating_points", "psd_roc_envelope", "psd_roc_raw", "psds",
    "csebb", "frame_threshold_merge", "hsebb", "median_filter", "select_events", "tsebb",
    "Grid", "candidate_thresholds", "cross_validate", "grid_search", "tune_nopsds_threshold",
]
