"""Optional figure rendering for evaluation reports.

Figures are drawn on a bare :class:`matplotlib.figure.Figure` with the Agg
canvas, so importing this module never touches the global pyplot state or
needs a display.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from sebbkit.core import SEBB, Event, ScoreTrack
from sebbkit.metrics import PSDCurve


def _save(fig: Figure, path) -> None:
    FigureCanvasAgg(fig)
    # fixed metadata keeps repeated renders byte-identical
    fig.savefig(path, dpi=100, metadata={"Software": None})


def _steps(xs: np.ndarray, ys: np.ndarray, e_max: float):
    xs = np.append(xs[xs < e_max], e_max)
    ys = ys[: len(xs) - 1]
    return xs, np.append(ys, ys[-1])


def plot_psd_roc(
    curve: PSDCurve,
    path,
    combined: tuple[np.ndarray, np.ndarray] | None = None,
    title: str = "",
) -> None:
    """Class-wise PSD-ROC staircases, plus the combined curve if given."""
    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot()
    for label in sorted(curve.classes):
        st = curve.classes[label]
        xs, ys = _steps(st.xs, st.ys, curve.e_max)
        ax.step(xs, ys, where="post", linewidth=1, label=label)
    if combined is not None:
        xs, ys = _steps(np.asarray(combined[0]), np.asarray(combined[1]), curve.e_max)
        ax.step(xs, ys, where="post", color="black", linewidth=2, label="combined")
    ax.set_xlim(0, curve.e_max)
    ax.set_ylim(0, 1.02)
    ax.set_xlabel("eFPR (FP per hour)")
    ax.set_ylabel("eTPR")
    if title:
        ax.set_title(title)
    ax.legend(loc="lower right", fontsize="small")
    fig.tight_layout()
    _save(fig, path)


def plot_track(
    track: ScoreTrack,
    label: str,
    path,
    boxes: Sequence[SEBB] = (),
    references: Sequence[Event] = (),
) -> None:
    """Scores of one class with predicted boxes and reference events."""
    fig = Figure(figsize=(8, 3))
    ax = fig.add_subplot()
    b = track.boundaries
    values = track.column(label)
    ax.step(b, np.append(values, values[-1]), where="post", color="tab:blue", label="score")
    for k, ev in enumerate(references):
        ax.axvspan(ev.onset, ev.offset, color="tab:green", alpha=0.2, label="reference" if k == 0 else None)
    for k, box in enumerate(boxes):
        ax.hlines(box.confidence, box.onset, box.offset, color="tab:red", linewidth=2,
                  label="box" if k == 0 else None)
    ax.set_xlim(track.start, track.end)
    ax.set_ylim(0, 1.02)
    ax.set_xlabel("time (s)")
    ax.set_ylabel(label)
    ax.legend(loc="upper right", fontsize="small")
    fig.tight_layout()
    _save(fig, path)
