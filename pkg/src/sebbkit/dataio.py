"""Reading and writing the on-disk formats.

Every table is UTF-8, tab-separated, with a header row, ``.`` as decimal
separator and LF line endings. Times and scores are written with six
decimals. A leading ``# format: v1`` comment line is accepted by all readers.
The layouts are described in ``docs/formats.md``.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from sebbkit.core import SEBB, ClassParams, Event, GroundTruth, HyperParams, ScoreTrack, validate_track

log = logging.getLogger(__name__)

FORMAT_LINE = "# format: v1"
PARAMS_FORMAT = "v1"
AUDIO_SUFFIXES = (".wav", ".flac", ".mp3", ".ogg")
SCORE_SUFFIX = ".tsv"
# tolerance when checking that consecutive score rows chain
CHAIN_TOL = 1e-9


class DataError(ValueError):
    """Malformed or inconsistent input data."""


def fmt(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def clip_id_of(name: str) -> str:
    """Clip id of a ground-truth filename: an audio extension is dropped."""
    for suffix in AUDIO_SUFFIXES:
        if name.lower().endswith(suffix):
            return name[: -len(suffix)]
    return name


def _rows(path: Path) -> Iterator[tuple[int, list[str]]]:
    """Non-empty rows with their 1-based line numbers; the format line is skipped."""
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if lineno == 1 and line.strip() == FORMAT_LINE:
                continue
            if not line.strip():
                continue
            yield lineno, line.split("\t")


def _table(path: Path, required: Sequence[str]) -> tuple[list[str], list[tuple[int, list[str]]]]:
    rows = list(_rows(path))
    if not rows:
        raise DataError(f"{path}: missing header")
    header = rows[0][1]
    missing = [c for c in required if c not in header]
    if missing:
        raise DataError(f"{path}: missing columns {', '.join(missing)}")
    return header, rows[1:]


def _number(path: Path, lineno: int, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"{path}:{lineno}: malformed number {text!r}") from None
    if not np.isfinite(value):
        raise DataError(f"{path}:{lineno}: non-finite number {text!r}")
    return value


def _write(path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_NONE)
    writer.writerow(header)
    writer.writerows(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


# ---------------------------------------------------------------------------
# frame scores
# ---------------------------------------------------------------------------


def read_score_file(path, clip_id: str | None = None) -> ScoreTrack:
    path = Path(path)
    header, rows = _table(path, ("onset", "offset"))
    if header[:2] != ["onset", "offset"] or len(header) < 3:
        raise DataError(f"{path}: header must be onset, offset and at least one class")
    labels = header[2:]
    if len(set(labels)) != len(labels):
        raise DataError(f"{path}: duplicate class labels")
    if not rows:
        raise DataError(f"{path}: no frames")
    data = np.empty((len(rows), len(header)))
    for r, (lineno, cells) in enumerate(rows):
        if len(cells) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} columns, got {len(cells)}")
        data[r] = [_number(path, lineno, c) for c in cells]
    gaps = np.abs(data[1:, 0] - data[:-1, 1]) > CHAIN_TOL
    if gaps.any():
        lineno = rows[int(np.argmax(gaps)) + 1][0]
        raise DataError(f"{path}:{lineno}: non-contiguous frames")
    boundaries = np.append(data[:, 0], data[-1, 1])
    track = ScoreTrack(clip_id or path.stem, tuple(labels), boundaries, data[:, 2:])
    return validate_track(track)


def read_scores(directory) -> dict[str, ScoreTrack]:
    """Read every ``*.tsv`` file of ``directory``; the file stem is the clip id."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"{directory}: not a directory")
    files = sorted(directory.glob(f"*{SCORE_SUFFIX}"))
    if not files:
        raise DataError(f"{directory}: no score files found")
    tracks, labels = {}, None
    for path in files:
        track = read_score_file(path)
        if labels is None:
            labels = track.class_labels
        elif track.class_labels != labels:
            raise DataError(f"{path}: class columns differ from {files[0].name}")
        tracks[track.clip_id] = track
    return tracks


def write_score_file(track: ScoreTrack, path) -> None:
    b = track.boundaries
    rows = (
        [fmt(b[n]), fmt(b[n + 1])] + [fmt(v) for v in track.scores[n]]
        for n in range(track.n_frames)
    )
    _write(path, ["onset", "offset", *track.class_labels], rows)


def write_scores(tracks: Mapping[str, ScoreTrack], directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for clip, track in sorted(tracks.items()):
        write_score_file(track, directory / f"{clip}{SCORE_SUFFIX}")


# ---------------------------------------------------------------------------
# ground truth
# ---------------------------------------------------------------------------


def read_durations(path) -> dict[str, float]:
    path = Path(path)
    header, rows = _table(path, ("filename", "duration"))
    i_name, i_dur = header.index("filename"), header.index("duration")
    out = {}
    for lineno, cells in rows:
        clip = clip_id_of(cells[i_name])
        if clip in out:
            raise DataError(f"{path}:{lineno}: duplicate duration for {clip}")
        out[clip] = _number(path, lineno, cells[i_dur])
        if not out[clip] > 0:
            raise DataError(f"{path}:{lineno}: duration must be positive")
    return out


def read_ground_truth(path, durations_path) -> GroundTruth:
    """Reference events plus clip durations.

    Events are clipped to ``[0, duration]``; every clipped event counts as a
    repair (``GroundTruth.n_repaired``) and events left without length are
    dropped. Rows with empty onset, offset and label mark clips without
    events.
    """
    path = Path(path)
    durations = read_durations(durations_path)
    header, rows = _table(path, ("filename", "onset", "offset", "event_label"))
    idx = [header.index(c) for c in ("filename", "onset", "offset", "event_label")]
    events: dict[str, list[Event]] = {}
    repaired = 0
    for lineno, cells in rows:
        if len(cells) < len(header):
            cells = cells + [""] * (len(header) - len(cells))
        name, on, off, label = (cells[i] for i in idx)
        clip = clip_id_of(name)
        if clip not in durations:
            raise DataError(f"{path}:{lineno}: no duration for clip {clip!r}")
        if not (on or off or label):
            continue
        onset, offset = _number(path, lineno, on), _number(path, lineno, off)
        if not offset > onset:
            raise DataError(f"{path}:{lineno}: offset {off} must exceed onset {on}")
        if not label:
            raise DataError(f"{path}:{lineno}: empty event label")
        dur = durations[clip]
        c_on, c_off = min(max(onset, 0.0), dur), min(max(offset, 0.0), dur)
        if (c_on, c_off) != (onset, offset):
            repaired += 1
        if c_off > c_on:
            events.setdefault(clip, []).append(Event(label, c_on, c_off))
    if repaired:
        log.warning("%s: %d event(s) clipped to the clip duration", path, repaired)
    events = {k: sorted(v, key=lambda e: (e.onset, e.offset, e.class_label)) for k, v in events.items()}
    return GroundTruth(durations, events, repaired)


def write_ground_truth(gt: GroundTruth, path) -> None:
    rows = [
        [clip, fmt(e.onset), fmt(e.offset), e.class_label]
        for clip in gt.clip_ids
        for e in sorted(gt.events[clip], key=lambda e: (e.onset, e.class_label, e.offset))
    ]
    _write(path, ["filename", "onset", "offset", "event_label"], rows)


def write_durations(gt: GroundTruth, path) -> None:
    _write(path, ["filename", "duration"], [[c, fmt(gt.durations[c])] for c in gt.clip_ids])


# ---------------------------------------------------------------------------
# SEBBs and events
# ---------------------------------------------------------------------------


def _event_rows(items: Mapping[str, Sequence], with_confidence: bool):
    flat = [(clip, x) for clip, xs in items.items() for x in xs]
    flat.sort(key=lambda cx: (cx[0], cx[1].onset, cx[1].class_label, cx[1].offset))
    for clip, x in flat:
        row = [clip, fmt(x.onset), fmt(x.offset), x.class_label]
        if with_confidence:
            row.append(fmt(x.confidence))
        yield row


def write_sebbs(sebbs: Mapping[str, Sequence[SEBB]], path) -> None:
    """Rows sorted by (filename, onset, event_label)."""
    _write(path, ["filename", "onset", "offset", "event_label", "confidence"], _event_rows(sebbs, True))


def write_events(events: Mapping[str, Sequence[Event]], path) -> None:
    _write(path, ["filename", "onset", "offset", "event_label"], _event_rows(events, False))


def read_sebbs(path) -> dict[str, list[SEBB]]:
    """SEBBs per clip. Without a confidence column every box gets confidence 1."""
    path = Path(path)
    header, rows = _table(path, ("filename", "onset", "offset", "event_label"))
    idx = [header.index(c) for c in ("filename", "onset", "offset", "event_label")]
    i_conf = header.index("confidence") if "confidence" in header else None
    out: dict[str, list[SEBB]] = {}
    for lineno, cells in rows:
        if len(cells) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} columns, got {len(cells)}")
        name, on, off, label = (cells[i] for i in idx)
        conf = 1.0 if i_conf is None else _number(path, lineno, cells[i_conf])
        try:
            box = SEBB(label, _number(path, lineno, on), _number(path, lineno, off), conf)
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
        out.setdefault(clip_id_of(name), []).append(box)
    return out


def read_events(path) -> dict[str, list[Event]]:
    return {k: [s.as_event() for s in v] for k, v in read_sebbs(path).items()}


# ---------------------------------------------------------------------------
# curve exports
# ---------------------------------------------------------------------------


def write_roc(roc: Mapping[str, tuple], path) -> None:
    """Operating points as (threshold, class, efpr, etpr) rows, by class then threshold."""
    rows = []
    for label in sorted(roc):
        thr, efpr, etpr = (np.asarray(a, dtype=float) for a in roc[label])
        for i in np.argsort(-thr, kind="stable"):
            rows.append([fmt(thr[i]), label, fmt(efpr[i]), fmt(etpr[i])])
    _write(path, ["threshold", "class", "efpr", "etpr"], rows)


def write_combined(xs: np.ndarray, mu: np.ndarray, path) -> None:
    """Breakpoints of the combined curve: ``mu`` holds on ``[e_k, e_{k+1})``."""
    _write(path, ["e", "mu"], [[fmt(e), fmt(m)] for e, m in zip(xs, mu)])


# ---------------------------------------------------------------------------
# hyperparameters
# ---------------------------------------------------------------------------


def _class_params_to_dict(p: ClassParams) -> dict:
    return {k: getattr(p, k) for k in sorted(ClassParams.__dataclass_fields__)}


def params_to_dict(params: HyperParams) -> dict:
    return {
        "format": PARAMS_FORMAT,
        "default": _class_params_to_dict(params.default),
        "classes": {k: _class_params_to_dict(v) for k, v in sorted(params.classes.items())},
    }


def params_from_dict(doc: Mapping) -> HyperParams:
    if not isinstance(doc, Mapping) or doc.get("format") != PARAMS_FORMAT:
        raise ValueError(f"parameter document must declare format {PARAMS_FORMAT!r}")
    known = set(ClassParams.__dataclass_fields__)

    def build(d, where):
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"{where}: unknown parameters {sorted(unknown)}")
        return ClassParams(**d)

    default = build(doc.get("default", {}), "default")
    classes = {k: build({**_class_params_to_dict(default), **v}, k) for k, v in doc.get("classes", {}).items()}
    return HyperParams(classes, default)


def dumps_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_params(params: HyperParams, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps_json(params_to_dict(params)))


def read_params(path) -> HyperParams:
    with open(path, encoding="utf-8") as fh:
        return params_from_dict(json.load(fh))
