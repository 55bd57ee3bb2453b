"""Command-line interface.

Exit codes: 0 on success, 1 for data errors (unreadable or inconsistent
inputs), 2 for configuration errors (bad flags, missing files, invalid
parameter documents). Diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from sebbkit import dataio
from sebbkit.core import EvalConfig, HyperParams
from sebbkit.metrics import combined_curve
from sebbkit.postproc import LEGACY_METHODS, METHODS, legacy_events
from sebbkit.synth import SynthSpec, acceptance_spec, generate, two_peak_scenario, write_corpus
from sebbkit.tuning import (
    METRICS,
    Evaluation,
    Grid,
    cross_validate,
    evaluate,
    evaluate_sebbs,
    grid_search,
    predict_all,
)

REPORT_SCHEMA = "sebbkit.report/v1"
THREADS_ENV = "SEBBKIT_THREADS"
PSDS_METRICS = ("psds1", "nopsds1")

log = logging.getLogger("sebbkit")


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be positive")
    return value


def _eval_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("evaluation constants")
    d = EvalConfig()
    g.add_argument("--rho-dtc", type=float, default=d.rho_dtc)
    g.add_argument("--rho-gtc", type=float, default=d.rho_gtc)
    g.add_argument("--alpha-st", type=float, default=d.alpha_st)
    g.add_argument("--e-max", type=float, default=d.e_max, help="FP per hour bound of PSD-ROC curves")
    g.add_argument("--onset-collar", type=float, default=d.onset_collar)
    g.add_argument("--offset-collar-floor", type=float, default=d.offset_collar_floor)
    g.add_argument("--offset-collar-frac", type=float, default=d.offset_collar_frac)
    g.add_argument("--sample-std", action="store_true", help="use the sample instead of the population std")
    return p


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--threads", type=int, default=None,
                   help=f"maximum worker threads (default: ${THREADS_ENV} or 1)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _corpus_flags(p: argparse.ArgumentParser, scores_required: bool = True) -> None:
    p.add_argument("--scores", type=Path, required=scores_required, help="directory of per-clip score TSVs")
    p.add_argument("--gt", type=Path, required=True, help="ground-truth events TSV")
    p.add_argument("--durations", type=Path, required=True, help="clip durations TSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sebbkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common, ev = _common_flags(), _eval_flags()

    p = sub.add_parser("convert", parents=[common], help="turn frame scores into SEBBs or events")
    p.add_argument("--scores", type=Path, required=True)
    p.add_argument("--params", type=Path, help="HyperParams JSON (default: built-in defaults)")
    p.add_argument("--method", choices=METHODS, default="csebb")
    p.add_argument("--out", type=Path, required=True, help="output TSV")

    p = sub.add_parser("eval", parents=[common, ev], help="score predictions against ground truth")
    _corpus_flags(p, scores_required=False)
    p.add_argument("--predictions", type=Path, help="SEBB or event TSV to evaluate")
    p.add_argument("--method", choices=METHODS, help="predict from --scores with this method")
    p.add_argument("--params", type=Path)
    p.add_argument("--metric", choices=METRICS, action="append",
                   help="metric to compute; repeatable (default: all)")
    p.add_argument("--out-dir", type=Path, required=True, help="directory for report and ROC exports")
    p.add_argument("--plot", action="store_true", help="also render PSD-ROC figures as PNG")

    for name, helptext in (("tune", "grid-search class-wise parameters"),
                           ("cv", "k-fold cross-validation")):
        p = sub.add_parser(name, parents=[common, ev], help=helptext)
        _corpus_flags(p)
        p.add_argument("--method", choices=METHODS, required=True)
        p.add_argument("--metric", choices=METRICS, default="psds1")
        p.add_argument("--grid", type=Path, help="JSON object overriding Grid fields")
        p.add_argument("--out", type=Path, required=True,
                       help="params JSON" if name == "tune" else "report JSON")
        if name == "cv":
            p.add_argument("--folds", type=int, default=5)
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("synth", parents=[common], help="write a synthetic corpus")
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--preset", choices=("custom", "acceptance", "two-peak"), default="custom")
    d = SynthSpec()
    p.add_argument("--n-clips", type=int, default=d.n_clips)
    p.add_argument("--clip-duration", type=float, default=d.clip_duration)
    p.add_argument("--frame-width", type=float, default=d.frame_width)
    p.add_argument("--classes", default=",".join(d.classes), help="comma-separated labels")
    p.add_argument("--event-rate", type=float, default=d.event_rate)
    p.add_argument("--heights", default=",".join(str(h) for h in d.heights))
    p.add_argument("--ramp-width", type=float, default=d.ramp_width)
    p.add_argument("--ramp-anchor", type=float, default=d.ramp_anchor)
    p.add_argument("--noise", type=float, default=d.noise)
    p.add_argument("--distractor-rate", type=float, default=d.distractor_rate)
    p.add_argument("--seed", type=int, default=d.seed)
    return parser


def _config(args) -> EvalConfig:
    try:
        return EvalConfig(
            rho_dtc=args.rho_dtc, rho_gtc=args.rho_gtc, alpha_st=args.alpha_st, e_max=args.e_max,
            onset_collar=args.onset_collar, offset_collar_floor=args.offset_collar_floor,
            offset_collar_frac=args.offset_collar_frac, population_std=not args.sample_std,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _need(path: Path | None, what: str, directory: bool = False) -> None:
    if path is None:
        return
    if directory and not path.is_dir():
        raise ConfigError(f"{what} {path} is not a directory")
    if not directory and not path.is_file():
        raise ConfigError(f"{what} {path} does not exist")


def _params(path: Path | None) -> HyperParams:
    if path is None:
        return HyperParams()
    _need(path, "params file")
    try:
        return dataio.read_params(path)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: invalid parameter document: {exc}") from None


def _grid(path: Path | None, metric: str) -> Grid:
    doc = {}
    if path is not None:
        _need(path, "grid file")
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
            return Grid(**{**doc, "metric": metric})
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{path}: invalid grid: {exc}") from None
    return Grid(metric=metric)


def _threads(args) -> int:
    threads = _default_threads() if args.threads is None else args.threads
    if threads < 1:
        raise ConfigError("--threads must be positive")
    return threads


def _load_corpus(args):
    tracks = dataio.read_scores(args.scores)
    gt = dataio.read_ground_truth(args.gt, args.durations)
    if gt.n_repaired:
        print(f"note: {gt.n_repaired} reference event(s) clipped to the clip duration", file=sys.stderr)
    return tracks, gt


# ---------------------------------------------------------------------------
# reporting
# ---------------------------------------------------------------------------


def _report(command: str, body: dict) -> str:
    return dataio.dumps_json({"schema": REPORT_SCHEMA, "command": command, **body})


def _table(evaluations: dict[str, Evaluation]) -> str:
    metrics = list(evaluations)
    labels = sorted({k for e in evaluations.values() for k in e.per_class})
    width = max([len("class")] + [len(k) for k in labels] + [len("overall")])
    lines = ["class".ljust(width) + "".join(f"  {m:>8}" for m in metrics)]
    for label in labels:
        cells = [evaluations[m].per_class.get(label) for m in metrics]
        lines.append(label.ljust(width) + "".join(
            f"  {'-':>8}" if c is None else f"  {c:8.3f}" for c in cells))
    lines.append("overall".ljust(width) + "".join(f"  {evaluations[m].value:8.3f}" for m in metrics))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_convert(args) -> int:
    _need(args.scores, "scores directory", directory=True)
    params = _params(args.params)
    tracks = dataio.read_scores(args.scores)
    if args.method in LEGACY_METHODS:
        events = {c: legacy_events(t, params, args.method) for c, t in sorted(tracks.items())}
        dataio.write_events(events, args.out)
        n = sum(len(v) for v in events.values())
        print(f"{args.method}: {n} events from {len(tracks)} clips written to {args.out}")
    else:
        sebbs = predict_all(tracks, params, args.method)
        dataio.write_sebbs(sebbs, args.out)
        n = sum(len(v) for v in sebbs.values())
        print(f"{args.method}: {n} SEBBs from {len(tracks)} clips written to {args.out}")
    return 0


def cmd_eval(args) -> int:
    config = _config(args)
    for path, what in ((args.gt, "ground-truth file"), (args.durations, "durations file")):
        _need(path, what)
    if (args.predictions is None) == (args.method is None):
        raise ConfigError("give exactly one of --predictions or --method")
    if args.method is not None and args.scores is None:
        raise ConfigError("--method needs --scores")
    _need(args.predictions, "predictions file")
    _need(args.scores, "scores directory", directory=True)
    params = _params(args.params)
    metrics = list(dict.fromkeys(args.metric or METRICS))
    gt = dataio.read_ground_truth(args.gt, args.durations)
    if args.predictions is not None:
        sebbs = dataio.read_sebbs(args.predictions)
        results = {m: evaluate_sebbs(sebbs, gt, m, config, params) for m in metrics}
        source = {"predictions": args.predictions.name}
    else:
        tracks = dataio.read_scores(args.scores)
        results = {m: evaluate(tracks, gt, params, args.method, m, config) for m in metrics}
        source = {"method": args.method}
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for metric, ev in results.items():
        if metric not in PSDS_METRICS:
            continue
        dataio.write_roc(ev.roc, args.out_dir / f"roc_{metric}.tsv")
        xs, mu = combined_curve(ev.curve, config)
        dataio.write_combined(xs, mu, args.out_dir / f"combined_{metric}.tsv")
        if args.plot:
            from sebbkit.plotting import plot_psd_roc

            plot_psd_roc(ev.curve, args.out_dir / f"psd_roc_{metric}.png", (xs, mu), metric)
    report = _report("eval", {**source, "results": {m: e.to_dict() for m, e in results.items()}})
    (args.out_dir / "report.json").write_text(report, encoding="utf-8")
    print(_table(results))
    print()
    print(report, end="")
    return 0


def cmd_tune(args) -> int:
    config = _config(args)
    _need(args.scores, "scores directory", directory=True)
    _need(args.gt, "ground-truth file")
    _need(args.durations, "durations file")
    grid = _grid(args.grid, args.metric)
    threads = _threads(args)
    tracks, gt = _load_corpus(args)
    params = grid_search(tracks, gt, grid, args.method, config, threads)
    dataio.write_params(params, args.out)
    print(f"tuned {args.method} for {args.metric} on {len(tracks)} clips; parameters written to {args.out}")
    return 0


def cmd_cv(args) -> int:
    config = _config(args)
    _need(args.scores, "scores directory", directory=True)
    _need(args.gt, "ground-truth file")
    _need(args.durations, "durations file")
    if args.folds < 2:
        raise ConfigError("--folds must be at least 2")
    grid = _grid(args.grid, args.metric)
    threads = _threads(args)
    tracks, gt = _load_corpus(args)
    if args.folds > len(tracks):
        raise ConfigError(f"--folds {args.folds} exceeds the number of clips ({len(tracks)})")
    report = cross_validate(tracks, gt, grid, args.method, args.folds, args.seed, config, threads)
    text = _report("cv", report.to_dict())
    args.out.write_text(text, encoding="utf-8")
    width = len(str(args.folds))
    for f in report.folds:
        print(f"fold {f.index:>{width}}  {len(f.clips):4d} clips  {args.metric} {f.evaluation.value:.3f}")
    print(f"pooled {args.metric} {report.pooled.value:.3f}")
    return 0


def cmd_synth(args) -> int:
    if args.preset == "two-peak":
        track, gt = two_peak_scenario()
        write_corpus({track.clip_id: track}, gt, args.out_dir)
        print(f"two-peak scenario written to {args.out_dir}")
        return 0
    if args.preset == "acceptance":
        spec = acceptance_spec()
    else:
        try:
            spec = SynthSpec(
                n_clips=args.n_clips, clip_duration=args.clip_duration, frame_width=args.frame_width,
                classes=tuple(c for c in args.classes.split(",") if c),
                event_rate=args.event_rate,
                heights=tuple(float(h) for h in args.heights.split(",") if h),
                ramp_width=args.ramp_width, ramp_anchor=args.ramp_anchor, noise=args.noise,
                distractor_rate=args.distractor_rate, seed=args.seed,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    tracks, gt = generate(spec)
    write_corpus(tracks, gt, args.out_dir)
    n = sum(len(v) for v in gt.events.values())
    print(f"{len(tracks)} clips with {n} events written to {args.out_dir}")
    return 0


COMMANDS = {"convert": cmd_convert, "eval": cmd_eval, "tune": cmd_tune, "cv": cmd_cv, "synth": cmd_synth}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be positive")
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"sebbkit {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"sebbkit {args.command}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
