from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from sebbkit import dataio
from sebbkit.cli import REPORT_SCHEMA, main
from sebbkit.core import SEBB


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    code = main([
        "synth", "--out-dir", str(root), "--n-clips", "12", "--classes", "a,b",
        "--noise", "0.1", "--distractor-rate", "0.3", "--ramp-width", "0.3", "--seed", "4",
    ])
    assert code == 0
    return root


def corpus_flags(root: Path) -> list[str]:
    return ["--scores", str(root / "scores"), "--gt", str(root / "ground_truth.tsv"),
            "--durations", str(root / "durations.tsv")]


def gt_flags(root: Path) -> list[str]:
    return ["--gt", str(root / "ground_truth.tsv"), "--durations", str(root / "durations.tsv")]


def report_of(capsys) -> dict:
    out = capsys.readouterr().out
    return json.loads(out[out.index("\n\n") + 2:])


class TestConvert:
    def test_csebb_covers_every_plant(self, corpus, tmp_path):
        out = tmp_path / "sebbs.tsv"
        assert main(["convert", "--scores", str(corpus / "scores"), "--method", "csebb", "--out", str(out)]) == 0
        sebbs = dataio.read_sebbs(out)
        gt = dataio.read_ground_truth(corpus / "ground_truth.tsv", corpus / "durations.tsv")
        for clip, events in gt.events.items():
            for e in events:
                assert any(
                    s.class_label == e.class_label and s.onset < e.offset and s.offset > e.onset
                    for s in sebbs.get(clip, [])
                )

    def test_legacy_writes_events(self, corpus, tmp_path):
        out = tmp_path / "events.tsv"
        assert main(["convert", "--scores", str(corpus / "scores"), "--method", "legacy", "--out", str(out)]) == 0
        assert out.read_text().splitlines()[0] == "filename\tonset\toffset\tevent_label"

    def test_missing_params_file(self, corpus, tmp_path):
        code = main(["convert", "--scores", str(corpus / "scores"), "--params", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "o.tsv")])
        assert code == 2

    def test_empty_scores_dir(self, tmp_path, capsys):
        (tmp_path / "scores").mkdir()
        code = main(["convert", "--scores", str(tmp_path / "scores"), "--out", str(tmp_path / "o.tsv")])
        assert code == 1
        assert "no score files found" in capsys.readouterr().err

    def test_invalid_params_document(self, corpus, tmp_path):
        bad = tmp_path / "p.json"
        bad.write_text('{"format": "v1", "default": {"tau": -1}}')
        code = main(["convert", "--scores", str(corpus / "scores"), "--params", str(bad), "--out", str(tmp_path / "o.tsv")])
        assert code == 2

    def test_unknown_method_is_usage_error(self, corpus, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["convert", "--scores", str(corpus / "scores"), "--method", "magic", "--out", str(tmp_path / "o")])
        assert exc.value.code == 2


class TestEval:
    def perfect(self, corpus, tmp_path) -> Path:
        gt = dataio.read_ground_truth(corpus / "ground_truth.tsv", corpus / "durations.tsv")
        sebbs = {c: [SEBB(e.class_label, e.onset, e.offset, 1.0) for e in evs] for c, evs in gt.events.items()}
        path = tmp_path / "perfect.tsv"
        dataio.write_sebbs(sebbs, path)
        return path

    def test_perfect_predictions(self, corpus, tmp_path, capsys):
        preds = self.perfect(corpus, tmp_path)
        code = main(["eval", *gt_flags(corpus), "--predictions", str(preds), "--out-dir", str(tmp_path / "o")])
        assert code == 0
        report = report_of(capsys)
        assert report["schema"] == REPORT_SCHEMA
        assert report["results"]["psds1"]["value"] == 1.0
        assert report["results"]["cbf1"]["value"] == 1.0
        assert (tmp_path / "o" / "roc_psds1.tsv").exists()
        assert (tmp_path / "o" / "combined_nopsds1.tsv").exists()

    def test_table_format(self, corpus, tmp_path, capsys):
        preds = self.perfect(corpus, tmp_path)
        main(["eval", *gt_flags(corpus), "--predictions", str(preds), "--metric", "psds1", "--out-dir", str(tmp_path / "o")])
        table = capsys.readouterr().out.split("\n\n")[0].splitlines()
        assert table[0].split() == ["class", "psds1"]
        assert table[-1].split() == ["overall", "1.000"]

    def test_empty_predictions(self, corpus, tmp_path, capsys):
        preds = tmp_path / "empty.tsv"
        dataio.write_sebbs({}, preds)
        assert main(["eval", *gt_flags(corpus), "--predictions", str(preds), "--out-dir", str(tmp_path / "o")]) == 0
        results = report_of(capsys)["results"]
        assert results["psds1"]["value"] == 0.0 and results["cbf1"]["value"] == 0.0

    def test_deterministic(self, corpus, tmp_path, capsys):
        for name in ("r1", "r2"):
            args = ["eval", *corpus_flags(corpus), "--method", "tsebb", "--out-dir", str(tmp_path / name), "--plot"]
            assert main(args) == 0
        capsys.readouterr()
        for name in ("report.json", "roc_psds1.tsv", "combined_nopsds1.tsv", "psd_roc_psds1.png"):
            assert (tmp_path / "r1" / name).read_bytes() == (tmp_path / "r2" / name).read_bytes()

    def test_predictions_and_method_exclusive(self, corpus, tmp_path):
        preds = self.perfect(corpus, tmp_path)
        code = main(["eval", *corpus_flags(corpus), "--predictions", str(preds), "--method", "csebb",
                     "--out-dir", str(tmp_path / "o")])
        assert code == 2
        assert main(["eval", *gt_flags(corpus), "--out-dir", str(tmp_path / "o")]) == 2

    def test_missing_ground_truth(self, corpus, tmp_path):
        code = main(["eval", "--gt", str(tmp_path / "nope.tsv"), "--durations", str(corpus / "durations.tsv"),
                     "--predictions", str(self.perfect(corpus, tmp_path)), "--out-dir", str(tmp_path / "o")])
        assert code == 2

    def test_bad_eval_constant(self, corpus, tmp_path):
        code = main(["eval", *gt_flags(corpus), "--predictions", str(self.perfect(corpus, tmp_path)),
                     "--rho-dtc", "1.5", "--out-dir", str(tmp_path / "o")])
        assert code == 2

    def test_prediction_for_unknown_clip(self, corpus, tmp_path, capsys):
        preds = tmp_path / "p.tsv"
        dataio.write_sebbs({"ghost": [SEBB("a", 0, 1, 0.5)]}, preds)
        assert main(["eval", *gt_flags(corpus), "--predictions", str(preds), "--out-dir", str(tmp_path / "o")]) == 1
        assert "ghost" in capsys.readouterr().err


class TestTuneAndCv:
    def test_tuned_not_worse_than_default(self, corpus, tmp_path, capsys):
        params = tmp_path / "params.json"
        assert main(["tune", *corpus_flags(corpus), "--method", "csebb", "--metric", "psds1", "--out", str(params)]) == 0
        main(["eval", *corpus_flags(corpus), "--method", "csebb", "--metric", "psds1", "--out-dir", str(tmp_path / "d")])
        default = report_of(capsys)["results"]["psds1"]
        main(["eval", *corpus_flags(corpus), "--method", "csebb", "--metric", "psds1", "--params", str(params),
              "--out-dir", str(tmp_path / "t")])
        tuned = report_of(capsys)["results"]["psds1"]
        assert tuned["value"] >= default["value"]
        for label, value in default["per_class"].items():
            assert tuned["per_class"][label] >= value

    def test_grid_override(self, corpus, tmp_path):
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({"taus": [0.64], "gammas": [[0.2, "absolute"]]}))
        out = tmp_path / "p.json"
        assert main(["tune", *corpus_flags(corpus), "--method", "csebb", "--grid", str(grid), "--out", str(out)]) == 0
        p = dataio.read_params(out)
        assert p.for_class("a").tau == 0.64 and p.for_class("b").gamma_mode == "absolute"

    def test_invalid_grid(self, corpus, tmp_path):
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({"taus": []}))
        assert main(["tune", *corpus_flags(corpus), "--method", "csebb", "--grid", str(grid),
                     "--out", str(tmp_path / "p.json")]) == 2

    def test_cv_twice_identical(self, corpus, tmp_path, capsys):
        for name in ("a.json", "b.json"):
            args = ["cv", *corpus_flags(corpus), "--method", "tsebb", "--metric", "cbf1", "--folds", "3",
                    "--seed", "5", "--out", str(tmp_path / name)]
            assert main(args) == 0
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
        report = json.loads((tmp_path / "a.json").read_text())
        assert report["schema"] == REPORT_SCHEMA and len(report["folds"]) == 3
        assert "params" in report["folds"][0] and "pooled" in report
        assert "pooled cbf1" in capsys.readouterr().out

    def test_cv_more_folds_than_clips(self, corpus, tmp_path, capsys):
        code = main(["cv", *corpus_flags(corpus), "--method", "csebb", "--folds", "50", "--out", str(tmp_path / "r.json")])
        assert code == 2
        assert "exceeds the number of clips" in capsys.readouterr().err

    def test_threads_flag_and_env(self, corpus, tmp_path, monkeypatch):
        assert main(["tune", *corpus_flags(corpus), "--method", "medfilt", "--threads", "0",
                     "--out", str(tmp_path / "p.json")]) == 2
        monkeypatch.setenv("SEBBKIT_THREADS", "lots")
        assert main(["tune", *corpus_flags(corpus), "--method", "medfilt", "--out", str(tmp_path / "p.json")]) == 2
        monkeypatch.setenv("SEBBKIT_THREADS", "3")
        assert main(["tune", *corpus_flags(corpus), "--method", "medfilt", "--out", str(tmp_path / "p.json")]) == 0


class TestSynth:
    def test_presets(self, tmp_path):
        assert main(["synth", "--preset", "two-peak", "--out-dir", str(tmp_path / "tp")]) == 0
        assert (tmp_path / "tp" / "scores" / "two_peak.tsv").exists()

    def test_invalid_spec(self, tmp_path):
        assert main(["synth", "--frame-width", "0.03", "--out-dir", str(tmp_path / "x")]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "sebbkit", "synth", "--n-clips", "2", "--out-dir", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "2 clips" in proc.stdout
