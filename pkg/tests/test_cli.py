import json
import subprocess
import sys

import pytest

from summrank.cli import RunConfig, load_config, run
from summrank.errors import ValidationError


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli-corpus")
    assert run([
        "synth", "--outdir", str(root), "--seed", "11", "--docs", "6",
        "--candidates", "4",
    ]) == 0
    return root


def run_pipeline(corpus_dir, outdir, *extra):
    return run([
        "pipeline", "--input", str(corpus_dir / "corpus.jsonl"),
        "--outdir", str(outdir), "--trials", "60", "--no-cache", *extra,
    ])


class TestRunConfig:
    def test_defaults_round_trip(self):
        config = RunConfig()
        assert RunConfig.from_dict(config.to_dict()) == config

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValidationError, match="mystery"):
            RunConfig.from_dict({"mystery": 1})

    def test_digest_changes_with_settings(self):
        a = RunConfig()
        b = RunConfig(pseudo="random3")
        assert a.digest() != b.digest()

    def test_flag_overrides(self, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps({"pseudo": "lead3", "seed": 1}))

        class Args:
            pseudo = "random3"
            seed = 9
            strategies = "first,oracle"
            normalization = None
            trials = 25
            export_x = None
            threads = None
            cache_dir = None
            no_cache = True

        config = load_config(str(config_path), Args())
        assert config.pseudo == "random3"
        assert config.seed == 9
        assert config.estimation.seed == 9
        assert config.estimation.trials_per_search == 25
        assert config.strategies == ("first", "oracle")
        assert config.use_cache is False


class TestPipeline:
    def test_artifacts_and_headers(self, corpus_dir, tmp_path):
        out = tmp_path / "run"
        assert run_pipeline(corpus_dir, out, "--export-labels") == 0
        expected = [
            "features.jsonl", "pseudo_targets.jsonl", "coefficients.json",
            "estimation_log.csv", "selections.jsonl", "report.csv", "report.txt",
            "recall.csv", "overlap.csv", "abstractiveness.csv", "labels.jsonl",
        ]
        for name in expected:
            path = out / name
            assert path.exists(), name
            assert "provenance" in path.read_text()[:200], name

    def test_pipeline_equals_stage_by_stage(self, corpus_dir, tmp_path):
        whole = tmp_path / "whole"
        staged = tmp_path / "staged"
        assert run_pipeline(corpus_dir, whole) == 0

        corpus = str(corpus_dir / "corpus.jsonl")
        base = ["--trials", "60", "--no-cache", "--outdir", str(staged)]
        assert run(["features", "--input", corpus, *base]) == 0
        assert run(["pseudo-targets", "--input", corpus, *base]) == 0
        assert run(["estimate", "--input", corpus, *base]) == 0
        assert run([
            "rerank", "--features", str(staged / "features.jsonl"),
            "--coefficients", str(staged / "coefficients.json"), *base,
        ]) == 0
        assert run([
            "evaluate", "--input", corpus,
            "--features", str(staged / "features.jsonl"),
            "--selections", str(staged / "selections.jsonl"), *base,
        ]) == 0

        for name in (
            "features.jsonl", "pseudo_targets.jsonl", "coefficients.json",
            "selections.jsonl", "report.csv", "recall.csv", "overlap.csv",
        ):
            assert (whole / name).read_bytes() == (staged / name).read_bytes(), name

    def test_strategy_flag_controls_report_rows(self, corpus_dir, tmp_path):
        out = tmp_path / "run"
        assert run_pipeline(
            corpus_dir, out, "--pseudo", "lead3",
            "--strategies", "first,random,oracle,summscore",
        ) == 0
        lines = (out / "report.csv").read_text().splitlines()
        strategies = [line.split(",")[0] for line in lines[2:]]
        assert strategies == ["first", "random", "oracle", "summscore"]

    def test_zero_candidate_doc_fails_validation(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text(
            json.dumps({"id": "ok", "source": "s", "candidates": ["c"]}) + "\n"
            + json.dumps({"id": "broken", "source": "s", "candidates": []}) + "\n"
        )
        with pytest.raises(ValidationError, match="broken"):
            run(["pipeline", "--input", str(bad), "--outdir", str(tmp_path / "o")])

    def test_exit_code_2_for_validation(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text(json.dumps({"id": "x", "source": "s", "candidates": []}) + "\n")
        proc = subprocess.run(
            [sys.executable, "-m", "summrank.cli", "pipeline",
             "--input", str(bad), "--outdir", str(tmp_path / "o")],
            capture_output=True, text=True,
        )
        assert proc.returncode == 2
        assert "x" in proc.stderr

    def test_cache_round_trip_identical_features(self, corpus_dir, tmp_path):
        cache = tmp_path / "cache"
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        corpus = str(corpus_dir / "corpus.jsonl")
        for out in (out1, out2):
            assert run([
                "features", "--input", corpus, "--outdir", str(out),
                "--cache-dir", str(cache),
            ]) == 0
        assert (out1 / "features.jsonl").read_bytes() == (out2 / "features.jsonl").read_bytes()
        assert cache.exists()

    def test_max_feature_strategy_row(self, corpus_dir, tmp_path):
        out = tmp_path / "run"
        assert run_pipeline(
            corpus_dir, out,
            "--strategies", "first,max-feature:bleu_src,summscore",
        ) == 0
        lines = (out / "report.csv").read_text().splitlines()
        strategies = [line.split(",")[0] for line in lines[2:]]
        assert strategies == ["first", "max-feature:bleu_src", "summscore"]

    def test_refless_corpus_skips_evaluation(self, tmp_path):
        refless = tmp_path / "refless.jsonl"
        refless.write_text(
            json.dumps({"id": "a", "source": "one two three\nfour five six",
                        "candidates": ["one two three", "zz qq"]}) + "\n"
        )
        out = tmp_path / "out"
        assert run([
            "pipeline", "--input", str(refless), "--outdir", str(out),
            "--trials", "20", "--no-cache",
        ]) == 0
        assert (out / "selections.jsonl").exists()
        assert not (out / "report.csv").exists()

    def test_exit_code_3_for_unreachable_scorer(self, corpus_dir, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps({
            "scorers": ["deadscorer"],
            "endpoints": {"deadscorer": "http://127.0.0.1:9"},
            "use_cache": False,
        }))
        proc = subprocess.run(
            [sys.executable, "-m", "summrank.cli", "features",
             "--input", str(corpus_dir / "corpus.jsonl"),
             "--outdir", str(tmp_path / "o"), "--config", str(config_path)],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 3
        assert not (tmp_path / "o" / "features.jsonl").exists()

    def test_missing_pseudo_target_fails(self, corpus_dir, tmp_path):
        out = tmp_path / "run"
        corpus = str(corpus_dir / "corpus.jsonl")
        base = ["--outdir", str(out), "--no-cache", "--trials", "10"]
        assert run(["features", "--input", corpus, *base]) == 0
        (out / "pseudo_targets.jsonl").write_text("")
        with pytest.raises(ValidationError, match="missing documents"):
            run(["estimate", "--input", corpus, *base])
