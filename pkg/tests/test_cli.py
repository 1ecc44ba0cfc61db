import json

import numpy as np
from click.testing import CliRunner

from corrnmf import (
    DataMatrix,
    SolverConfig,
    load_corpus,
    make_synthetic_corpus,
    read_snapshot,
    save_corpus,
    write_snapshot,
)
from corrnmf.cli import main


def invoke(*args):
    runner = CliRunner()
    return runner.invoke(main, list(args), catch_exceptions=False)


def write_config(tmp_path, corpus_path, **overrides):
    cfg = {
        "corpus_path": str(corpus_path),
        "k_values": [2, 3],
        "repetitions": 2,
        "algorithms": ["mcc", "l2"],
        "master_seed": 1,
        "min_docs_per_topic": 2,
        "solver": {"max_iters": 25},
    }
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


class TestSynth:
    def test_writes_loadable_corpus(self, tmp_path):
        out = tmp_path / "corpus.jsonl"
        result = invoke(
            "synth", "--topics", "3", "--docs", "4", "--noise", "0.1",
            "--vocab", "120", "--out", str(out),
        )
        assert result.exit_code == 0
        corpus = load_corpus(out)
        assert len(corpus) == 12
        assert len(corpus.topics) == 3


class TestFactorize:
    def test_snapshot_input_json_output(self, tmp_path):
        rng = np.random.default_rng(0)
        matrix_path = tmp_path / "x.txt"
        write_snapshot(DataMatrix(rng.random((6, 8))), matrix_path)
        out = tmp_path / "fit.json"
        result = invoke(
            "factorize", "--input", str(matrix_path), "--k", "2",
            "--objective", "mcc", "--seed", "3", "--max-iters", "20",
            "--out", str(out), "--dump-factors", str(tmp_path / "f"),
        )
        assert result.exit_code == 0
        payload = json.loads(out.read_text())
        assert payload["config"]["objective"] == "mcc"
        assert payload["iterations_run"] == len(payload["objective_trace"])
        assert "final_sigma" in payload
        h = read_snapshot(tmp_path / "f_h.txt")
        assert h.shape == (6, 2)
        w = read_snapshot(tmp_path / "f_w.txt")
        assert w.shape == (2, 8)

    def test_jsonl_input_stdout(self, tmp_path):
        corpus = make_synthetic_corpus(2, 4, 80, 0.0, seed=1, doc_length=20)
        path = tmp_path / "c.jsonl"
        save_corpus(corpus, path)
        result = invoke(
            "factorize", "--input", str(path), "--k", "2", "--objective", "l2",
            "--max-iters", "15",
        )
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["converged"] in (True, False)
        assert "final_sigma" not in payload


class TestEval:
    def test_scores_label_files(self, tmp_path):
        pred = tmp_path / "pred.txt"
        truth = tmp_path / "truth.txt"
        pred.write_text("1\n1\n0\n0\n")
        truth.write_text("a\na\nb\nb\n")
        result = invoke("eval", "--pred", str(pred), "--truth", str(truth))
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["accuracy"] == 1.0

    def test_length_mismatch_fails(self, tmp_path):
        pred = tmp_path / "pred.txt"
        truth = tmp_path / "truth.txt"
        pred.write_text("0\n1\n")
        truth.write_text("0\n")
        runner = CliRunner()
        result = runner.invoke(main, ["eval", "--pred", str(pred), "--truth", str(truth)])
        assert result.exit_code != 0
        assert "length mismatch" in result.output


class TestRun:
    def test_full_run_writes_reports(self, tmp_path):
        corpus = make_synthetic_corpus(4, 6, 200, 0.1, seed=2, doc_length=30)
        corpus_path = tmp_path / "c.jsonl"
        save_corpus(corpus, corpus_path)
        config_path = write_config(tmp_path, corpus_path)
        out_dir = tmp_path / "reports"
        result = invoke("run", "--config", str(config_path), "--out", str(out_dir))
        assert result.exit_code == 0
        assert (out_dir / "runs.csv").exists()
        assert (out_dir / "summary.csv").exists()
        assert (out_dir / "config.json").exists()
        assert (out_dir / "accuracy_vs_k.png").exists()
        assert "MCC" in result.output

    def test_rerun_is_byte_identical(self, tmp_path):
        corpus = make_synthetic_corpus(3, 5, 150, 0.1, seed=4, doc_length=25)
        corpus_path = tmp_path / "c.jsonl"
        save_corpus(corpus, corpus_path)
        config_path = write_config(tmp_path, corpus_path, k_values=[2], repetitions=2)
        first = tmp_path / "r1"
        second = tmp_path / "r2"
        assert invoke("run", "--config", str(config_path), "--out", str(first)).exit_code == 0
        assert invoke("run", "--config", str(config_path), "--out", str(second)).exit_code == 0
        assert (first / "runs.csv").read_bytes() == (second / "runs.csv").read_bytes()
        assert (first / "summary.csv").read_bytes() == (second / "summary.csv").read_bytes()
