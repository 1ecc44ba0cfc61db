"""Command-line interface: experiment runner, single factorization,
synthetic corpus generation, and label-file evaluation."""

from __future__ import annotations

import json
import sys
from dataclasses import asdict
from pathlib import Path

import click
import numpy as np

from .cluster import LabelAssignment, evaluate
from .experiment import ExperimentConfig, emit_report, make_synthetic_corpus, run_experiment
from .matrix import DataMatrix, read_snapshot, write_snapshot
from .solvers import OBJECTIVES, SolverConfig, factorize
from .text import build_tfidf, load_corpus, save_corpus


@click.group()
def main():
    """Correntropy-based NMF toolkit for document clustering."""


def _load_input_matrix(path: str) -> DataMatrix:
    if path.endswith(".jsonl"):
        corpus = load_corpus(path, "jsonl")
        matrix, _ = build_tfidf(corpus)
        return matrix
    return read_snapshot(path)


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Experiment config JSON (mirrors ExperimentConfig).")
@click.option("--out", "out_dir", default="reports", show_default=True,
              help="Directory for runs.csv, summary.csv, config.json and the figure.")
@click.option("--figure/--no-figure", default=True, show_default=True,
              help="Render the accuracy-vs-k figure next to the CSVs.")
def run(config_path, out_dir, figure):
    """Run the repetition-averaged clustering experiment."""
    cfg = ExperimentConfig.from_json_file(config_path)
    result = run_experiment(cfg)
    if result.records:
        paths = emit_report(result.records, out_dir, config=cfg, render_figure=figure)
        click.echo(f"wrote {', '.join(str(p) for p in paths.values())}")
        algorithms = cfg.algorithms
        click.echo("k\t" + "\t".join(a.upper() for a in algorithms))
        for row in result.table:
            cells = [
                "-" if row.get(a) is None else f"{row[a]:.4f}" for a in algorithms
            ]
            click.echo(f"{row['k']}\t" + "\t".join(cells))
    if result.failures:
        click.echo(f"{len(result.failures)} run(s) failed:", err=True)
        for failure in result.failures:
            click.echo(
                f"  k={failure.k} {failure.algorithm} rep={failure.rep}: {failure.message}",
                err=True,
            )
        sys.exit(1)


@main.command("factorize")
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Matrix snapshot, or a .jsonl corpus to vectorize first.")
@click.option("--k", required=True, type=int, help="Factorization rank.")
@click.option("--objective", type=click.Choice(OBJECTIVES), default="mcc",
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-iters", type=int, default=200, show_default=True)
@click.option("--rel-tol", type=float, default=1e-6, show_default=True)
@click.option("--theta", type=float, default=1.0, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write the result JSON here instead of stdout.")
@click.option("--dump-factors", "dump_prefix", default=None,
              help="Also write <prefix>_h.txt and <prefix>_w.txt snapshots.")
def factorize_cmd(input_path, k, objective, seed, max_iters, rel_tol, theta,
                  out_path, dump_prefix):
    """Factorize one matrix and report the fit."""
    matrix = _load_input_matrix(input_path)
    cfg = SolverConfig(
        max_iters=max_iters, rel_tol=rel_tol, seed=seed, theta=theta,
        objective=objective,
    )
    fit = factorize(matrix, k, cfg)
    payload = {"config": asdict(cfg), **fit.to_json_dict()}
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)
    if dump_prefix:
        write_snapshot(DataMatrix(fit.factors.h), f"{dump_prefix}_h.txt")
        write_snapshot(DataMatrix(fit.factors.w), f"{dump_prefix}_w.txt")
        click.echo(f"wrote {dump_prefix}_h.txt and {dump_prefix}_w.txt")


@main.command()
@click.option("--topics", required=True, type=int, help="Number of planted topics.")
@click.option("--docs", required=True, type=int, help="Documents per topic.")
@click.option("--noise", required=True, type=float,
              help="Background-vocabulary fraction in [0, 1).")
@click.option("--vocab", type=int, default=300, show_default=True)
@click.option("--doc-length", type=int, default=60, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def synth(topics, docs, noise, vocab, doc_length, seed, out_path):
    """Generate a planted-topic synthetic corpus as jsonl."""
    corpus = make_synthetic_corpus(topics, docs, vocab, noise, seed, doc_length)
    save_corpus(corpus, out_path)
    click.echo(f"wrote {len(corpus)} documents over {topics} topics to {out_path}")


def _read_labels(path: str) -> list[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    labels = [line.strip() for line in lines if line.strip()]
    if not labels:
        raise click.ClickException(f"{path} contains no labels")
    return labels


@main.command("eval")
@click.option("--pred", "pred_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Predicted labels, one per line.")
@click.option("--truth", "truth_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Ground-truth labels, one per line.")
def eval_cmd(pred_path, truth_path):
    """Score predicted labels against ground truth."""
    pred_raw = _read_labels(pred_path)
    truth_raw = _read_labels(truth_path)
    if len(pred_raw) != len(truth_raw):
        raise click.ClickException(
            f"length mismatch: {len(pred_raw)} predicted vs {len(truth_raw)} truth labels"
        )
    pred_index = {label: i for i, label in enumerate(sorted(set(pred_raw)))}
    truth_index = {label: i for i, label in enumerate(sorted(set(truth_raw)))}
    if len(pred_index) != len(truth_index):
        raise click.ClickException(
            f"distinct label counts differ: {len(pred_index)} predicted clusters vs "
            f"{len(truth_index)} topics"
        )
    assignment = LabelAssignment(
        np.array([pred_index[v] for v in pred_raw]),
        np.array([truth_index[v] for v in truth_raw]),
    )
    report = evaluate(assignment)
    click.echo(json.dumps(report.to_json_dict(), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
