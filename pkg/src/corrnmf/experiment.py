"""Repetition-averaged clustering experiments.

For each requested cluster count ``k`` the harness samples ``k`` topics,
builds a per-run tf-idf matrix, factorizes it with every selected algorithm
from the same seed (paired comparison), clusters the coefficients, scores
accuracy, repeats, and averages.  Per-repetition seeds are derived from the
master seed through a counter-based scheme, so adding k-values never
perturbs other runs.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace, asdict
from pathlib import Path

import numpy as np

from .cluster import LabelAssignment, accuracy, kmeans
from .solvers import OBJECTIVES, SolverConfig, factorize
from .text import Corpus, Document, build_tfidf, filter_topics, load_corpus

__all__ = [
    "ExperimentConfig",
    "RunRecord",
    "RunFailure",
    "ExperimentResult",
    "sample_topics",
    "make_synthetic_corpus",
    "run_experiment",
    "average_accuracy",
    "emit_report",
]


@dataclass(frozen=True)
class ExperimentConfig:
    corpus_path: str
    k_values: tuple[int, ...]
    repetitions: int = 20
    algorithms: tuple[str, ...] = OBJECTIVES
    master_seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    kmeans_restarts: int = 10
    kmeans_max_iters: int = 100
    min_docs_per_topic: int = 5
    corpus_format: str | None = None
    # Wall-clock measurement is opt-in: with timing off, report files are a
    # pure function of (corpus bytes, config) and rerun byte-identically.
    timing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        object.__setattr__(
            self, "algorithms", tuple(str(a).lower() for a in self.algorithms)
        )
        if not self.k_values or any(k < 1 for k in self.k_values):
            raise ValueError("k_values must be a non-empty list of positive counts")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        if not self.algorithms:
            raise ValueError("algorithms must not be empty")
        unknown = [a for a in self.algorithms if a not in OBJECTIVES]
        if unknown:
            raise ValueError(f"unknown algorithms {unknown}; expected subset of {OBJECTIVES}")
        if self.master_seed < 0:
            raise ValueError("master_seed must be nonnegative")
        if self.min_docs_per_topic < 1:
            raise ValueError("min_docs_per_topic must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        solver = data.pop("solver", None)
        if solver is not None:
            data["solver"] = SolverConfig(**solver)
        kmeans_opts = data.pop("kmeans", None)
        if kmeans_opts is not None:
            data["kmeans_restarts"] = kmeans_opts.get("restarts", 10)
            data["kmeans_max_iters"] = kmeans_opts.get("max_iters", 100)
        return cls(**data)

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["k_values"] = list(self.k_values)
        out["algorithms"] = list(self.algorithms)
        return out


@dataclass(frozen=True)
class RunRecord:
    k: int
    algorithm: str
    rep: int
    topics: tuple[str, ...]
    accuracy: float
    iterations: int
    seconds: float


@dataclass(frozen=True)
class RunFailure:
    k: int
    algorithm: str
    rep: int
    message: str


@dataclass
class ExperimentResult:
    records: list[RunRecord]
    failures: list[RunFailure]
    table: list[dict]


def sample_topics(corpus: Corpus, k: int, seed: int) -> Corpus:
    """Uniform random k-subset of topics, keeping all and only their documents."""
    topics = corpus.topics
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > len(topics):
        raise ValueError(f"k={k} exceeds the corpus topic count {len(topics)}")
    rng = np.random.default_rng(seed)
    chosen = {topics[i] for i in rng.choice(len(topics), size=k, replace=False)}
    return Corpus(tuple(doc for doc in corpus.documents if doc.label in chosen))


_TERM_LETTERS = "bcdfghjklmnpqrstvwz"


def _term_name(index: int) -> str:
    # Consonant-coded with an 'ox' tail: survives stemming and stopword removal.
    code = ""
    n = index
    while True:
        code = _TERM_LETTERS[n % len(_TERM_LETTERS)] + code
        n //= len(_TERM_LETTERS)
        if n == 0:
            break
    return code + "ox"


def make_synthetic_corpus(
    k_topics: int,
    docs_per_topic: int,
    vocab_size: int,
    noise_level: float,
    seed: int,
    doc_length: int = 60,
) -> Corpus:
    """Planted-topic corpus: disjoint signature terms per topic plus a shared
    background pool sampled with probability ``noise_level``."""
    if k_topics < 1 or docs_per_topic < 1 or vocab_size < 1 or doc_length < 1:
        raise ValueError("all counts must be >= 1")
    if not 0.0 <= noise_level < 1.0:
        raise ValueError(f"noise_level must be in [0, 1), got {noise_level}")
    background_size = max(2, vocab_size // 5)
    signature_size = (vocab_size - background_size) // k_topics
    if signature_size < 2:
        raise ValueError(
            f"vocab_size={vocab_size} too small to give each of {k_topics} topics "
            "at least 2 signature terms"
        )
    terms = [_term_name(i) for i in range(vocab_size)]
    background = terms[:background_size]
    rng = np.random.default_rng(seed)
    docs: list[Document] = []
    for t in range(k_topics):
        label = f"topic{t}"
        lo = background_size + t * signature_size
        signature = terms[lo : lo + signature_size]
        for j in range(docs_per_topic):
            use_background = rng.random(doc_length) < noise_level
            bg_draw = rng.integers(0, background_size, size=doc_length)
            sig_draw = rng.integers(0, signature_size, size=doc_length)
            tokens = [
                background[bg_draw[i]] if use_background[i] else signature[sig_draw[i]]
                for i in range(doc_length)
            ]
            docs.append(Document(f"{label}-{j:03d}", label, " ".join(tokens)))
    return Corpus(tuple(docs))


def _seed_from(child: np.random.SeedSequence) -> int:
    return int(child.generate_state(1, np.uint64)[0])


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Execute the full protocol and collect per-run records plus the
    averaged accuracy table.  Failures are recorded per run; the experiment
    continues."""
    corpus = filter_topics(
        load_corpus(cfg.corpus_path, cfg.corpus_format), cfg.min_docs_per_topic
    )
    n_topics = len(corpus.topics)
    too_large = [k for k in cfg.k_values if k > n_topics]
    if too_large:
        raise ValueError(
            f"k values {too_large} exceed the corpus topic count {n_topics}"
        )
    records: list[RunRecord] = []
    failures: list[RunFailure] = []
    for k in cfg.k_values:
        for rep in range(cfg.repetitions):
            seeds = np.random.SeedSequence([cfg.master_seed, k, rep]).spawn(3)
            topic_seed, init_seed, kmeans_seed = (_seed_from(c) for c in seeds)
            sub = sample_topics(corpus, k, topic_seed)
            x, _ = build_tfidf(sub)
            topic_index = {t: i for i, t in enumerate(sub.topics)}
            truth = np.array([topic_index[doc.label] for doc in sub.documents])
            for algorithm in cfg.algorithms:
                started = time.perf_counter()
                try:
                    solver_cfg = replace(cfg.solver, seed=init_seed, objective=algorithm)
                    fit = factorize(x, k, solver_cfg)
                    labels = kmeans(
                        fit.factors.w,
                        k,
                        seed=kmeans_seed,
                        restarts=cfg.kmeans_restarts,
                        max_iters=cfg.kmeans_max_iters,
                    )
                    acc = accuracy(LabelAssignment(labels, truth))
                except Exception as exc:
                    failures.append(RunFailure(k, algorithm, rep, str(exc)))
                    continue
                seconds = time.perf_counter() - started if cfg.timing else 0.0
                records.append(
                    RunRecord(k, algorithm, rep, sub.topics, acc, fit.iterations_run, seconds)
                )
    return ExperimentResult(records, failures, average_accuracy(records, cfg.algorithms))


def average_accuracy(
    records: list[RunRecord], algorithms: tuple[str, ...] | None = None
) -> list[dict]:
    """One row per k with the mean accuracy per algorithm."""
    if algorithms is None:
        seen: list[str] = []
        for record in records:
            if record.algorithm not in seen:
                seen.append(record.algorithm)
        algorithms = tuple(seen)
    rows = []
    for k in sorted({record.k for record in records}):
        row: dict = {"k": k}
        for algorithm in algorithms:
            values = [
                r.accuracy for r in records if r.k == k and r.algorithm == algorithm
            ]
            row[algorithm] = sum(values) / len(values) if values else None
        rows.append(row)
    return rows


def emit_report(
    records: list[RunRecord],
    out_dir,
    config: ExperimentConfig | None = None,
    render_figure: bool = True,
) -> dict[str, Path]:
    """Write the per-run CSV, the averaged table, a JSON config echo, and the
    accuracy-vs-k figure.  Re-emitting the same records is byte-identical."""
    if not records:
        raise ValueError("no run records to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    algorithms = config.algorithms if config is not None else None
    table = average_accuracy(records, algorithms)
    if algorithms is None:
        algorithms = tuple(key for key in table[0] if key != "k")

    runs_path = out / "runs.csv"
    with open(runs_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("k,algorithm,rep,accuracy,iters,seconds\n")
        for r in sorted(records, key=lambda r: (r.k, r.algorithm, r.rep)):
            fh.write(
                f"{r.k},{r.algorithm},{r.rep},{float(r.accuracy)!r},"
                f"{r.iterations},{float(r.seconds)!r}\n"
            )
    paths["runs"] = runs_path

    summary_path = out / "summary.csv"
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("k," + ",".join(algorithms) + "\n")
        for row in table:
            cells = [str(row["k"])]
            for algorithm in algorithms:
                value = row.get(algorithm)
                cells.append("" if value is None else repr(float(value)))
            fh.write(",".join(cells) + "\n")
    paths["summary"] = summary_path

    config_path = out / "config.json"
    echo = {
        "config": config.to_dict() if config is not None else None,
        "n_records": len(records),
    }
    with open(config_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(echo, indent=2, sort_keys=True) + "\n")
    paths["config"] = config_path

    if render_figure:
        from .figures import render_accuracy_figure

        figure_path = out / "accuracy_vs_k.png"
        render_accuracy_figure(table, algorithms, figure_path)
        paths["figure"] = figure_path
    return paths
