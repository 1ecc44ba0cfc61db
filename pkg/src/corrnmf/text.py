"""Turn a labeled document corpus into a nonnegative tf-idf matrix.

The pipeline is deliberately boring: lowercase, split on non-alphabetic
characters, drop stopwords, Porter-stem, drop leftovers shorter than two
characters.  Weights are raw term count times ``ln(N / df)`` with column L2
normalization, so the matrix stays nonnegative and every step is a pure
function of the corpus bytes.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse

from .matrix import DataMatrix
from .stemming import porter_stem
from .stopwords import STOPWORDS

__all__ = [
    "Document",
    "Corpus",
    "Vocabulary",
    "preprocess",
    "build_tfidf",
    "load_corpus",
    "save_corpus",
    "filter_topics",
    "write_vocabulary",
]

_TOKEN = re.compile(r"[a-z]+")


@dataclass(frozen=True)
class Document:
    id: str
    label: str
    text: str


@dataclass(frozen=True)
class Corpus:
    """Documents with unique ids, each carrying exactly one topic label."""

    documents: tuple[Document, ...]

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))
        seen = set()
        for doc in self.documents:
            if doc.id in seen:
                raise ValueError(f"duplicate document id {doc.id!r}")
            seen.add(doc.id)

    @property
    def topics(self) -> tuple[str, ...]:
        return tuple(sorted({doc.label for doc in self.documents}))

    def __len__(self) -> int:
        return len(self.documents)


@dataclass(frozen=True)
class Vocabulary:
    """Sorted unique terms and their document frequencies (row order of X)."""

    terms: tuple[str, ...]
    doc_freq: tuple[int, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        if list(terms) != sorted(set(terms)):
            raise ValueError("vocabulary terms must be sorted and unique")
        if len(terms) != len(self.doc_freq):
            raise ValueError("doc_freq length must match term count")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "doc_freq", tuple(int(c) for c in self.doc_freq))

    def __len__(self) -> int:
        return len(self.terms)


def preprocess(text: str) -> list[str]:
    """Lowercase, tokenize on non-alphabetic boundaries, drop stopwords,
    Porter-stem, then drop stems shorter than two characters."""
    out = []
    for token in _TOKEN.findall(text.lower()):
        if token in STOPWORDS:
            continue
        stem = porter_stem(token)
        if len(stem) >= 2:
            out.append(stem)
    return out


def build_tfidf(corpus: Corpus, normalize: bool = True) -> tuple[DataMatrix, Vocabulary]:
    """Sparse tf-idf matrix (terms x documents) plus its vocabulary.

    ``X[d, n] = tf(term d, doc n) * ln(N / df(d))``; columns are L2-normalized
    unless ``normalize`` is False.  Terms present in every document get zero
    weight.  Raises if no document yields a single usable token.
    """
    if len(corpus) == 0:
        raise ValueError("corpus is empty")
    doc_counts = [Counter(preprocess(doc.text)) for doc in corpus.documents]
    if not any(doc_counts):
        raise ValueError("corpus has no usable tokens after preprocessing")

    df_counter: Counter[str] = Counter()
    for counts in doc_counts:
        df_counter.update(counts.keys())
    terms = tuple(sorted(df_counter))
    index = {term: i for i, term in enumerate(terms)}
    n_docs = len(corpus)
    idf = np.log(n_docs / np.array([df_counter[t] for t in terms], dtype=np.float64))

    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    for n, counts in enumerate(doc_counts):
        entries = [(index[term], count) for term, count in sorted(counts.items())]
        weights = np.array([count * idf[d] for d, count in entries], dtype=np.float64)
        if normalize:
            norm = float(np.sqrt((weights * weights).sum()))
            if norm > 0:
                weights = weights / norm
        rows.extend(d for d, _ in entries)
        cols.extend([n] * len(entries))
        vals.extend(weights.tolist())

    mat = sparse.coo_array(
        (np.asarray(vals), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
        shape=(len(terms), n_docs),
    ).tocsc()
    vocabulary = Vocabulary(terms, tuple(df_counter[t] for t in terms))
    return DataMatrix(mat), vocabulary


def load_corpus(path, format: str | None = None) -> Corpus:
    """Load a corpus from a jsonl file or a topic-directory tree.

    jsonl: one object per line with fields ``id``, ``label``, ``text``.
    dir: one subdirectory per topic, one UTF-8 text file per document, with
    the filename used as the document id.
    """
    path = Path(path)
    if format is None:
        format = "dir" if path.is_dir() else "jsonl"
    if format == "jsonl":
        return _load_jsonl(path)
    if format == "dir":
        return _load_dir(path)
    raise ValueError(f"unknown corpus format {format!r}; expected 'jsonl' or 'dir'")


def _load_jsonl(path: Path) -> Corpus:
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(record, dict):
                raise ValueError(f"{path}: line {lineno}: expected a JSON object")
            try:
                doc = Document(str(record["id"]), str(record["label"]), str(record["text"]))
            except KeyError as exc:
                raise ValueError(
                    f"{path}: line {lineno}: missing field {exc.args[0]!r}"
                ) from None
            if doc.id in seen:
                raise ValueError(f"{path}: line {lineno}: duplicate document id {doc.id!r}")
            seen.add(doc.id)
            docs.append(doc)
    return Corpus(tuple(docs))


def _load_dir(path: Path) -> Corpus:
    if not path.is_dir():
        raise ValueError(f"{path} is not a directory")
    docs: list[Document] = []
    seen: set[str] = set()
    for topic_dir in sorted(p for p in path.iterdir() if p.is_dir()):
        for doc_file in sorted(p for p in topic_dir.iterdir() if p.is_file()):
            if doc_file.name in seen:
                raise ValueError(f"{path}: duplicate document id {doc_file.name!r}")
            seen.add(doc_file.name)
            docs.append(
                Document(doc_file.name, topic_dir.name, doc_file.read_text(encoding="utf-8"))
            )
    return Corpus(tuple(docs))


def save_corpus(corpus: Corpus, path) -> None:
    """Write a corpus in the jsonl format accepted by ``load_corpus``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in corpus.documents:
            fh.write(
                json.dumps({"id": doc.id, "label": doc.label, "text": doc.text}) + "\n"
            )


def filter_topics(corpus: Corpus, min_docs: int) -> Corpus:
    """Keep only topics that contain at least ``min_docs`` documents."""
    if min_docs < 1:
        raise ValueError(f"min_docs must be >= 1, got {min_docs}")
    counts = Counter(doc.label for doc in corpus.documents)
    keep = {label for label, count in counts.items() if count >= min_docs}
    docs = tuple(doc for doc in corpus.documents if doc.label in keep)
    if not docs:
        raise ValueError(f"no topic has at least {min_docs} documents")
    return Corpus(docs)


def write_vocabulary(vocabulary: Vocabulary, path) -> None:
    """One term per line, in matrix row order."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for term in vocabulary.terms:
            fh.write(term + "\n")
