"""Correntropy-maximizing nonnegative matrix factorization for document
clustering, with L2 and KL multiplicative-update baselines, a tf-idf text
pipeline, K-means + optimal-assignment evaluation, and a repetition-averaged
experiment harness."""

from .matrix import (
    DataMatrix,
    FactorPair,
    read_snapshot,
    reconstruct,
    row_residual_norms,
    write_snapshot,
)
from .solvers import (
    OBJECTIVES,
    FitResult,
    McCState,
    SolverConfig,
    factorize,
    initial_factors,
    kl_divergence,
    kl_factorize,
    kl_update_h,
    kl_update_w,
    l2_factorize,
    l2_update_h,
    l2_update_w,
    mcc_estep,
    mcc_factorize,
    mcc_objective,
    mcc_update_h,
    mcc_update_w,
    squared_error,
)
from .text import (
    Corpus,
    Document,
    Vocabulary,
    build_tfidf,
    filter_topics,
    load_corpus,
    preprocess,
    save_corpus,
    write_vocabulary,
)
from .stemming import porter_stem
from .stopwords import STOPWORDS
from .cluster import (
    EvalReport,
    LabelAssignment,
    accuracy,
    confusion_matrix,
    evaluate,
    hungarian_match,
    kmeans,
)
from .experiment import (
    ExperimentConfig,
    ExperimentResult,
    RunFailure,
    RunRecord,
    average_accuracy,
    emit_report,
    make_synthetic_corpus,
    run_experiment,
    sample_topics,
)

__version__ = "0.1.0"

__all__ = [
    "DataMatrix",
    "FactorPair",
    "reconstruct",
    "row_residual_norms",
    "read_snapshot",
    "write_snapshot",
    "OBJECTIVES",
    "SolverConfig",
    "McCState",
    "FitResult",
    "initial_factors",
    "mcc_objective",
    "mcc_estep",
    "mcc_update_h",
    "mcc_update_w",
    "l2_update_h",
    "l2_update_w",
    "kl_update_h",
    "kl_update_w",
    "squared_error",
    "kl_divergence",
    "mcc_factorize",
    "l2_factorize",
    "kl_factorize",
    "factorize",
    "Corpus",
    "Document",
    "Vocabulary",
    "preprocess",
    "build_tfidf",
    "load_corpus",
    "save_corpus",
    "filter_topics",
    "write_vocabulary",
    "porter_stem",
    "STOPWORDS",
    "LabelAssignment",
    "EvalReport",
    "kmeans",
    "hungarian_match",
    "confusion_matrix",
    "evaluate",
    "accuracy",
    "ExperimentConfig",
    "ExperimentResult",
    "RunRecord",
    "RunFailure",
    "sample_topics",
    "make_synthetic_corpus",
    "run_experiment",
    "average_accuracy",
    "emit_report",
    "__version__",
]
