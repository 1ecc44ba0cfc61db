"""Accuracy-vs-k figure rendered next to the CSV reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_STYLES = {"mcc": "o-", "l2": "s--", "kl": "^:"}


def render_accuracy_figure(table: list[dict], algorithms, path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ks = [row["k"] for row in table]
    for algorithm in algorithms:
        points = [
            (k, row.get(algorithm))
            for k, row in zip(ks, table)
            if row.get(algorithm) is not None
        ]
        if not points:
            continue
        ax.plot(
            [p[0] for p in points],
            [p[1] for p in points],
            _STYLES.get(algorithm, "o-"),
            label=algorithm.upper(),
        )
    ax.set_xlabel("Number of clusters")
    ax.set_ylabel("Mean clustering accuracy")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
