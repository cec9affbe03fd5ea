"""Figures for the ``stats`` and ``bench`` commands, written straight to files."""

from __future__ import annotations

from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from phh.corpus import BenchResult, CorpusStats  # noqa: E402


def stats_figure(stats: CorpusStats, path: Union[str, Path]) -> Path:
    """Per-file newline, word and byte counts, one panel each."""
    names = [Path(c.name).name for c in stats.per_file]
    fig, axes = plt.subplots(1, 3, figsize=(12, 4))
    for ax, attr in zip(axes, ("newlines", "words", "bytes")):
        values = [getattr(c, attr) for c in stats.per_file]
        ax.bar(range(len(values)), values, color="tab:blue")
        ax.axhline(float(getattr(stats, attr)), color="tab:red", linestyle="--", label="mean")
        ax.set_title(attr)
        if len(names) <= 20:
            ax.set_xticks(range(len(names)))
            ax.set_xticklabels(names, rotation=60, ha="right", fontsize=7)
        else:
            ax.set_xlabel("file")
        ax.legend()
    fig.suptitle(f"{stats.files} hand histories")
    fig.tight_layout()
    return _save(fig, path)


def bench_figure(result: BenchResult, path: Union[str, Path]) -> Path:
    """Throughput of each timed round."""
    per_round = result.hands / result.repeat
    rates = [per_round / s if s > 0 else 0.0 for s in result.round_seconds]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(range(1, len(rates) + 1), rates, color="tab:green")
    ax.axhline(result.throughput, color="tab:red", linestyle="--", label=f"overall {result.throughput:.0f}")
    ax.set_xlabel("round")
    ax.set_ylabel("hands / s")
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def _save(fig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    return path
