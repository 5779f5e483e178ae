"""Optional figure rendering for the harness reports.

Figures are written straight to files (Agg backend); the CSV/JSON artifacts
remain the primary outputs and nothing here is imported unless plotting was
requested.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_return_histogram(returns: Sequence[float], path: str | Path, title: str = "returns") -> Path:
    """Histogram of per-episode discounted returns with the mean marked."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(returns, bins=min(30, max(5, len(returns) // 4)), color="#4878d0", edgecolor="white")
    mean = sum(returns) / len(returns)
    ax.axvline(mean, color="#d65f5f", linestyle="--", label=f"mean = {mean:.3f}")
    ax.set_xlabel("discounted return")
    ax.set_ylabel("episodes")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_certificate_rows(rows: Sequence[dict], path: str | Path) -> Path:
    """Mean bound and its decomposition per confidence level."""
    path = Path(path)
    confidences = [r["confidence"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(confidences, [r["mean_bound"] for r in rows], "o-", label="bound")
    ax.plot(confidences, [r["mean_estimation"] for r in rows], "s--", label="estimation term")
    ax.plot(confidences, [r["mean_partition"] for r in rows], "^--", label="partition term")
    ax.set_xlabel("confidence level")
    ax.set_ylabel("mean bound")
    ax.set_title("certificate bounds")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_concentration_tails(report: dict, path: str | Path) -> Path:
    """Empirical tail frequency vs the polynomial bound, one curve per n."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    drew_bound = False
    for entry in report["per_n"]:
        zs = [t["z"] for t in entry["tails"]]
        ax.plot(zs, [max(t["frequency"], 1e-5) for t in entry["tails"]], "o-", label=f"n = {entry['n_sims']}")
        if not drew_bound:
            ax.plot(zs, [t["bound"] for t in entry["tails"]], "k--", label="2 x tail bound")
            drew_bound = True
    ax.set_yscale("log")
    ax.set_xlabel("z")
    ax.set_ylabel("two-sided tail frequency")
    ax.set_title("scaled root-error tails")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
