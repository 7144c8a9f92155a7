"""Figure rendering for ensemble reports (headless matplotlib backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .ensemble import EnsembleReport, semicircle_density, trace_fixed_mp_density


def render_ensemble_figure(report: EnsembleReport, path: str) -> None:
    """Histogram of pooled eigenvalues with both analytic curves, saved to file."""
    cfg = report.config
    edges = report.bin_edges
    centers = 0.5 * (edges[:-1] + edges[1:])

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.bar(
        centers,
        report.empirical_density,
        width=np.diff(edges),
        color="#7fbf7f",
        edgecolor="white",
        linewidth=0.3,
        label=f"empirical ({report.eigenvalue_count} eigenvalues)",
    )
    fine = np.linspace(edges[0], edges[-1], 800)
    ax.plot(
        fine,
        semicircle_density(fine, report.mu, report.sigma),
        color="#d95f02",
        lw=1.6,
        label="semicircle",
    )
    ax.plot(
        fine,
        trace_fixed_mp_density(fine, cfg.D, cfg.N, cfg.M),
        color="#1f6fb4",
        lw=1.6,
        ls="--",
        label="Marchenko-Pastur (rescaled)",
    )
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("density")
    ax.set_title(
        f"D={cfg.D}, N={cfg.N}, M={cfg.M}, kind={cfg.kind}, "
        f"{cfg.realizations} realizations, seed={cfg.seed}"
    )
    ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
