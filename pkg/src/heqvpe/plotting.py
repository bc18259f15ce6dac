"""Figure rendering for run reports (SVG via matplotlib)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_RC = {
    "svg.hashsalt": "heqvpe",
    "svg.fonttype": "none",
    "font.size": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def get_figure(width=6.0, height=None):
    """Figure/axes pair with golden-ratio height by default."""
    if height is None:
        height = width * (math.sqrt(5) - 1.0) / 2.0
    fig, ax = plt.subplots(figsize=(width, height), facecolor="w")
    return fig, ax


def _save(fig, path):
    fig.tight_layout()
    # Date=None keeps the SVG free of timestamps
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_convergence(iterations, energies, e0, path):
    with plt.rc_context(_RC):
        fig, ax = get_figure()
        ax.plot(iterations, energies, color="tab:green", lw=1.5, label="VQE energy")
        ax.axhline(e0, color="k", ls="--", lw=1, label=f"exact E0 = {e0:.6f}")
        ax.set_xlabel("iteration")
        ax.set_ylabel("energy (Ha)")
        ax.set_title("VQE convergence")
        ax.legend(frameon=False)
        _save(fig, path)


def plot_histogram(edges, counts, path):
    with plt.rc_context(_RC):
        fig, ax = get_figure()
        widths = [hi - lo for lo, hi in zip(edges[:-1], edges[1:])]
        ax.bar(edges[:-1], counts, width=widths, align="edge", color="tab:blue", edgecolor="w", lw=0.3)
        ax.set_xlabel("measured energy (Ha)")
        ax.set_ylabel("counts")
        ax.set_title("Sampled energy distribution")
        _save(fig, path)


def plot_fidelity(iterations, fidelities, path):
    with plt.rc_context(_RC):
        fig, ax = get_figure()
        ax.plot(iterations, fidelities, color="tab:red", lw=1.5)
        ax.set_ylim(-0.02, 1.02)
        ax.set_xlabel("iteration")
        ax.set_ylabel("fidelity with ground state")
        ax.set_title("Fidelity during optimization")
        _save(fig, path)


def plot_distribution(labels, probabilities, path, max_bars=40):
    """Bar chart of output-state probabilities (largest first)."""
    labels = list(labels)[:max_bars]
    probabilities = list(probabilities)[:max_bars]
    with plt.rc_context(_RC):
        fig, ax = get_figure(width=max(6.0, 0.3 * len(labels)))
        ax.bar(range(len(labels)), probabilities, color="tab:purple")
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=90, fontsize=8)
        ax.set_ylabel("probability")
        ax.set_title("Output Fock state probabilities")
        _save(fig, path)
