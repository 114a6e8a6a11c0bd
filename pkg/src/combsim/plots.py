"""Figure rendering for the report path: every plot function takes the data
product and writes a PNG next to the delimited output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import EnsembleRecord, SpectrumSweep, Table


def plot_spectrum(sweep: SpectrumSweep, path) -> None:
    """Eigenvalue fan of the total Hamiltonian against sweep time."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for k in range(sweep.levels.shape[1]):
        ax.plot(sweep.times, sweep.levels[:, k], lw=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.set_title("total-Hamiltonian spectrum along the sweep")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_trajectory(table: Table, path) -> None:
    """Eigenstate populations per step with iteration markers, plus the energy
    residual on a log scale."""
    cols = {name: i for i, name in enumerate(table.columns)}
    data = np.array([[row[cols[c]] for c in table.columns[:5]] for row in table.rows])
    steps = data[:, 1]
    n_overlaps = len(table.columns) - 5
    fig, (ax, ax_res) = plt.subplots(
        2, 1, figsize=(7, 6), sharex=True, height_ratios=[2.2, 1]
    )
    for k in range(n_overlaps):
        ov = np.array([row[5 + k] for row in table.rows])
        ax.plot(steps, ov, lw=1.2, label=f"state {k}")
    iters = data[:, 0]
    for boundary in steps[np.nonzero(np.diff(iters))[0]]:
        ax.axvline(boundary, color="0.8", lw=0.8, zorder=0)
        ax_res.axvline(boundary, color="0.8", lw=0.8, zorder=0)
    ax.set_ylabel("population after comb trace")
    ax.legend(fontsize=8, ncol=2)
    residual = np.maximum(data[:, 4], 1e-16)
    ax_res.semilogy(steps, residual, color="k", lw=1.0)
    ax_res.set_xlabel("Trotter step")
    ax_res.set_ylabel("energy residual")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_ensemble(records: list[EnsembleRecord], path) -> None:
    """Final against initial ground-state fidelity; the diagonal marks no
    improvement."""
    initial = [r.initial_fidelity for r in records]
    final = [r.final_fidelity for r in records]
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(initial, final, s=9, alpha=0.55)
    ax.plot([0, 1], [0, 1], color="r", lw=1.0)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_xlabel("initial ground-state fidelity")
    ax.set_ylabel("final ground-state fidelity")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_cost(table: Table, path) -> None:
    """Gate cost against inverse gap for each method, log-log."""
    cols = {name: i for i, name in enumerate(table.columns)}
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for method, marker in (("qaa", "s"), ("sc", "o")):
        pts = [r for r in table.rows if r[cols["method"]] == method]
        if not pts:
            continue
        x = [r[cols["inv_gap"]] for r in pts]
        y = [r[cols["gates"]] for r in pts]
        ax.loglog(x, y, marker=marker, ls="-", label=method)
    ax.set_xlabel("1 / gap")
    ax.set_ylabel("gates to 50% ground-state fidelity")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
