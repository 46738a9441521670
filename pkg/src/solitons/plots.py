"""Optional matplotlib renderings of generated tables and check reports.

Nothing in the library calls these; the command-line tool wires them up
behind an opt-in flag, and table output stays plain text either way.
"""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def plot_gen_table(columns, dim, path, title):
    """Profile curves (one axis) or a soliton-function heatmap (two axes)."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    if dim == 1:
        x = columns["re_z1"]
        for key in ("phi", "f", "det_g", "R", "Zsq"):
            ax.plot(x, columns[key], label=key)
        ax.set_xlabel("Re z1 (real ray)")
        ax.legend(loc="best", fontsize=8)
    else:
        x = np.unique(columns["re_z1"])
        y = np.unique(columns["re_z2"])
        grid = columns["f"].reshape(len(x), -1)[:, : len(y)]
        if dim > 2:
            # slice: points vary fastest in the trailing axes, take their origin
            full = columns["f"].reshape([len(x)] * dim)
            grid = full[(slice(None), slice(None)) + (0,) * (dim - 2)]
        im = ax.pcolormesh(y, x, grid, shading="auto")
        fig.colorbar(im, ax=ax, label="f")
        ax.set_xlabel("Re z2")
        ax.set_ylabel("Re z1")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_report(reports, path, title="check deviations"):
    """Horizontal bars of max deviation against tolerance, log scale."""
    names = [r.check_name for r in reports]
    devs = [max(r.max_dev, 1e-18) for r in reports]
    tols = [r.tolerance for r in reports]
    pos = np.arange(len(names))
    fig, ax = plt.subplots(figsize=(7.0, 0.6 * len(names) + 1.5))
    colors = ["tab:green" if r.passed else "tab:red" for r in reports]
    ax.barh(pos, devs, color=colors)
    for k, tol in enumerate(tols):
        ax.plot([tol, tol], [k - 0.4, k + 0.4], color="black", lw=1.2)
    ax.set_yticks(pos)
    ax.set_yticklabels(names, fontsize=8)
    ax.set_xscale("log")
    ax.set_xlabel("max deviation (bar) vs tolerance (tick)")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_growth(growth, path, title="ray growth of f / log |z|"):
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for k, d in enumerate(growth.directions):
        label = "dir " + ",".join(f"{abs(x):.2g}" for x in d)
        ax.semilogx(growth.radii, growth.ratios[k], marker="o", ms=3, label=label)
        ax.axhline(growth.mu_hat[k], ls="--", lw=0.8, color="gray")
    ax.axhline(growth.sandwich["two_n"], color="black", lw=1.0, label="2n")
    ax.set_xlabel("|z| along ray")
    ax.set_ylabel("f / log |z|")
    ax.legend(loc="best", fontsize=8)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
