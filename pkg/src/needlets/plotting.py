"""Figure rendering for the report paths of the CLI.

All functions write PNG files next to the JSON/CSV artifacts and never open
an interactive window; matplotlib is forced onto the Agg backend.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .cubature import Cubature
from .frames import NeedletFrame, WindowFunction


def plot_window(w: WindowFunction, path: str) -> str:
    """The window and the telescoping sum of its squared dilates."""
    lo, hi = w.support
    s = np.geomspace(lo / 4.0, hi * 4.0, 800)
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(9, 3.2))
    ax0.semilogx(s, w(s))
    ax0.set_xlabel("s")
    ax0.set_ylabel("f(s)")
    ax0.set_title(f"window, a = {w.a:g}")
    js = np.arange(-8, 9)
    total = sum(w(w.a ** (-2.0 * j) * s) ** 2 for j in js)
    ax1.semilogx(s, total - 1.0)
    ax1.set_xlabel("s")
    ax1.set_ylabel("sum of squares - 1")
    ax1.set_title("partition deviation")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_weights(cub: Cubature, path: str) -> str:
    """Histogram of cubature weights scaled by rho^n."""
    M = cub.lattice.manifold
    scaled = cub.weights / cub.lattice.rho**M.n
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.hist(scaled, bins=min(40, max(8, len(scaled) // 8)))
    ax.set_xlabel(r"$\lambda_k \, / \, \rho^n$")
    ax.set_ylabel("count")
    ax.set_title(f"{M.kind}: {len(cub)} weights, omega = {cub.omega:g}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_localization(constants_by_level: dict, path: str) -> str:
    """Fitted localization constants C_N per level, one line per N."""
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    levels = sorted(constants_by_level)
    n_values = sorted({N for c in constants_by_level.values() for N in c})
    for N in n_values:
        ax.plot(levels, [constants_by_level[j][N] for j in levels], marker="o", label=f"N = {N}")
    ax.set_yscale("log")
    ax.set_xlabel("level j")
    ax.set_ylabel(r"$C_N$")
    ax.set_title("kernel localization constants")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_besov_sweep(rows: list[dict], path: str) -> str:
    """Norm values against family scale, one panel per (family, alpha)."""
    keys = sorted({(r["family"], r["alpha"]) for r in rows})
    ncol = max(1, len({k[1] for k in keys}))
    nrow = max(1, len({k[0] for k in keys}))
    fig, axes = plt.subplots(nrow, ncol, figsize=(3.4 * ncol, 2.8 * nrow), squeeze=False)
    families = sorted({k[0] for k in keys})
    alphas = sorted({k[1] for k in keys})
    for i, fam in enumerate(families):
        for c, alpha in enumerate(alphas):
            ax = axes[i][c]
            sel = [r for r in rows if r["family"] == fam and r["alpha"] == alpha]
            for kind in sorted({r["norm_kind"] for r in sel}):
                pts = sorted((r["scale"], r["value"]) for r in sel if r["norm_kind"] == kind)
                ax.plot([p[0] for p in pts], [p[1] for p in pts], marker=".", label=kind)
            ax.set_yscale("log")
            ax.set_title(f"{fam}, alpha = {alpha:g}", fontsize=9)
            if i == nrow - 1:
                ax.set_xlabel("scale")
            if c == 0:
                ax.set_ylabel("norm")
    axes[0][0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_frame_points(frame: NeedletFrame, path: str) -> str:
    """Lattice cardinality and radius per level."""
    js = [lv.j for lv in frame.levels]
    counts = [len(lv) for lv in frame.levels]
    rhos = [lv.rho for lv in frame.levels]
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(8, 3.2))
    ax0.semilogy(js, counts, marker="o")
    ax0.set_xlabel("level j")
    ax0.set_ylabel("points")
    ax1.semilogy(js, rhos, marker="o")
    ax1.set_xlabel("level j")
    ax1.set_ylabel(r"$\rho_j$")
    fig.suptitle(f"{frame.manifold.kind} frame, a = {frame.a:g}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
