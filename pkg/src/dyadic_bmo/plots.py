"""Figure rendering for the verification reports.

Each function returns PNG bytes so callers can write them atomically next
to the CSV/JSON output.  Rendering is deterministic for identical inputs.
"""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .decomposition import Decomposition
from .grids import GridFunction
from .integrability import ExpIntegralReport
from .john_nirenberg import JnReport


def _png(fig) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=150, metadata={"Software": None})
    plt.close(fig)
    return buf.getvalue()


def render_jn_curve(report: JnReport) -> bytes:
    """Empirical distribution measure vs. the exponential bound, log scale."""
    alphas = np.asarray(report.alphas)
    empirical = np.asarray(report.empirical, dtype=float)
    bound = np.asarray(report.bound)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    shown = np.where(empirical > 0, empirical, np.nan)
    ax.plot(alphas, shown, drawstyle="steps-post", label="empirical measure")
    ax.plot(alphas, bound, label="exponential bound")
    ax.set_yscale("log")
    ax.set_xlabel("alpha")
    ax.set_ylabel("measure")
    ax.set_title(
        f"distribution vs bound (norm={report.norm:.6g}, "
        f"cube level {report.cube.level})"
    )
    ax.legend()
    fig.tight_layout()
    return _png(fig)


def render_exp_sweep(rows: list[ExpIntegralReport]) -> bytes:
    """Exponential mean vs. the layer-cake bound over the zeta grid."""
    zetas = [r.zeta for r in rows]
    lhs = [r.lhs for r in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(zetas, lhs, marker="o", markersize=3, label="exponential mean")
    finite = [(r.zeta, r.bound) for r in rows if r.admissible]
    if finite:
        ax.plot(*zip(*finite), label="layer-cake bound")
    ax.set_xlabel("zeta")
    ax.set_ylabel("value")
    ax.set_title("exponential integrability")
    ax.legend()
    fig.tight_layout()
    return _png(fig)


def render_decomposition(phi: GridFunction, decomp: Decomposition) -> bytes:
    """Normalized function with the selected cubes shaded per generation.

    Supports n=1 (line plot with shaded spans) and n=2 (heatmap with cube
    outlines).
    """
    n = phi.dimension
    psi = phi._grid / decomp.normalization
    levels = phi.levels
    root = phi.root
    colors = plt.get_cmap("tab10")

    def span(cube):
        scale = root.side * 2.0 ** (-cube.level)
        lows = [root.origin[i] + cube.index[i] * scale for i in range(n)]
        return lows, scale

    if n == 1:
        m = 1 << levels
        edges = root.origin[0] + root.side * np.arange(m + 1) / m
        fig, ax = plt.subplots(figsize=(7.0, 4.0))
        ax.stairs(psi, edges, label="normalized function")
        ax.axhline(decomp.root_entry.own_average, color="k", lw=0.8, ls="--")
        for lam, gen in enumerate(decomp.generations, start=1):
            color = colors((lam - 1) % 10)
            for j, sc in enumerate(gen):
                (low,), width = span(sc.cube)
                ax.axvspan(
                    low,
                    low + width,
                    alpha=0.25,
                    color=color,
                    label=f"generation {lam}" if j == 0 else None,
                )
        ax.set_xlabel("x")
        ax.set_ylabel("value / seminorm")
    elif n == 2:
        fig, ax = plt.subplots(figsize=(6.0, 5.5))
        extent = (
            root.origin[1],
            root.origin[1] + root.side,
            root.origin[0] + root.side,
            root.origin[0],
        )
        im = ax.imshow(psi, extent=extent, interpolation="nearest")
        fig.colorbar(im, ax=ax, label="value / seminorm")
        for lam, gen in enumerate(decomp.generations, start=1):
            color = colors((lam - 1) % 10)
            for j, sc in enumerate(gen):
                lows, size = span(sc.cube)
                rect = plt.Rectangle(
                    (lows[1], lows[0]),
                    size,
                    size,
                    fill=False,
                    edgecolor=color,
                    lw=1.2,
                    label=f"generation {lam}" if j == 0 else None,
                )
                ax.add_patch(rect)
        ax.set_xlabel("axis 1")
        ax.set_ylabel("axis 0")
    else:
        raise ValueError(f"decomposition plotting supports n in {{1, 2}}, got n={n}")

    ax.set_title(f"stopping-time decomposition (theta={decomp.theta:.4g})")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return _png(fig)
