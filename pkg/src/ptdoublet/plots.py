"""Figure rendering for the report pipeline.

Each CLI report path drops a PNG next to its delimited output. Rendering
is headless (Agg) and deterministic in content; figures are a reading aid
for the exported numbers, not an alternative data channel.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .contour import ContourGrid
from .spectrum import Doublet, SingleLevel
from .wavefn import WaveSamples


def render_contour(grid: ContourGrid, path: str) -> None:
    """Two panels: the r-plane path and its xi-plane arch image."""
    fig, (ax_r, ax_xi) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax_r.plot(grid.r.real, grid.r.imag, lw=1.2)
    ax_r.axhline(0.0, color="0.8", lw=0.6)
    ax_r.plot([0.0], [0.0], "rx", ms=6)
    ax_r.set_xlabel("Re r")
    ax_r.set_ylabel("Im r")
    ax_r.set_title("integration path")
    ax_xi.plot(grid.omega, -grid.z, lw=1.2)
    ax_xi.set_xlabel("Omega")
    ax_xi.set_ylabel("-Z")
    ax_xi.set_title("xi image (arch)")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_potential(grid: ContourGrid, values: np.ndarray, path: str, label: str) -> None:
    fig, ax = plt.subplots(figsize=(7.0, 3.6))
    ax.plot(grid.t, values.real, lw=1.2, label="Re V")
    ax.plot(grid.t, values.imag, lw=1.2, label="Im V")
    ax.set_xlabel("t")
    ax.set_ylabel(label)
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_spectrum(levels: Sequence, path: str) -> None:
    """Energy levels against N; doublet branches share one abscissa."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for level in levels:
        if isinstance(level, Doublet):
            ax.hlines([level.e_minus, level.e_plus], level.N - 0.3, level.N + 0.3, lw=1.6)
            ax.annotate("q=-1", (level.N + 0.32, level.e_minus), fontsize=8, va="center")
            ax.annotate("q=+1", (level.N + 0.32, level.e_plus), fontsize=8, va="center")
        elif isinstance(level, SingleLevel):
            ax.hlines([level.energy], level.N - 0.3, level.N + 0.3, lw=1.6, color="0.4")
    ax.set_xlabel("N")
    ax.set_ylabel("E")
    ax.set_title("levels per nodal count")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_wavefunction(samples: WaveSamples, path: str) -> None:
    g = samples.grid
    fig, (ax_v, ax_m) = plt.subplots(2, 1, figsize=(7.0, 5.4), sharex=True)
    ax_v.plot(g.t, samples.values.real, lw=1.0, label="Re psi")
    ax_v.plot(g.t, samples.values.imag, lw=1.0, label="Im psi")
    ax_v.legend(loc="best", frameon=False)
    ax_v.set_ylabel("psi")
    mags = np.abs(samples.values)
    positive = np.where(mags > 0, mags, np.nan)
    ax_m.semilogy(g.t, positive, lw=1.0)
    ax_m.set_xlabel("t")
    ax_m.set_ylabel("|psi|")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
