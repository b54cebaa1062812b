"""SVG plot emission for command outputs.

Plots are a convenience view of the CSV/JSON outputs, not a contract:
nothing downstream parses them.  Matplotlib is pinned to the Agg backend
and SVG output is made deterministic (fixed hash salt, no date
metadata) so that replaying a run reproduces every file byte-exactly.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

matplotlib.rcParams["svg.hashsalt"] = "jjbarrier"

_SAVE_KW = {"format": "svg", "metadata": {"Date": None}}

__all__ = ["save_histogram", "save_heatmap", "save_iv", "save_band_with_traces"]


def save_histogram(path, data, bins=30, xlabel="", title="", vline=None):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.hist(np.asarray(data), bins=bins, color="#4c72b0", edgecolor="white")
    if vline is not None:
        ax.axvline(vline, color="black", linestyle="--", linewidth=1)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def save_heatmap(path, matrix, x, y, xlabel="", ylabel="", title="", mask=None):
    fig, ax = plt.subplots(figsize=(5, 4))
    m = np.array(matrix, dtype=float)
    if mask is not None:
        m = np.where(mask, m, np.nan)
    extent = [x[0], x[-1], y[0], y[-1]]
    im = ax.imshow(m, origin="lower", aspect="auto", extent=extent, cmap="plasma")
    fig.colorbar(im, ax=ax)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def save_iv(path, curve, title="", marker_v=None):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(curve.voltage, curve.current * 1e6, "-", color="#4c72b0")
    if marker_v is not None:
        ax.axvline(marker_v, color="red", linestyle=":", linewidth=1)
    ax.set_xlabel("voltage (V)")
    ax.set_ylabel("current (uA)")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def save_band_with_traces(path, image, traces=None, title=""):
    fig, ax = plt.subplots(figsize=(6, 3))
    ny, nx = image.values.shape
    extent = [0, nx * image.pixel_size, 0, ny * image.pixel_size]
    ax.imshow(image.values, origin="lower", aspect="equal", extent=extent, cmap="magma")
    if traces is not None:
        xs = (np.arange(nx) + 0.5) * image.pixel_size
        for tr, color in zip(traces, ("cyan", "lime")):
            ax.plot(xs, (tr.positions + 0.5) * image.pixel_size, ".", ms=1, color=color)
    ax.set_xlabel("x (nm)")
    ax.set_ylabel("z (nm)")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
