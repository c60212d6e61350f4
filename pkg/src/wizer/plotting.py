"""SVG output for densities, signature maps and persistence diagrams.

Figures are written with a fixed SVG hash salt and without the creation
date, so identical inputs give byte-identical files.  Pass
``timestamp=True`` to embed the date.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

# white = masked, red = significant decrease, grey = nothing significant,
# blue = significant increase
SIGNATURE_COLORS = ["#ffffff", "#d62728", "#b0b0b0", "#1f4fbf"]
MODE_COLORS = ["black", "tab:red", "tab:blue", "tab:green", "tab:orange", "tab:purple"]


def _save(fig, path, timestamp=False):
    with plt.rc_context({"svg.hashsalt": "wizer", "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata=None if timestamp else {"Date": None})
    plt.close(fig)


def density_svg(path, nodes, curves, histogram=None, title="", timestamp=False):
    """Overlay of smoothed densities (``curves``: label -> values) on a histogram."""
    fig, ax = plt.subplots(figsize=(7, 3.5))
    if histogram is not None:
        edges = np.degrees(histogram.edges)
        ax.stairs(histogram.density(), edges, fill=True, color="#dddddd", label="histogram")
    styles = ["-", "--", ":", "-."]
    colors = ["tab:red", "tab:blue", "black", "tab:green"]
    x = np.degrees(np.append(nodes, 2 * math.pi))
    for i, (label, values) in enumerate(curves.items()):
        ax.plot(x, np.append(values, values[0]), styles[i % 4], color=colors[i % 4], label=label)
    ax.set_xlim(0, 360)
    ax.set_xlabel("angle (degrees on the circle)")
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    ax.legend(fontsize="small")
    fig.tight_layout()
    _save(fig, path, timestamp)


def signature_map_svg(path, sig_map, title="", hlines=(), timestamp=False):
    """Heatmap of the signature map; rows are bandwidths on a log axis."""
    codes = np.where(sig_map.mask, 0, sig_map.signs.astype(int) + 2)
    step = sig_map.grid.step
    x = np.degrees(np.append(sig_map.grid.nodes - step / 2, sig_map.grid.nodes[-1] + step / 2))
    hs = np.asarray(sig_map.bws.values)
    if hs.size > 1:
        mids = np.sqrt(hs[1:] * hs[:-1])
        y = np.concatenate([[hs[0] ** 2 / mids[0]], mids, [hs[-1] ** 2 / mids[-1]]])
    else:
        y = np.array([hs[0] / 1.1, hs[0] * 1.1])
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.pcolormesh(x, y, codes, cmap=ListedColormap(SIGNATURE_COLORS), vmin=-0.5, vmax=3.5,
                  shading="flat", rasterized=False)
    for h in hlines:
        ax.axhline(h, color="black", lw=0.8)
    ax.set_yscale("log")
    ax.set_xlabel("angle (degrees on the circle)")
    ax.set_ylabel("bandwidth h")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, path, timestamp)


def diagram_svg(path, diagram, title="", timestamp=False):
    labels = sorted({p.label for p in diagram.points})
    fig, ax = plt.subplots(figsize=(5, 5))
    xs = [p.x for p in diagram.points] + [p.y for p in diagram.points]
    lo, hi = (min(xs), max(xs)) if xs else (0.0, 1.0)
    pad = 0.05 * (hi - lo or 1.0)
    ax.plot([lo - pad, hi + pad], [lo - pad, hi + pad], color="#999999", lw=0.8)
    for p in diagram.points:
        color = MODE_COLORS[labels.index(p.label) % len(MODE_COLORS)]
        ax.text(p.x, p.y, str(p.mode), color=color, ha="center", va="center", fontsize=11)
    ax.set_xlim(lo - pad, hi + pad)
    ax.set_ylim(lo - pad, hi + pad)
    ax.set_xlabel("log h  (odd modes: birth, even modes: split)")
    ax.set_ylabel("log h  (odd modes: split, even modes: birth)")
    ax.set_title(title or "inferred mode persistence")
    fig.tight_layout()
    _save(fig, path, timestamp)
