"""Figures for the report path.

Tables stay authoritative; these give the same data at a glance.  All
writers pin the backend and strip the writer metadata so repeated runs
produce identical bytes.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import LineCollection

_META = {"Software": None}


def _finish(fig, path):
    fig.savefig(path, dpi=150, metadata=_META)
    plt.close(fig)
    return path


def weight_map(weights, path):
    """Patch embedding with edges shaded by |weight|; None without geometry."""
    graph = weights.graph
    if graph.positions is None:
        return None
    segments, mags = [], []
    for e in graph.edges:
        w = complex(graph.positions[e.white])
        b = complex(graph.positions[e.black])
        segments.append([(w.real, w.imag), (b.real, b.imag)])
        mags.append(abs(weights.weights[e.index]))
    fig, ax = plt.subplots(figsize=(5.5, 5.0))
    coll = LineCollection(segments, cmap="viridis", linewidths=2.0)
    coll.set_array(np.asarray(mags))
    ax.add_collection(coll)
    fig.colorbar(coll, ax=ax, label="|weight|")
    for name in graph.whites:
        z = complex(graph.positions[name])
        ax.plot(z.real, z.imag, "o", mfc="white", mec="black", ms=5)
    for name in graph.blacks:
        z = complex(graph.positions[name])
        ax.plot(z.real, z.imag, "o", color="black", ms=5)
    ax.set_aspect("equal")
    ax.autoscale()
    ax.set_title("edge weights")
    fig.tight_layout()
    return _finish(fig, path)


def convergence(scan, path):
    """Log-log deviations against the multiplier, fitted slope overlaid."""
    s = np.asarray(scan.s_values, dtype=float)
    d = np.asarray(scan.diffs, dtype=float)
    fig, ax = plt.subplots(figsize=(5.0, 3.5))
    keep = d > 0
    if keep.any():
        ax.loglog(s[keep], d[keep], "o-", label="measured")
        if np.isfinite(scan.order) and keep.all():
            ref = d[0] * (s / s[0]) ** scan.order
            ax.loglog(s, ref, "--", label="slope %.3f" % scan.order)
    ax.set_xlabel("multiplier")
    ax.set_ylabel("|deviation|")
    ax.set_title(scan.quantity or "degeneration")
    ax.legend(loc="best")
    fig.tight_layout()
    return _finish(fig, path)


def residual_histogram(values, path, label="residual"):
    """Histogram of log10 residuals; exact zeros are clipped to the floor."""
    vals = np.asarray([max(float(v), 1e-300) for v in values])
    fig, ax = plt.subplots(figsize=(5.0, 3.5))
    ax.hist(np.log10(vals), bins=min(20, max(5, vals.size)), color="tab:blue")
    ax.set_xlabel("log10 %s" % label)
    ax.set_ylabel("count")
    fig.tight_layout()
    return _finish(fig, path)
