"""Report figures. Rendered with the Agg backend; PNG metadata is stripped of
the software tag so reruns are byte-identical."""

from __future__ import annotations

import numpy as np

from .indicators import FEATURE_NAMES

_PNG_META = {"Software": None}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "metrorisk"
    return plt


def _save(fig, path):
    fig.savefig(path, dpi=100, metadata=_PNG_META)
    fig.clf()
    import matplotlib.pyplot as plt

    plt.close(fig)


def zone_overlay(partition, width: int, height: int, path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(width / 160, height / 160))
    colors = {"A": "tab:blue", "B": "tab:orange", "C": "tab:red"}
    for name, poly in partition.polygons().items():
        p = np.asarray(poly + (poly[0],))
        ax.fill(p[:, 0], p[:, 1], alpha=0.35, color=colors[name], label=f"zone {name}")
        ax.plot(p[:, 0], p[:, 1], color=colors[name], lw=1)
    yb = np.asarray(partition.yellow_boundary)
    ax.plot(yb[:, 0], yb[:, 1], color="gold", lw=3, label="yellow line")
    ax.set_xlim(0, width)
    ax.set_ylim(height, 0)
    ax.set_aspect("equal")
    ax.legend(loc="lower left", fontsize=7)
    _save(fig, path)


def heatmap_figure(grid, path, title: str = "position risk") -> None:
    plt = _pyplot()
    s = grid.spec
    fig, ax = plt.subplots(figsize=(3.5, 7))
    im = ax.imshow(grid.values, origin="upper", extent=(s.xmin, s.xmax, s.ymax, s.ymin), cmap="inferno")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_title(title)
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    _save(fig, path)


def importance_figure(counts, path, names=FEATURE_NAMES) -> None:
    plt = _pyplot()
    counts = np.asarray(counts)
    order = np.argsort(counts, kind="stable")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.barh([names[i] for i in order], counts[order], color="tab:blue")
    ax.set_xlabel("split count")
    ax.set_title("feature importance")
    fig.tight_layout()
    _save(fig, path)


def shap_summary(phi, x, path, names=FEATURE_NAMES, seed: int = 0) -> None:
    """Beeswarm-style summary: one row per feature, points colored by the
    feature's value (min-max scaled per feature)."""
    plt = _pyplot()
    phi = np.asarray(phi, dtype=float)
    x = np.asarray(x, dtype=float)
    order = np.argsort(np.abs(phi).mean(axis=0), kind="stable")
    rng = np.random.default_rng(seed)
    fig, ax = plt.subplots(figsize=(6, 4))
    for row, j in enumerate(order):
        col = x[:, j]
        span = col.max() - col.min() if len(col) else 0.0
        c = (col - col.min()) / span if span > 0 else np.full(len(col), 0.5)
        jitter = rng.uniform(-0.25, 0.25, len(col))
        sc = ax.scatter(phi[:, j], row + jitter, c=c, cmap="coolwarm", vmin=0, vmax=1, s=8)
    ax.axvline(0.0, color="grey", lw=0.8)
    ax.set_yticks(range(len(order)))
    ax.set_yticklabels([names[j] for j in order])
    ax.set_xlabel("Shapley value (logit)")
    if len(x):
        fig.colorbar(sc, ax=ax, label="feature value (scaled)")
    fig.tight_layout()
    _save(fig, path)


def fold_metrics(report, path) -> None:
    plt = _pyplot()
    folds = report.folds
    names = ["roc_auc", "sensitivity", "specificity"]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    idx = np.arange(len(folds))
    for k, m in enumerate(names):
        vals = [np.nan if getattr(f, m) is None else getattr(f, m) for f in folds]
        ax.bar(idx + (k - 1) * 0.27, vals, width=0.27, label=m)
    ax.set_xticks(idx)
    ax.set_xlabel("fold")
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=7, loc="lower right")
    fig.tight_layout()
    _save(fig, path)
