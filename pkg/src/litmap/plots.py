"""Figure rendering for the report path.

Each analytics table gets a matching PNG next to its CSV. Rendering is
intentionally plain: one axes per figure, default styles, headless backend.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

SOURCE_COLORS = {"forum": "tab:purple", "preprint": "tab:green", "other": "tab:gray"}


def _grouped(rows, key_col, x_col, y_col):
    series = defaultdict(list)
    for row in rows:
        series[row[key_col]].append((row[x_col], row[y_col]))
    return series


def _plot_articles_per_year(ax, rows):
    for source, points in sorted(_grouped(rows, 0, 1, 2).items()):
        points.sort()
        ax.plot([p[0] for p in points], [p[1] for p in points],
                marker="o", label=source, color=SOURCE_COLORS.get(source))
    ax.set_xlabel("year")
    ax.set_ylabel("articles")
    ax.legend()


def _plot_articles_per_author(ax, rows):
    counts = [row[1] for row in rows]
    if counts:
        ax.hist(counts, bins=range(1, max(counts) + 2), log=True)
    ax.set_xlabel("articles per author")
    ax.set_ylabel("authors")


def _plot_authors_per_article(ax, rows):
    for source, points in sorted(_grouped(rows, 0, 1, 2).items()):
        points.sort()
        ax.bar([p[0] for p in points], [p[1] for p in points],
               alpha=0.6, label=source, color=SOURCE_COLORS.get(source))
    ax.set_yscale("log")
    ax.set_xlabel("authors per article")
    ax.set_ylabel("articles")
    ax.legend()


def _plot_fraction(ax, rows, x_label):
    groups = sorted({row[0] for row in rows})
    keys = sorted({row[1] for row in rows})
    bottom = {g: 0.0 for g in groups}
    values = {(row[0], row[1]): row[2] for row in rows}
    for key in keys:
        heights = [values.get((g, key), 0.0) for g in groups]
        ax.bar([str(g) for g in groups], heights,
               bottom=[bottom[g] for g in groups], label=str(key))
        for g, h in zip(groups, heights):
            bottom[g] += h
    ax.set_xlabel(x_label)
    ax.set_ylabel("fraction")
    ax.legend(fontsize="small")


def _plot_gini_by_cluster(ax, rows):
    ax.bar([str(row[0]) for row in rows], [row[1] for row in rows])
    ax.set_xlabel("cluster")
    ax.set_ylabel("gini")
    ax.set_ylim(0, 1)


def _plot_top_words(ax, rows, top=10):
    by_cluster = defaultdict(list)
    for cluster, word, count in rows:
        by_cluster[cluster].append((word, count))
    labels, counts = [], []
    for cluster in sorted(by_cluster):
        for word, count in by_cluster[cluster][:top]:
            labels.append(f"{cluster}:{word}")
            counts.append(count)
    ax.barh(labels[::-1], counts[::-1])
    ax.set_xlabel("count")


def _plot_top_authors(ax, rows):
    labels = [f"{row[0]}:{row[1]}" for row in rows]
    ax.barh(labels[::-1], [row[2] for row in rows][::-1])
    ax.set_xlabel("articles")


_RENDERERS = {
    "articles_per_year": _plot_articles_per_year,
    "articles_per_author": _plot_articles_per_author,
    "authors_per_article": _plot_authors_per_article,
    "top_authors_by_cluster": _plot_top_authors,
    "source_fraction_by_cluster": lambda ax, rows: _plot_fraction(ax, rows, "cluster"),
    "cluster_fraction_by_year": lambda ax, rows: _plot_fraction(ax, rows, "year"),
    "gini_by_cluster": _plot_gini_by_cluster,
    "word_frequencies_by_cluster": _plot_top_words,
}


def render_report(name: str, rows: list[tuple], out_path: str | Path) -> None:
    """Render one report's figure to ``out_path``."""
    fig, ax = plt.subplots(figsize=(7, 5))
    renderer = _RENDERERS.get(name)
    if renderer is not None:
        renderer(ax, rows)
    ax.set_title(name.replace("_", " "))
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def render_elbow(results: list[tuple[int, float]], out_path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot([k for k, _ in results], [inertia for _, inertia in results], marker="o")
    ax.set_xlabel("k")
    ax.set_ylabel("inertia")
    ax.set_title("elbow scan")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def render_projection(points: list[dict], out_path: str | Path, color_by: str = "cluster") -> None:
    """Scatter of the 2D map colored by cluster, source, or year."""
    fig, ax = plt.subplots(figsize=(6, 6))
    xs = [p["x"] for p in points]
    ys = [p["y"] for p in points]
    if color_by == "source":
        colors = [SOURCE_COLORS.get(p.get("source"), "tab:gray") for p in points]
        ax.scatter(xs, ys, s=8, c=colors, alpha=0.7, linewidths=0)
    else:
        values = [p.get(color_by) for p in points]
        numeric = [v if v is not None else -1 for v in values]
        sc = ax.scatter(xs, ys, s=8, c=numeric, cmap="tab10" if color_by == "cluster" else "viridis",
                        alpha=0.7, linewidths=0)
        fig.colorbar(sc, ax=ax, label=color_by)
    ax.set_xticks([])
    ax.set_yticks([])
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
