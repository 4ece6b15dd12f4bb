"""Descriptive statistics over the corpus: publication time series, author
histograms, inequality of output, per-cluster author tables, source and
time fractions, and stop-word-filtered word frequencies.

Every operation is a pure function of a corpus snapshot and returns plain
data; tabular emission lives in :func:`write_table` and the REPORTS
registry so the CLI and the HTTP service serve identical tables.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .corpus import Corpus, Document
from .embed import tokenize
from .errors import Unclustered, ZeroMean

# Words that dominate every cluster and carry no contrast between them.
DEFAULT_STOP_WORDS = frozenset({
    "will", "post", "problem", "example", "one", "sep",
    "ai", "agent", "human", "model", "models",
})


@dataclass
class AuthorCounts:
    """Article counts per author; authors appear only if they have articles."""

    counts: dict[str, int]

    @property
    def n(self) -> int:
        return len(self.counts)

    @property
    def mean(self) -> float:
        return sum(self.counts.values()) / len(self.counts) if self.counts else 0.0

    def values(self) -> list[int]:
        return list(self.counts.values())


@dataclass
class YearSeries:
    """Article counts by calendar year for one source; documents without a
    publication date are excluded and tallied in ``skipped``."""

    counts: dict[int, int]
    skipped: int = 0


def articles_per_year(corpus: Corpus, source: str | None = None) -> YearSeries:
    counts: Counter[int] = Counter()
    skipped = 0
    for doc in corpus:
        if source is not None and doc.source.kind != source:
            continue
        if doc.published is None:
            skipped += 1
            continue
        counts[doc.published.year] += 1
    return YearSeries(counts=dict(sorted(counts.items())), skipped=skipped)


def articles_per_author(corpus: Corpus) -> AuthorCounts:
    counts: Counter[str] = Counter()
    for doc in corpus:
        for author in doc.authors:
            counts[author] += 1
    return AuthorCounts(counts=dict(counts))


def authors_per_article(corpus: Corpus, source: str | None = None) -> dict[int, int]:
    """Distribution of author-list lengths. Documents with no listed author
    land in bucket 0 and are kept."""
    histogram: Counter[int] = Counter()
    for doc in corpus:
        if source is not None and doc.source.kind != source:
            continue
        histogram[len(doc.authors)] += 1
    return dict(sorted(histogram.items()))


def gini(counts) -> float:
    """Inequality as half the relative mean absolute difference:
    the exact double sum of |x_i - x_j| over all pairs, divided by 2 n^2 xbar.
    """
    if isinstance(counts, AuthorCounts):
        values = np.asarray(counts.values(), dtype=float)
    elif isinstance(counts, dict):
        values = np.asarray(list(counts.values()), dtype=float)
    else:
        values = np.asarray(list(counts), dtype=float)
    if values.size == 0:
        raise ZeroMean("no counts given")
    mean = values.mean()
    if mean == 0.0:
        raise ZeroMean("all counts are zero")
    n = values.size
    abs_diff = np.abs(values[:, None] - values[None, :]).sum()
    return float(abs_diff / (2.0 * n * n * mean))


def _require_clustered(corpus: Corpus) -> None:
    for doc in corpus:
        if doc.cluster is None:
            raise Unclustered(f"document {doc.id!r} has no cluster label")


def top_authors_by_cluster(corpus: Corpus, m: int = 5) -> list[tuple[int, str, int]]:
    """Per cluster, the m most prolific authors; count ties break alphabetically."""
    _require_clustered(corpus)
    per_cluster: dict[int, Counter[str]] = {}
    for doc in corpus:
        bucket = per_cluster.setdefault(doc.cluster, Counter())
        for author in doc.authors:
            bucket[author] += 1
    rows: list[tuple[int, str, int]] = []
    for cluster in sorted(per_cluster):
        ranked = sorted(per_cluster[cluster].items(), key=lambda kv: (-kv[1], kv[0]))
        for author, count in ranked[:m]:
            rows.append((cluster, author, count))
    return rows


def source_fraction_by_cluster(corpus: Corpus) -> list[tuple[int, str, float]]:
    """Fractions of each source kind within every cluster; sums to 1 per cluster."""
    _require_clustered(corpus)
    totals: dict[int, Counter[str]] = {}
    for doc in corpus:
        totals.setdefault(doc.cluster, Counter())[doc.source.kind] += 1
    rows = []
    for cluster in sorted(totals):
        total = sum(totals[cluster].values())
        for kind in sorted(totals[cluster]):
            rows.append((cluster, kind, totals[cluster][kind] / total))
    return rows


def cluster_fraction_by_year(corpus: Corpus) -> list[tuple[int, int, float]]:
    """Fractions of each cluster within every publication year; sums to 1 per year.
    Documents without a date are skipped."""
    _require_clustered(corpus)
    totals: dict[int, Counter[int]] = {}
    for doc in corpus:
        if doc.published is None:
            continue
        totals.setdefault(doc.published.year, Counter())[doc.cluster] += 1
    rows = []
    for year in sorted(totals):
        total = sum(totals[year].values())
        for cluster in sorted(totals[year]):
            rows.append((year, cluster, totals[year][cluster] / total))
    return rows


def word_frequencies(
    docs: Iterable[Document | str],
    stop_words: Iterable[str] = (),
) -> list[tuple[str, int]]:
    """Ranked (word, count) over the documents' text, lowercased and split on
    non-alphanumerics, with the default stop list plus caller additions
    removed. Ranked by count descending, then alphabetically."""
    stops = set(DEFAULT_STOP_WORDS)
    stops.update(w.lower() for w in stop_words)
    counts: Counter[str] = Counter()
    for item in docs:
        if isinstance(item, str):
            text = item
        else:
            text = " ".join((item.title, item.abstract, item.body))
        for token in tokenize(text):
            if token not in stops:
                counts[token] += 1
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


# --- tabular emission -------------------------------------------------------

def write_table(path: str | Path, header: list[str], rows: list[tuple]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _table_articles_per_year(corpus: Corpus):
    rows = []
    for kind in ("forum", "preprint", "other"):
        series = articles_per_year(corpus, source=kind)
        rows.extend((kind, year, count) for year, count in series.counts.items())
    return ["source", "year", "count"], rows


def _table_articles_per_author(corpus: Corpus):
    counts = articles_per_author(corpus)
    ranked = sorted(counts.counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ["author", "count"], ranked


def _table_authors_per_article(corpus: Corpus):
    rows = []
    for kind in ("forum", "preprint", "other"):
        for size, count in authors_per_article(corpus, source=kind).items():
            rows.append((kind, size, count))
    return ["source", "authors", "articles"], rows


def _table_top_authors_by_cluster(corpus: Corpus):
    return ["cluster", "author", "count"], top_authors_by_cluster(corpus)


def _table_source_fraction_by_cluster(corpus: Corpus):
    return ["cluster", "source", "fraction"], source_fraction_by_cluster(corpus)


def _table_cluster_fraction_by_year(corpus: Corpus):
    return ["year", "cluster", "fraction"], cluster_fraction_by_year(corpus)


def _table_gini_by_cluster(corpus: Corpus):
    """Author-output inequality within each cluster."""
    _require_clustered(corpus)
    clusters: dict[int, list[Document]] = {}
    for doc in corpus:
        clusters.setdefault(doc.cluster, []).append(doc)
    rows = []
    for cluster in sorted(clusters):
        counts: Counter[str] = Counter()
        for doc in clusters[cluster]:
            for author in doc.authors:
                counts[author] += 1
        if counts:
            rows.append((cluster, gini(AuthorCounts(dict(counts)))))
    return ["cluster", "gini"], rows


def _table_word_frequencies_by_cluster(corpus: Corpus, top: int = 25):
    _require_clustered(corpus)
    clusters: dict[int, list[Document]] = {}
    for doc in corpus:
        clusters.setdefault(doc.cluster, []).append(doc)
    rows = []
    for cluster in sorted(clusters):
        for word, count in word_frequencies(clusters[cluster])[:top]:
            rows.append((cluster, word, count))
    return ["cluster", "word", "count"], rows


REPORTS = {
    "articles_per_year": _table_articles_per_year,
    "articles_per_author": _table_articles_per_author,
    "authors_per_article": _table_authors_per_article,
    "top_authors_by_cluster": _table_top_authors_by_cluster,
    "source_fraction_by_cluster": _table_source_fraction_by_cluster,
    "cluster_fraction_by_year": _table_cluster_fraction_by_year,
    "gini_by_cluster": _table_gini_by_cluster,
    "word_frequencies_by_cluster": _table_word_frequencies_by_cluster,
}


def build_report(name: str, corpus: Corpus) -> tuple[list[str], list[tuple]]:
    if name not in REPORTS:
        raise KeyError(name)
    return REPORTS[name](corpus)
