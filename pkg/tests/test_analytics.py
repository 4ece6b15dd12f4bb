"""Descriptive statistics against hand counts and brute-force oracles."""

from datetime import date

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from litmap.analytics import (
    AuthorCounts, DEFAULT_STOP_WORDS, articles_per_author, articles_per_year,
    authors_per_article, build_report, cluster_fraction_by_year, gini,
    source_fraction_by_cluster, top_authors_by_cluster, word_frequencies,
    write_table,
)
from litmap.corpus import Corpus
from litmap.errors import Unclustered, ZeroMean

from conftest import make_doc


def gini_oracle(values):
    """Literal double sum over all ordered pairs."""
    values = list(values)
    n = len(values)
    mean = sum(values) / n
    total = 0.0
    for a in values:
        for b in values:
            total += abs(a - b)
    return total / (2.0 * n * n * mean)


class TestGini:
    def test_perfect_equality(self):
        assert gini([1, 1, 1, 1]) == 0.0

    def test_zero_one(self):
        # |0-1| + |1-0| = 2 over 2 * 4 * 0.5 = 4
        assert gini([0, 1]) == 0.5

    def test_top_author_counts_fixture(self):
        counts = [154, 95, 94, 57, 44]
        assert gini(counts) == pytest.approx(gini_oracle(counts), abs=1e-15)
        assert gini(counts) == pytest.approx(0.23243243243243245, abs=1e-12)

    def test_all_zero_raises(self):
        with pytest.raises(ZeroMean):
            gini([0, 0, 0])

    def test_accepts_author_counts_and_dicts(self):
        counts = AuthorCounts({"a": 3, "b": 1})
        assert gini(counts) == gini([3, 1])
        assert gini({"a": 3, "b": 1}) == gini([3, 1])

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(0, 500), min_size=1, max_size=30).filter(lambda v: sum(v) > 0))
    def test_matches_oracle(self, values):
        assert gini(values) == pytest.approx(gini_oracle(values), abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.integers(1, 100), min_size=2, max_size=20),
        st.floats(0.01, 1000.0),
    )
    def test_scale_invariance(self, values, alpha):
        scaled = [alpha * v for v in values]
        assert gini(scaled) == pytest.approx(gini(values), abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 40), st.integers(1, 100))
    def test_constant_vector_is_zero(self, n, c):
        assert gini([c] * n) == 0.0


class TestCountingReports:
    def test_articles_per_year(self):
        corpus = Corpus([
            make_doc("x:1", published=date(2020, 1, 1)),
            make_doc("x:2", published=date(2020, 6, 1)),
            make_doc("x:3", published=date(2020, 12, 1)),
            make_doc("x:4", published=date(2021, 1, 1)),
        ])
        series = articles_per_year(corpus, source="preprint")
        assert series.counts == {2020: 3, 2021: 1}
        assert series.skipped == 0

    def test_articles_per_year_skips_undated(self):
        corpus = Corpus([
            make_doc("x:1", published=None),
            make_doc("x:2", published=date(2021, 1, 1)),
        ])
        series = articles_per_year(corpus, source="preprint")
        assert series.counts == {2021: 1}
        assert series.skipped == 1

    def test_articles_per_year_empty(self):
        series = articles_per_year(Corpus())
        assert series.counts == {}

    def test_articles_per_author(self):
        corpus = Corpus([
            make_doc("x:1", authors=("A",)),
            make_doc("x:2", authors=("A", "B")),
        ])
        counts = articles_per_author(corpus)
        assert counts.counts == {"A": 2, "B": 1}
        assert counts.n == 2
        assert counts.mean == 1.5

    def test_authors_per_article(self):
        corpus = Corpus([
            make_doc("x:1", authors=("A",)),
            make_doc("x:2", authors=("B",)),
            make_doc("x:3", authors=("A", "B", "C", "D")),
        ])
        assert authors_per_article(corpus, source="preprint") == {1: 2, 4: 1}

    def test_zero_author_bucket_kept(self):
        corpus = Corpus([make_doc("x:1", authors=())])
        assert authors_per_article(corpus) == {0: 1}


class TestClusterTables:
    def _clustered_corpus(self):
        return Corpus([
            make_doc("x:1", authors=("Ann", "Bob"), cluster=0, published=date(2020, 1, 1)),
            make_doc("x:2", authors=("Ann",), cluster=0, published=date(2020, 3, 1)),
            make_doc("x:3", authors=("Ann", "Cem"), cluster=0, published=date(2021, 1, 1)),
            make_doc("f:1", kind="forum", origin="af", authors=("Dee",), cluster=1,
                     published=date(2021, 2, 1), abstract="", body="text"),
            make_doc("f:2", kind="forum", origin="af", authors=("Dee", "Eli"), cluster=1,
                     published=date(2021, 6, 1), abstract="", body="text"),
        ])

    def test_top_authors_argmax(self):
        rows = top_authors_by_cluster(self._clustered_corpus(), m=1)
        assert rows == [(0, "Ann", 3), (1, "Dee", 2)]

    def test_top_authors_alphabetical_tiebreak(self):
        corpus = Corpus([
            make_doc("x:1", authors=("Zoe",), cluster=0),
            make_doc("x:2", authors=("Zoe",), cluster=0),
            make_doc("x:3", authors=("Amy",), cluster=0),
            make_doc("x:4", authors=("Amy",), cluster=0),
        ])
        rows = top_authors_by_cluster(corpus, m=1)
        assert rows == [(0, "Amy", 2)]

    def test_m_larger_than_author_count(self):
        corpus = Corpus([make_doc("x:1", authors=("Ann", "Bob"), cluster=0)])
        rows = top_authors_by_cluster(corpus, m=10)
        assert len(rows) == 2

    def test_unclustered_raises(self):
        corpus = Corpus([make_doc("x:1", cluster=None)])
        with pytest.raises(Unclustered):
            top_authors_by_cluster(corpus)
        with pytest.raises(Unclustered):
            source_fraction_by_cluster(corpus)

    def test_source_fraction_ratio(self):
        corpus = Corpus([
            make_doc("f:1", kind="forum", cluster=0, abstract="", body="t"),
            make_doc("f:2", kind="forum", cluster=0, abstract="", body="t"),
            make_doc("f:3", kind="forum", cluster=0, abstract="", body="t"),
            make_doc("x:1", kind="preprint", cluster=0),
        ])
        rows = source_fraction_by_cluster(corpus)
        assert (0, "forum", 0.75) in rows
        assert (0, "preprint", 0.25) in rows

    def test_single_cluster_year_fraction_one(self):
        corpus = Corpus([make_doc("x:1", cluster=2, published=date(2019, 5, 1))])
        assert cluster_fraction_by_year(corpus) == [(2019, 2, 1.0)]

    @settings(max_examples=25, deadline=None)
    @given(st.lists(
        st.tuples(st.sampled_from(["forum", "preprint", "other"]),
                  st.integers(0, 3), st.integers(2015, 2022)),
        min_size=1, max_size=40,
    ))
    def test_fractions_sum_to_one(self, spec):
        docs = [
            make_doc(f"d:{i}", kind=kind, cluster=cluster, published=date(year, 1, 1),
                     abstract="a", label="unlabeled")
            for i, (kind, cluster, year) in enumerate(spec)
        ]
        corpus = Corpus(docs)
        by_cluster = {}
        for cluster, _, fraction in source_fraction_by_cluster(corpus):
            by_cluster[cluster] = by_cluster.get(cluster, 0.0) + fraction
        assert all(abs(total - 1.0) <= 1e-12 for total in by_cluster.values())
        by_year = {}
        for year, _, fraction in cluster_fraction_by_year(corpus):
            by_year[year] = by_year.get(year, 0.0) + fraction
        assert all(abs(total - 1.0) <= 1e-12 for total in by_year.values())


class TestWordFrequencies:
    def test_stop_list_applied(self):
        assert word_frequencies(["model will run run"]) == [("run", 2)]

    def test_all_tokens_stopped(self):
        assert word_frequencies(["model models ai sep"]) == []

    def test_caller_additions(self):
        result = word_frequencies(["alpha beta beta"], stop_words=["beta"])
        assert result == [("alpha", 1)]

    def test_stop_comparison_case_insensitive(self):
        # capitalized stop words in text still drop after lowercasing
        assert word_frequencies(["AI Model SEP"]) == []

    def test_documents_use_all_text_fields(self):
        doc = make_doc("x:1", title="gradient", abstract="descent descent",
                       body="gradient flows")
        result = word_frequencies([doc])
        assert result[0] == ("descent", 2) or ("gradient", 2) == result[0]
        counts = dict(result)
        assert counts["gradient"] == 2
        assert counts["descent"] == 2
        assert counts["flows"] == 1

    def test_rank_count_then_alphabetical(self):
        result = word_frequencies(["zeta alpha zeta alpha beta"])
        assert result == [("alpha", 2), ("zeta", 2), ("beta", 1)]

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.text(alphabet="abcd e", min_size=0, max_size=30), max_size=6))
    def test_matches_naive_recount(self, texts):
        from collections import Counter
        expected = Counter()
        for text in texts:
            for token in text.lower().split():
                token = "".join(ch for ch in token if ch.isalnum())
                if token and token not in DEFAULT_STOP_WORDS:
                    expected[token] += 1
        assert dict(word_frequencies(texts)) == dict(expected)


class TestReportRegistry:
    def test_articles_per_year_table(self):
        corpus = Corpus([
            make_doc("x:1", published=date(2020, 1, 1)),
            make_doc("f:1", kind="forum", published=date(2021, 1, 1), abstract="", body="t"),
        ])
        header, rows = build_report("articles_per_year", corpus)
        assert header == ["source", "year", "count"]
        assert ("preprint", 2020, 1) in rows
        assert ("forum", 2021, 1) in rows

    def test_unknown_report(self):
        with pytest.raises(KeyError):
            build_report("nope", Corpus())

    def test_write_table(self, tmp_path):
        path = tmp_path / "table.csv"
        write_table(path, ["a", "b"], [(1, "x"), (2, "y")])
        assert path.read_text() == "a,b\n1,x\n2,y\n"
