"""Provider contract, hashing baseline, remote client, and the cache."""

import json

import numpy as np
import pytest
import requests
from hypothesis import given, settings
from hypothesis import strategies as st

from litmap.embed import (
    DIM, EmbeddingRecord, EmbeddingStore, HashEmbedder, RemoteEmbedder,
    baseline_hash_embed, content_hash, cosine_similarity, embed_corpus,
    remote_embed,
)
from litmap.errors import BadDimension, EmptyInput, MalformedRecord, ProviderUnavailable

from conftest import make_doc
from litmap.corpus import Corpus


class TestBaselineHashEmbed:
    def test_deterministic_bitwise(self):
        a = baseline_hash_embed("reward hacking in deep systems")
        b = baseline_hash_embed("reward hacking in deep systems")
        assert np.array_equal(a, b)

    def test_unit_norm(self):
        vec = baseline_hash_embed("some words appear here")
        assert vec.shape == (DIM,)
        assert abs(np.linalg.norm(vec) - 1.0) <= 1e-6

    def test_repeated_token_same_direction(self):
        # Accumulation then normalization: "a a" points where "a" points.
        assert np.allclose(baseline_hash_embed("a a"), baseline_hash_embed("a"))

    def test_single_token_is_signed_basis_vector(self):
        vec = baseline_hash_embed("corrigibility")
        nonzero = np.flatnonzero(vec)
        assert len(nonzero) == 1
        assert vec[nonzero[0]] in (-1.0, 1.0)

    def test_empty_raises(self):
        with pytest.raises(EmptyInput):
            baseline_hash_embed("")
        with pytest.raises(EmptyInput):
            baseline_hash_embed("   ")

    def test_no_alphanumeric_tokens_falls_back_to_basis(self):
        vec = baseline_hash_embed("!!! ---")
        expected = np.zeros(DIM)
        expected[0] = 1.0
        assert np.array_equal(vec, expected)

    def test_separator_literal_is_an_ordinary_token(self):
        with_sep = baseline_hash_embed("title[SEP]abstract")
        manual = baseline_hash_embed("title sep abstract")
        assert np.array_equal(with_sep, manual)

    def test_unrelated_texts_not_parallel(self):
        u = baseline_hash_embed("game theoretic multi agent bargaining")
        v = baseline_hash_embed("spectral graph sparsification bounds")
        assert cosine_similarity(u, v) < 1.0


class TestCosineSimilarity:
    def test_identity(self):
        u = baseline_hash_embed("one two three")
        assert cosine_similarity(u, u) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_basis(self):
        u, v = np.zeros(DIM), np.zeros(DIM)
        u[3] = 1.0
        v[7] = 1.0
        assert cosine_similarity(u, v) == 0.0

    def test_antipodal(self):
        u = np.zeros(DIM)
        u[5] = 1.0
        assert cosine_similarity(u, -u) == -1.0

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_exact_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        u = rng.standard_normal(DIM)
        v = rng.standard_normal(DIM)
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        assert cosine_similarity(u, v) == cosine_similarity(v, u)


class _FakeResponse:
    def __init__(self, payload, status_code=200):
        self._payload = payload
        self.status_code = status_code

    def json(self):
        return self._payload


class TestRemoteEmbed:
    def test_pass_through_normalized(self):
        raw = np.zeros(DIM)
        raw[0] = 3.0
        posts = []

        def post(url, json=None, timeout=None):
            posts.append((url, json))
            return _FakeResponse({"vector": raw.tolist()})

        vec = remote_embed("http://embedder.local/v1", "text body", post=post)
        assert vec[0] == 1.0
        assert posts[0][1] == {"text": "text body"}

    def test_wrong_length_rejected(self):
        def post(url, json=None, timeout=None):
            return _FakeResponse({"vector": [0.5] * 512})

        with pytest.raises(BadDimension):
            remote_embed("http://embedder.local/v1", "text", post=post)

    def test_unreachable_endpoint(self):
        def post(url, json=None, timeout=None):
            raise requests.ConnectionError("no route to host")

        with pytest.raises(ProviderUnavailable):
            remote_embed("http://embedder.local/v1", "text", post=post)

    def test_http_error_status(self):
        def post(url, json=None, timeout=None):
            return _FakeResponse({}, status_code=500)

        with pytest.raises(ProviderUnavailable):
            remote_embed("http://embedder.local/v1", "text", post=post)

    def test_empty_text(self):
        with pytest.raises(EmptyInput):
            remote_embed("http://embedder.local/v1", "  ")


class TestEmbeddingStore:
    def test_round_trip(self, tmp_path):
        store = EmbeddingStore()
        for i in range(3):
            text = f"document number {i}"
            store.put(EmbeddingRecord(
                doc_id=f"x:{i}",
                vector=baseline_hash_embed(text),
                provider="hash-v1",
                content_hash=content_hash(text),
            ))
        path = tmp_path / "cache.jsonl"
        store.save(path)
        loaded = EmbeddingStore.load(path)
        assert loaded.ids() == store.ids()
        for doc_id in store.ids():
            assert loaded.get(doc_id) == store.get(doc_id)

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        path.write_text('{"id": "x", "provider": "p"}\n')
        with pytest.raises(MalformedRecord):
            EmbeddingStore.load(path)

    def test_stale_hash_not_current(self):
        store = EmbeddingStore()
        store.put(EmbeddingRecord("x:1", baseline_hash_embed("old"), "hash-v1",
                                  content_hash("old")))
        assert store.is_current("x:1", "hash-v1", content_hash("old"))
        assert not store.is_current("x:1", "hash-v1", content_hash("new"))
        assert not store.is_current("x:1", "other", content_hash("old"))


class TestEmbedCorpus:
    def test_embeds_all_and_caches(self):
        corpus = Corpus([
            make_doc("x:1", title="First", abstract="body of one"),
            make_doc("x:2", title="Second", abstract="body of two"),
        ])
        store = EmbeddingStore()
        assert embed_corpus(corpus, HashEmbedder(), store) == 2
        assert embed_corpus(corpus, HashEmbedder(), store) == 0  # cache hit

    def test_content_change_invalidates(self):
        doc = make_doc("x:1", title="First", abstract="original")
        store = EmbeddingStore()
        embed_corpus(Corpus([doc]), HashEmbedder(), store)
        from dataclasses import replace
        edited = Corpus([replace(doc, abstract="rewritten")])
        assert embed_corpus(edited, HashEmbedder(), store) == 1

    def test_every_stored_vector_unit_norm(self):
        corpus = Corpus([make_doc(f"x:{i}", title=f"Title {i}", abstract=f"text {i}")
                         for i in range(10)])
        store = EmbeddingStore()
        embed_corpus(corpus, HashEmbedder(), store)
        for doc_id in store.ids():
            assert abs(np.linalg.norm(store.get(doc_id).vector) - 1.0) <= 1e-6


def test_remote_embedder_name():
    embedder = RemoteEmbedder("http://host/v1", name="sentence-svc")
    assert embedder.name == "sentence-svc"


def test_remote_embedder_bounds_in_flight_requests():
    import threading

    raw = np.zeros(DIM)
    raw[0] = 1.0
    in_flight = 0
    peak = 0
    lock = threading.Lock()
    gate = threading.Barrier(8, timeout=10)

    def post(url, json=None, timeout=None):
        nonlocal in_flight, peak
        with lock:
            in_flight += 1
            peak = max(peak, in_flight)
        import time as _time
        _time.sleep(0.02)
        with lock:
            in_flight -= 1
        return _FakeResponse({"vector": raw.tolist()})

    embedder = RemoteEmbedder("http://host/v1", post=post, max_in_flight=2)

    def worker():
        gate.wait()
        embedder.embed("text")

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert peak <= 2
