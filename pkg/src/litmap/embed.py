"""Maps composed article text to unit-norm 768-dimensional vectors.

Providers implement a tiny contract: deterministic ``embed(text)`` returning
a unit-norm vector. The feature-hashing baseline keeps the whole pipeline
runnable offline; a remote client lets a real sentence-embedding service be
plugged in behind the same contract.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import numpy as np
import requests

from .errors import BadDimension, EmptyInput, IoFailure, MalformedRecord, ProviderUnavailable

DIM = 768

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumerics; drops empty tokens."""
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t]


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _normalize(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        # All token signs cancelled: fall back to a fixed unit basis vector
        # so callers always get a valid direction.
        out = np.zeros(DIM)
        out[0] = 1.0
        return out
    return vec / norm


def baseline_hash_embed(text: str) -> np.ndarray:
    """Deterministic signed feature hashing into ``DIM`` buckets.

    Each token is hashed to a bucket and a sign; contributions accumulate and
    the result is L2-normalized. Stable across processes and platforms.
    """
    if not text.strip():
        raise EmptyInput("cannot embed empty text")
    vec = np.zeros(DIM)
    for token in tokenize(text):
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        value = int.from_bytes(digest, "big")
        index = value % DIM
        sign = 1.0 if (value >> 63) & 1 == 0 else -1.0
        vec[index] += sign
    return _normalize(vec)


class HashEmbedder:
    """Offline baseline provider backed by :func:`baseline_hash_embed`."""

    name = "hash-v1"

    def embed(self, text: str) -> np.ndarray:
        return baseline_hash_embed(text)


def remote_embed(
    endpoint: str,
    text: str,
    post: Callable[..., "requests.Response"] | None = None,
    timeout: float = 30.0,
) -> np.ndarray:
    """POST {"text": ...} to ``endpoint`` and return the normalized vector."""
    if not text.strip():
        raise EmptyInput("cannot embed empty text")
    do_post = post if post is not None else requests.post
    try:
        resp = do_post(endpoint, json={"text": text}, timeout=timeout)
    except requests.RequestException as exc:
        raise ProviderUnavailable(f"embedding endpoint unreachable: {exc}") from exc
    if resp.status_code != 200:
        raise ProviderUnavailable(f"embedding endpoint returned {resp.status_code}")
    try:
        payload = resp.json()
        vector = payload["vector"]
    except (ValueError, KeyError, TypeError) as exc:
        raise ProviderUnavailable(f"embedding endpoint returned malformed payload: {exc}") from exc
    vec = np.asarray(vector, dtype=float)
    if vec.shape != (DIM,):
        raise BadDimension(f"expected {DIM} components, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise BadDimension("vector contains non-finite components")
    return _normalize(vec)


class RemoteEmbedder:
    """Provider that defers to a remote embedding service.

    Safe to share across threads: at most ``max_in_flight`` requests are
    outstanding at any time.
    """

    def __init__(self, endpoint: str, name: str = "remote", post=None,
                 timeout: float = 30.0, max_in_flight: int = 4):
        self.endpoint = endpoint
        self.name = name
        self._post = post
        self._timeout = timeout
        self._slots = threading.Semaphore(max_in_flight)

    def embed(self, text: str) -> np.ndarray:
        with self._slots:
            return remote_embed(self.endpoint, text, post=self._post, timeout=self._timeout)


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """Dot product of two unit-norm vectors; symmetric by construction."""
    return float(np.dot(u, v))


@dataclass(frozen=True)
class EmbeddingRecord:
    """A document's vector plus the provenance needed for cache correctness."""

    doc_id: str
    vector: np.ndarray
    provider: str
    content_hash: str

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddingRecord):
            return NotImplemented
        return (
            self.doc_id == other.doc_id
            and self.provider == other.provider
            and self.content_hash == other.content_hash
            and np.array_equal(self.vector, other.vector)
        )


class EmbeddingStore:
    """Concurrent map of document id -> embedding record, persisted as one
    JSON record per line. Writes on identical keys are last-write-wins."""

    def __init__(self):
        self._lock = threading.Lock()
        self._records: dict[str, EmbeddingRecord] = {}

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._records

    def get(self, doc_id: str) -> EmbeddingRecord | None:
        return self._records.get(doc_id)

    def put(self, record: EmbeddingRecord) -> None:
        with self._lock:
            self._records[record.doc_id] = record

    def ids(self) -> list[str]:
        return list(self._records.keys())

    def is_current(self, doc_id: str, provider: str, text_hash: str) -> bool:
        rec = self._records.get(doc_id)
        return rec is not None and rec.provider == provider and rec.content_hash == text_hash

    def matrix(self, ids: Iterable[str]) -> np.ndarray:
        """Stack vectors for ``ids`` into an (n, DIM) matrix."""
        vectors = [self._records[i].vector for i in ids]
        if not vectors:
            return np.zeros((0, DIM))
        return np.stack(vectors)

    def save(self, path: str | Path) -> None:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                for rec in self._records.values():
                    fh.write(json.dumps({
                        "id": rec.doc_id,
                        "provider": rec.provider,
                        "hash": rec.content_hash,
                        "vector": rec.vector.tolist(),
                    }))
                    fh.write("\n")
        except OSError as exc:
            raise IoFailure(f"cannot write embeddings to {path}: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingStore":
        store = cls()
        try:
            with open(path, "r", encoding="utf-8") as fh:
                for line_number, line in enumerate(fh, start=1):
                    if not line.strip():
                        continue
                    try:
                        rec = json.loads(line)
                        vec = np.asarray(rec["vector"], dtype=float)
                        if vec.shape != (DIM,):
                            raise ValueError(f"vector has shape {vec.shape}")
                        store._records[rec["id"]] = EmbeddingRecord(
                            doc_id=rec["id"],
                            vector=vec,
                            provider=rec["provider"],
                            content_hash=rec["hash"],
                        )
                    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                        raise MalformedRecord(line_number, str(exc)) from exc
        except OSError as exc:
            raise IoFailure(f"cannot read embeddings from {path}: {exc}") from exc
        return store


def embed_corpus(corpus, provider, store: EmbeddingStore) -> int:
    """Embed every document whose cached vector is missing or stale.

    Returns the number of vectors computed. Cache keys are (provider,
    content hash of the composed text), so edits invalidate automatically.
    """
    from .ingest import compose_embed_text

    computed = 0
    for doc in corpus:
        text = compose_embed_text(doc)
        text_hash = content_hash(text)
        if store.is_current(doc.id, provider.name, text_hash):
            continue
        store.put(EmbeddingRecord(
            doc_id=doc.id,
            vector=provider.embed(text),
            provider=provider.name,
            content_hash=text_hash,
        ))
        computed += 1
    return computed
