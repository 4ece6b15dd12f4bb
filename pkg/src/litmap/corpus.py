"""Normalized document model with deduplicating line-delimited persistence.

The corpus is the single source of truth every other stage reads. A
:class:`Corpus` is an immutable snapshot: mutating operations return a new
snapshot with the version counter bumped, which makes snapshots safe to
share across reader threads while a single writer advances the store.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, replace
from datetime import date
from pathlib import Path
from typing import Iterable, Iterator

from .errors import EmptyTitle, IoFailure, MalformedRecord

SOURCE_KINDS = ("forum", "preprint", "other")
LABELS = ("level0", "level1", "unlabeled")

# Field order of one persisted record; fixed so that output is byte-stable.
_RECORD_FIELDS = (
    "id", "source", "origin", "title", "authors", "published",
    "abstract", "body", "url", "label", "cluster",
)


@dataclass(frozen=True)
class SourceTag:
    """Where a document came from: one of forum/preprint/other plus a free-form origin."""

    kind: str
    origin: str = ""

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}, expected one of {SOURCE_KINDS}")


@dataclass(frozen=True)
class Document:
    """One article's normalized metadata."""

    id: str
    source: SourceTag
    title: str
    authors: tuple[str, ...] = ()
    published: date | None = None
    abstract: str = ""
    body: str = ""
    url: str = ""
    label: str = "unlabeled"
    cluster: int | None = None

    def __post_init__(self):
        if isinstance(self.authors, list):
            object.__setattr__(self, "authors", tuple(self.authors))
        if self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r}, expected one of {LABELS}")
        if self.label != "unlabeled" and self.source.kind != "preprint":
            raise ValueError(
                f"label {self.label!r} is only valid for preprint documents, "
                f"got source kind {self.source.kind!r}"
            )
        if self.cluster is not None and self.cluster < 0:
            raise ValueError(f"cluster must be >= 0, got {self.cluster}")


class Corpus:
    """Ordered, id-unique collection of documents.

    Equality compares documents and their order only; the version counter is
    an in-memory write tally and is not persisted, so round-tripping through
    :func:`save`/:func:`load` preserves equality.
    """

    def __init__(self, documents: Iterable[Document] = (), version: int = 0):
        self._docs: dict[str, Document] = {}
        for doc in documents:
            if doc.id in self._docs:
                raise ValueError(f"duplicate document id {doc.id!r}")
            self._docs[doc.id] = doc
        self.version = version

    def __len__(self) -> int:
        return len(self._docs)

    def __iter__(self) -> Iterator[Document]:
        return iter(self._docs.values())

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._docs

    def get(self, doc_id: str) -> Document | None:
        return self._docs.get(doc_id)

    def ids(self) -> list[str]:
        return list(self._docs.keys())

    def documents(self) -> list[Document]:
        return list(self._docs.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return list(self._docs.items()) == list(other._docs.items())

    def __repr__(self) -> str:
        return f"Corpus({len(self)} documents, version={self.version})"


def upsert_document(corpus: Corpus, doc: Document) -> Corpus:
    """Insert ``doc`` or replace the existing document with the same id."""
    if not doc.title.strip():
        raise EmptyTitle(f"document {doc.id!r} has a blank title")
    docs = dict(corpus._docs)
    docs[doc.id] = doc
    return Corpus(docs.values(), version=corpus.version + 1)


def upsert_many(corpus: Corpus, docs: Iterable[Document]) -> Corpus:
    """Upsert a batch in one version bump."""
    merged = dict(corpus._docs)
    count = 0
    for doc in docs:
        if not doc.title.strip():
            raise EmptyTitle(f"document {doc.id!r} has a blank title")
        merged[doc.id] = doc
        count += 1
    if count == 0:
        return corpus
    return Corpus(merged.values(), version=corpus.version + 1)


def _norm_key(text: str) -> str:
    return " ".join(text.lower().split())


def _dedup_key(doc: Document) -> tuple[str, str]:
    first_author = _norm_key(doc.authors[0]) if doc.authors else ""
    return (_norm_key(doc.title), first_author)


def _merge_group(group: list[Document]) -> Document:
    """Merge cross-posted duplicates: earliest publication wins, source tags
    of the losers are folded into the winner's origin notes."""
    def sort_key(item):
        position, doc = item
        # Undated records sort last, then by date, then by original position.
        return (doc.published is None, doc.published or date.max, position)

    ordered = sorted(enumerate(group), key=sort_key)
    winner = ordered[0][1]
    extra = sorted(
        {f"{d.source.kind}:{d.source.origin}" for _, d in ordered[1:]}
        - {f"{winner.source.kind}:{winner.source.origin}"}
    )
    if not extra:
        return winner
    note = "also " + ", ".join(extra)
    origin = f"{winner.source.origin}; {note}" if winner.source.origin else note
    return replace(winner, source=SourceTag(winner.source.kind, origin))


def deduplicate(corpus: Corpus) -> Corpus:
    """Merge documents whose normalized title and first author coincide.

    Normalization lowercases and collapses whitespace. Idempotent: a second
    pass finds every key unique and changes nothing.
    """
    groups: dict[tuple[str, str], list[Document]] = {}
    order: list[tuple[str, str]] = []
    for doc in corpus:
        key = _dedup_key(doc)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(doc)

    merged = [_merge_group(groups[key]) for key in order]
    if len(merged) == len(corpus) and merged == corpus.documents():
        return corpus
    return Corpus(merged, version=corpus.version + 1)


def _doc_to_record(doc: Document) -> dict:
    return {
        "id": doc.id,
        "source": doc.source.kind,
        "origin": doc.source.origin,
        "title": doc.title,
        "authors": list(doc.authors),
        "published": doc.published.isoformat() if doc.published else None,
        "abstract": doc.abstract,
        "body": doc.body,
        "url": doc.url,
        "label": doc.label,
        "cluster": doc.cluster,
    }


def _record_to_doc(rec: dict, line_number: int) -> Document:
    missing = [f for f in _RECORD_FIELDS if f not in rec]
    if missing:
        raise MalformedRecord(line_number, f"missing fields {missing}")
    if not isinstance(rec["title"], str) or not rec["title"].strip():
        raise MalformedRecord(line_number, "blank or non-string title")
    published = None
    if rec["published"] is not None:
        try:
            published = date.fromisoformat(rec["published"])
        except (TypeError, ValueError) as exc:
            raise MalformedRecord(line_number, f"bad published date: {exc}") from exc
    try:
        return Document(
            id=rec["id"],
            source=SourceTag(rec["source"], rec["origin"] or ""),
            title=rec["title"],
            authors=tuple(rec["authors"] or ()),
            published=published,
            abstract=rec["abstract"] or "",
            body=rec["body"] or "",
            url=rec["url"] or "",
            label=rec["label"] or "unlabeled",
            cluster=rec["cluster"],
        )
    except (TypeError, ValueError) as exc:
        raise MalformedRecord(line_number, str(exc)) from exc


def save(corpus: Corpus, path: str | Path) -> None:
    """Write one JSON record per line, UTF-8, fixed field order."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for doc in corpus:
                fh.write(json.dumps(_doc_to_record(doc), ensure_ascii=False))
                fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write corpus to {path}: {exc}") from exc


def load(path: str | Path) -> Corpus:
    """Read a corpus saved by :func:`save`. An empty file is an empty corpus."""
    docs: dict[str, Document] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line_number, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise MalformedRecord(line_number, f"invalid JSON: {exc}") from exc
                if not isinstance(rec, dict):
                    raise MalformedRecord(line_number, "record is not an object")
                doc = _record_to_doc(rec, line_number)
                if doc.id in docs:
                    raise MalformedRecord(line_number, f"duplicate id {doc.id!r}")
                docs[doc.id] = doc
    except OSError as exc:
        raise IoFailure(f"cannot read corpus from {path}: {exc}") from exc
    return Corpus(docs.values())


class CorpusStore:
    """Single-writer, multi-reader holder of the current corpus snapshot.

    Readers take an immutable snapshot; the writer swaps in a replacement
    atomically. Suitable for a serving process that reloads on demand.
    """

    def __init__(self, corpus: Corpus | None = None):
        self._lock = threading.Lock()
        self._corpus = corpus if corpus is not None else Corpus()

    def snapshot(self) -> Corpus:
        with self._lock:
            return self._corpus

    def replace(self, corpus: Corpus) -> None:
        with self._lock:
            self._corpus = corpus

    def apply(self, fn) -> Corpus:
        """Run ``fn(current) -> new`` under the writer lock and install the result."""
        with self._lock:
            self._corpus = fn(self._corpus)
            return self._corpus
