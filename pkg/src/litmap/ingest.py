"""Pulls article metadata from the preprint archive API and from forum
export files, normalizes records into Documents, and composes the text each
document is embedded from."""

from __future__ import annotations

import json
import re
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import date
from html.parser import HTMLParser
from pathlib import Path
from typing import Callable, Iterable

import requests

from .corpus import Document, SourceTag
from .errors import MalformedFeed, MalformedRecord, MissingText, NetworkFailure, RateLimited

ARCHIVE_API_URL = "http://export.arxiv.org/api/query"
_ATOM = "{http://www.w3.org/2005/Atom}"

SEPARATOR = "[SEP]"

# Fallback abstract composition: take leading body paragraphs until this many
# characters are accumulated, capped at this many paragraphs.
FALLBACK_MIN_CHARS = 1000
FALLBACK_MAX_PARAGRAPHS = 5


@dataclass(frozen=True)
class RawRecord:
    """One unnormalized listing entry from the archive API."""

    native_id: str
    title: str
    authors: tuple[str, ...]
    published: date | None
    summary: str
    categories: tuple[str, ...]
    url: str


@dataclass
class IngestConfig:
    category: str = "cs.AI"
    page_size: int = 100
    date_range: tuple[date | None, date | None] | None = None
    polite_delay_ms: int = 3000

    def __post_init__(self):
        if self.page_size < 1:
            raise ValueError("page size must be >= 1")
        if self.polite_delay_ms < 0:
            raise ValueError("polite delay must be >= 0 ms")


def _collapse_ws(text: str) -> str:
    return " ".join(text.split())


def _byte_offset(data: bytes, line: int, column: int) -> int:
    """Translate an (line, column) parser position into a byte offset."""
    lines = data.split(b"\n")
    return sum(len(l) + 1 for l in lines[: line - 1]) + column


def parse_atom(feed: bytes) -> list[RawRecord]:
    """Parse an Atom listing feed into raw records, one per entry.

    Titles and summaries are whitespace-collapsed; authors keep feed order.
    """
    try:
        text = feed.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedFeed(f"feed is not UTF-8: {exc}", offset=exc.start) from exc
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line, column = exc.position
        raise MalformedFeed(str(exc), offset=_byte_offset(feed, line, column)) from exc

    records = []
    for entry in root.iter(f"{_ATOM}entry"):
        title_el = entry.find(f"{_ATOM}title")
        if title_el is None or not (title_el.text or "").strip():
            raise MalformedFeed("entry missing title")
        id_el = entry.find(f"{_ATOM}id")
        raw_id = (id_el.text or "").strip() if id_el is not None else ""
        if not raw_id:
            raise MalformedFeed("entry missing id")
        native_id = raw_id.rsplit("/abs/", 1)[-1] if "/abs/" in raw_id else raw_id

        authors = tuple(
            _collapse_ws(name.text or "")
            for name in entry.findall(f"{_ATOM}author/{_ATOM}name")
        )
        summary_el = entry.find(f"{_ATOM}summary")
        summary = _collapse_ws(summary_el.text or "") if summary_el is not None else ""

        published = None
        published_el = entry.find(f"{_ATOM}published")
        if published_el is not None and published_el.text:
            try:
                published = date.fromisoformat(published_el.text.strip()[:10])
            except ValueError:
                published = None

        categories = tuple(
            cat.get("term", "")
            for cat in entry.findall(f"{_ATOM}category")
            if cat.get("term")
        )
        url = raw_id
        for link in entry.findall(f"{_ATOM}link"):
            if link.get("rel") == "alternate" and link.get("href"):
                url = link.get("href")
                break

        records.append(
            RawRecord(
                native_id=native_id,
                title=_collapse_ws(title_el.text or ""),
                authors=authors,
                published=published,
                summary=summary,
                categories=categories,
                url=url,
            )
        )
    return records


class ArchiveClient:
    """Paged listing client for the preprint archive API.

    ``fetch`` may be injected for testing; it receives the query parameters
    and must return the raw feed bytes. Successive calls are separated by the
    configured polite delay.
    """

    def __init__(
        self,
        config: IngestConfig,
        fetch: Callable[[dict], bytes] | None = None,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
    ):
        self.config = config
        self._fetch = fetch if fetch is not None else self._http_fetch
        self._sleep = sleep
        self._clock = clock
        self._last_request: float | None = None

    def _http_fetch(self, params: dict) -> bytes:
        try:
            resp = requests.get(ARCHIVE_API_URL, params=params, timeout=60)
        except requests.RequestException as exc:
            raise NetworkFailure(f"archive API unreachable: {exc}") from exc
        if resp.status_code in (429, 503):
            raise RateLimited(f"archive API returned {resp.status_code}")
        if resp.status_code != 200:
            raise NetworkFailure(f"archive API returned {resp.status_code}")
        return resp.content

    def _wait_politely(self) -> None:
        if self._last_request is None:
            return
        elapsed = self._clock() - self._last_request
        remaining = self.config.polite_delay_ms / 1000.0 - elapsed
        if remaining > 0:
            self._sleep(remaining)

    def fetch_listing_page(self, offset: int) -> list[RawRecord]:
        """Fetch up to page-size records starting at ``offset`` in archive order."""
        if offset < 0:
            raise ValueError("offset must be >= 0")
        self._wait_politely()
        params = {
            "search_query": f"cat:{self.config.category}",
            "start": offset,
            "max_results": self.config.page_size,
        }
        feed = self._fetch(params)
        self._last_request = self._clock()
        return parse_atom(feed)

    def iter_records(self, max_records: int | None = None) -> Iterable[RawRecord]:
        """Walk the listing page by page until exhausted or ``max_records``."""
        offset = 0
        yielded = 0
        while True:
            page = self.fetch_listing_page(offset)
            if not page:
                return
            for rec in page:
                yield rec
                yielded += 1
                if max_records is not None and yielded >= max_records:
                    return
            offset += self.config.page_size


def fetch_listing_page(config: IngestConfig, offset: int) -> list[RawRecord]:
    """One-shot page fetch; use :class:`ArchiveClient` for paged crawls."""
    return ArchiveClient(config).fetch_listing_page(offset)


def raw_to_document(raw: RawRecord, label: str = "unlabeled") -> Document:
    return Document(
        id=f"arxiv:{raw.native_id}",
        source=SourceTag("preprint", "arxiv"),
        title=raw.title,
        authors=raw.authors,
        published=raw.published,
        abstract=raw.summary,
        url=raw.url,
        label=label,
    )


class _TextExtractor(HTMLParser):
    """Flattens markup to plain text, turning block elements into breaks."""

    _BLOCK = {"p", "div", "br", "li", "ul", "ol", "h1", "h2", "h3", "h4", "h5", "h6",
              "blockquote", "pre", "tr", "table"}

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.parts: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag in self._BLOCK:
            self.parts.append("\n\n")

    def handle_endtag(self, tag):
        if tag in self._BLOCK:
            self.parts.append("\n\n")

    def handle_data(self, data):
        self.parts.append(data)

    def text(self) -> str:
        raw = "".join(self.parts)
        paragraphs = [" ".join(p.split()) for p in re.split(r"\n\s*\n", raw)]
        return "\n\n".join(p for p in paragraphs if p)


def strip_markup(html: str) -> str:
    parser = _TextExtractor()
    parser.feed(html)
    parser.close()
    return parser.text()


def ingest_forum_export(path: str | Path) -> list[Document]:
    """Read a line-delimited forum export into Documents.

    Each line is an object with fields {slug, title, authors, date, tags[],
    body}. Posts tagged "event" (meetup coordination) are dropped; the body
    is flattened to plain text.
    """
    docs = []
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
            missing = [f for f in ("slug", "title", "authors", "date", "tags", "body") if f not in rec]
            if missing:
                raise MalformedRecord(line_number, f"missing fields {missing}")
            if "event" in rec["tags"]:
                continue
            published = None
            if rec["date"]:
                try:
                    published = date.fromisoformat(str(rec["date"])[:10])
                except ValueError as exc:
                    raise MalformedRecord(line_number, f"bad date: {exc}") from exc
            if not str(rec["title"]).strip():
                raise MalformedRecord(line_number, "blank title")
            docs.append(
                Document(
                    id=f"forum:{rec['slug']}",
                    source=SourceTag("forum", "alignment-forum"),
                    title=_collapse_ws(str(rec["title"])),
                    authors=tuple(rec["authors"] or ()),
                    published=published,
                    body=strip_markup(str(rec["body"])),
                    url=rec.get("url", ""),
                )
            )
    return docs


def compose_embed_text(doc: Document) -> str:
    """Text a document is embedded from: title, separator, then the abstract,
    falling back to the leading body paragraphs when no abstract exists.

    Paragraphs are taken in order until at least ``FALLBACK_MIN_CHARS``
    characters are accumulated or ``FALLBACK_MAX_PARAGRAPHS`` paragraphs are
    used, whichever comes first.
    """
    abstract = doc.abstract.strip()
    if abstract:
        return f"{doc.title}{SEPARATOR}{abstract}"
    paragraphs = [p.strip() for p in re.split(r"\n\s*\n", doc.body) if p.strip()]
    if not paragraphs:
        raise MissingText(f"document {doc.id!r} has neither abstract nor body")
    taken: list[str] = []
    total = 0
    for para in paragraphs[:FALLBACK_MAX_PARAGRAPHS]:
        taken.append(para)
        total += len(para)
        if total >= FALLBACK_MIN_CHARS:
            break
    return f"{doc.title}{SEPARATOR}" + "\n\n".join(taken)
