"""Read-only HTTP facade over the corpus, projection, clusters, analytics
tables, and the filtered feed. Handlers are stateless over an immutable
snapshot, so concurrent readers are safe; reloads swap the snapshot."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Query
from fastapi.staticfiles import StaticFiles

from . import analytics
from .classify import FilterConfig, LogRegModel, filter_candidates, load_model
from .corpus import Corpus, load as load_corpus
from .dimred import Projection2D, load_projection
from .embed import EmbeddingStore, HashEmbedder, cosine_similarity
from .errors import EmptyInput


@dataclass
class ServiceState:
    corpus: Corpus
    projection: Projection2D | None = None
    embeddings: EmbeddingStore | None = None
    model: LogRegModel | None = None
    filter_cfg: FilterConfig = field(default_factory=FilterConfig)
    provider: object = None

    def __post_init__(self):
        if self.provider is None:
            self.provider = HashEmbedder()


def load_state(
    corpus_path: str | Path,
    projection_path: str | Path | None = None,
    cache_path: str | Path | None = None,
    model_path: str | Path | None = None,
    threshold: float = 0.75,
    provider=None,
) -> ServiceState:
    state = ServiceState(
        corpus=load_corpus(corpus_path),
        projection=load_projection(projection_path) if projection_path else None,
        embeddings=EmbeddingStore.load(cache_path) if cache_path else None,
        model=load_model(model_path) if model_path else None,
        filter_cfg=FilterConfig(threshold=threshold),
    )
    if provider is not None:
        state.provider = provider
    return state


def build_feed(state: ServiceState, since: date) -> list[dict]:
    """Score stored candidates published on or after ``since`` and keep the
    ones that clear the threshold; shared by the endpoint and the CLI so an
    offline run and the served feed agree exactly."""
    candidates = []
    for doc in state.corpus:
        if doc.published is None or doc.published < since:
            continue
        record = state.embeddings.get(doc.id) if state.embeddings else None
        if record is None:
            continue
        candidates.append((doc, record.vector))
    accepted = filter_candidates(state.model, candidates, state.filter_cfg)
    return [
        {
            "id": doc.id,
            "title": doc.title,
            "url": doc.url,
            "published": doc.published.isoformat(),
            "score": score,
        }
        for doc, score in accepted
    ]


def rank_by_similarity(
    state: ServiceState,
    query_vector: np.ndarray,
    k: int,
    exclude: str | None = None,
) -> list[dict]:
    """Exact brute-force cosine ranking; ties break toward the lower doc id."""
    scored = []
    for doc_id in state.embeddings.ids():
        if doc_id == exclude:
            continue
        record = state.embeddings.get(doc_id)
        scored.append((cosine_similarity(query_vector, record.vector), doc_id))
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    results = []
    for score, doc_id in scored[:k]:
        doc = state.corpus.get(doc_id)
        results.append({
            "id": doc_id,
            "title": doc.title if doc else "",
            "url": doc.url if doc else "",
            "score": max(-1.0, min(1.0, score)),
        })
    return results


def create_app(state: ServiceState, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="litmap", docs_url=None, redoc_url=None)

    @app.get("/map")
    def get_map():
        if state.projection is None or len(state.projection) == 0:
            raise HTTPException(status_code=409, detail="NotReady: no projection computed")
        points = []
        for doc_id in sorted(state.projection.coords):
            x, y = state.projection[doc_id]
            doc = state.corpus.get(doc_id)
            points.append({
                "id": doc_id,
                "x": x,
                "y": y,
                "cluster": doc.cluster if doc else None,
                "source": doc.source.kind if doc else None,
                "year": doc.published.year if doc and doc.published else None,
                "title": doc.title if doc else "",
            })
        return points

    @app.get("/search")
    def get_search(
        doc: str | None = None,
        text: str | None = None,
        k: int = Query(default=10, ge=1),
    ):
        if state.embeddings is None or len(state.embeddings) == 0:
            raise HTTPException(status_code=409, detail="NotReady: no embeddings computed")
        if doc is not None:
            record = state.embeddings.get(doc)
            if record is None or doc not in state.corpus:
                raise HTTPException(status_code=404, detail=f"UnknownDocument: {doc}")
            return rank_by_similarity(state, record.vector, k, exclude=doc)
        if text is not None:
            if not text.strip():
                raise HTTPException(status_code=400, detail="EmptyQuery")
            try:
                query_vector = state.provider.embed(text)
            except EmptyInput:
                raise HTTPException(status_code=400, detail="EmptyQuery")
            return rank_by_similarity(state, query_vector, k)
        raise HTTPException(status_code=400, detail="EmptyQuery: pass ?doc= or ?text=")

    @app.get("/feed")
    def get_feed(since: str):
        if state.model is None:
            raise HTTPException(status_code=409, detail="NoModel: train and load a model first")
        try:
            since_date = date.fromisoformat(since)
        except ValueError:
            raise HTTPException(status_code=400, detail=f"bad date {since!r}, want YYYY-MM-DD")
        if state.embeddings is None:
            raise HTTPException(status_code=409, detail="NotReady: no embeddings computed")
        return build_feed(state, since_date)

    @app.get("/stats/{report}")
    def get_stats(report: str):
        try:
            columns, rows = analytics.build_report(report, state.corpus)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"UnknownReport: {report}")
        return {"name": report, "columns": columns, "rows": [list(r) for r in rows]}

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
