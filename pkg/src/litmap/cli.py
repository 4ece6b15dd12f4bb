"""Command-line entry point wiring the pipeline stages together.

Default file layout under --data-dir (./data):
    corpus.jsonl       the document store
    embeddings.jsonl   cached vectors
    projection.jsonl   2D coordinates
    model.txt          trained classifier
    reports/           CSV tables plus rendered figures
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from datetime import date
from pathlib import Path

from . import analytics, plots
from .classify import (
    FilterConfig, LabeledSet, SplitConfig, evaluate, fit_logreg, load_model,
    save_model, split,
)
from .cluster import best_kmeans, elbow_scan
from .corpus import Corpus, deduplicate, load as load_corpus, save as save_corpus, upsert_many
from .dimred import DimRedConfig, project, save_projection
from .embed import EmbeddingStore, HashEmbedder, RemoteEmbedder, embed_corpus
from .errors import LitmapError
from .ingest import ArchiveClient, IngestConfig, ingest_forum_export, raw_to_document
from .service import ServiceState, build_feed, create_app, load_state


def _paths(args) -> dict[str, Path]:
    root = Path(args.data_dir)
    return {
        "corpus": Path(args.corpus) if getattr(args, "corpus", None) else root / "corpus.jsonl",
        "cache": Path(args.cache) if getattr(args, "cache", None) else root / "embeddings.jsonl",
        "projection": Path(args.projection) if getattr(args, "projection", None) else root / "projection.jsonl",
        "model": Path(args.model) if getattr(args, "model", None) else root / "model.txt",
        "reports": root / "reports",
    }


def _load_corpus_or_empty(path: Path) -> Corpus:
    return load_corpus(path) if path.exists() else Corpus()


def _load_store_or_empty(path: Path) -> EmbeddingStore:
    return EmbeddingStore.load(path) if path.exists() else EmbeddingStore()


def _provider(args):
    if getattr(args, "provider", "hash") == "remote":
        if not getattr(args, "endpoint", None):
            raise SystemExit("--endpoint is required with --provider remote")
        return RemoteEmbedder(args.endpoint)
    return HashEmbedder()


def cmd_ingest_arxiv(args) -> int:
    paths = _paths(args)
    date_from = date.fromisoformat(args.from_date) if args.from_date else None
    date_to = date.fromisoformat(args.to_date) if args.to_date else None
    config = IngestConfig(
        category=args.category,
        page_size=args.page_size,
        date_range=(date_from, date_to),
        polite_delay_ms=args.delay_ms,
    )
    client = ArchiveClient(config)
    docs = []
    for raw in client.iter_records(max_records=args.max_records):
        if raw.published is not None:
            if date_from and raw.published < date_from:
                continue
            if date_to and raw.published > date_to:
                continue
        docs.append(raw_to_document(raw, label=args.label))
    corpus = upsert_many(_load_corpus_or_empty(paths["corpus"]), docs)
    paths["corpus"].parent.mkdir(parents=True, exist_ok=True)
    save_corpus(corpus, paths["corpus"])
    print(f"ingested {len(docs)} archive records; corpus now {len(corpus)} documents")
    return 0


def cmd_ingest_forum(args) -> int:
    paths = _paths(args)
    docs = ingest_forum_export(args.file)
    corpus = upsert_many(_load_corpus_or_empty(paths["corpus"]), docs)
    paths["corpus"].parent.mkdir(parents=True, exist_ok=True)
    save_corpus(corpus, paths["corpus"])
    print(f"ingested {len(docs)} forum posts; corpus now {len(corpus)} documents")
    return 0


def cmd_dedup(args) -> int:
    paths = _paths(args)
    corpus = load_corpus(paths["corpus"])
    before = len(corpus)
    corpus = deduplicate(corpus)
    save_corpus(corpus, paths["corpus"])
    print(f"deduplicated: {before} -> {len(corpus)} documents")
    return 0


def cmd_embed(args) -> int:
    paths = _paths(args)
    corpus = load_corpus(paths["corpus"])
    store = _load_store_or_empty(paths["cache"])
    computed = embed_corpus(corpus, _provider(args), store)
    paths["cache"].parent.mkdir(parents=True, exist_ok=True)
    store.save(paths["cache"])
    print(f"embedded {computed} documents ({len(store)} cached)")
    return 0


def cmd_project(args) -> int:
    paths = _paths(args)
    corpus = load_corpus(paths["corpus"])
    store = EmbeddingStore.load(paths["cache"])
    ids = [doc.id for doc in corpus if doc.id in store]
    cfg = DimRedConfig(n_neighbors=args.n_neighbors, n_epochs=args.epochs, seed=args.seed)
    projection = project(ids, store.matrix(ids), cfg)
    paths["projection"].parent.mkdir(parents=True, exist_ok=True)
    save_projection(projection, paths["projection"])
    print(f"projected {len(projection)} documents -> {paths['projection']}")
    return 0


def cmd_cluster(args) -> int:
    paths = _paths(args)
    corpus = load_corpus(paths["corpus"])
    store = EmbeddingStore.load(paths["cache"])
    ids = [doc.id for doc in corpus if doc.id in store]
    if not ids:
        raise SystemExit("no embedded documents; run `litmap embed` first")
    matrix = store.matrix(ids)

    model = best_kmeans(matrix, k=args.k, restarts=args.restarts, base_seed=args.seed)
    labeled = {doc_id: int(label) for doc_id, label in zip(ids, model.labels)}
    corpus = Corpus(
        (replace(doc, cluster=labeled.get(doc.id, doc.cluster)) for doc in corpus),
        version=corpus.version + 1,
    )
    save_corpus(corpus, paths["corpus"])
    print(f"k={args.k} inertia={model.inertia:.4f}; labels written to {paths['corpus']}")

    k_max = min(args.scan_max, len(ids))
    scan = elbow_scan(matrix, range(1, k_max + 1), seeds_per_k=args.scan_seeds,
                      base_seed=args.seed)
    paths["reports"].mkdir(parents=True, exist_ok=True)
    elbow_csv = paths["reports"] / "elbow.csv"
    analytics.write_table(elbow_csv, ["k", "inertia"], scan)
    plots.render_elbow(scan, paths["reports"] / "elbow.png")
    print(f"elbow table -> {elbow_csv}")
    return 0


def cmd_analyze(args) -> int:
    paths = _paths(args)
    corpus = load_corpus(paths["corpus"])
    names = list(analytics.REPORTS) if args.report == "all" else [args.report]
    paths["reports"].mkdir(parents=True, exist_ok=True)
    for name in names:
        try:
            header, rows = analytics.build_report(name, corpus)
        except KeyError:
            known = ", ".join(analytics.REPORTS)
            raise SystemExit(f"unknown report {name!r}; known reports: {known}")
        csv_path = paths["reports"] / f"{name}.csv"
        analytics.write_table(csv_path, header, rows)
        print(f"{name}: {len(rows)} rows -> {csv_path}")
        if not args.no_figure:
            plots.render_report(name, rows, paths["reports"] / f"{name}.png")
    return 0


def cmd_train(args) -> int:
    paths = _paths(args)
    corpus = load_corpus(paths["corpus"])
    store = EmbeddingStore.load(paths["cache"])
    pairs = []
    for doc in corpus:
        if doc.label in ("level0", "level1") and doc.id in store:
            pairs.append((store.get(doc.id).vector, 1 if doc.label == "level0" else 0))
    if not pairs:
        raise SystemExit("no labeled, embedded documents to train on")
    labeled = LabeledSet.from_pairs(pairs)
    train_set, test_set = split(labeled, SplitConfig(train_fraction=args.split, seed=args.seed))
    model = fit_logreg(train_set, max_iters=args.max_iters, lr=args.lr, l2=args.l2)
    report = evaluate(model, test_set)
    paths["model"].parent.mkdir(parents=True, exist_ok=True)
    save_model(model, paths["model"])
    print(
        f"trained on {len(train_set)} examples in {model.iterations} iterations "
        f"(loss {model.final_loss:.4f}); test AUC {report.auc:.3f}; model -> {paths['model']}"
    )
    return 0


def cmd_filter(args) -> int:
    paths = _paths(args)
    state = ServiceState(
        corpus=load_corpus(paths["corpus"]),
        embeddings=EmbeddingStore.load(paths["cache"]),
        model=load_model(paths["model"]),
        filter_cfg=FilterConfig(threshold=args.threshold),
    )
    feed = build_feed(state, date.fromisoformat(args.since))
    if args.out:
        analytics.write_table(
            args.out,
            ["id", "title", "url", "published", "score"],
            [(f["id"], f["title"], f["url"], f["published"], f["score"]) for f in feed],
        )
        print(f"{len(feed)} accepted -> {args.out}")
    else:
        for item in feed:
            print(f"{item['score']:.4f}  {item['published']}  {item['id']}  {item['title']}")
        print(f"{len(feed)} accepted")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    paths = _paths(args)
    state = load_state(
        corpus_path=paths["corpus"],
        projection_path=paths["projection"] if paths["projection"].exists() else None,
        cache_path=paths["cache"] if paths["cache"].exists() else None,
        model_path=paths["model"] if paths["model"].exists() else None,
        threshold=args.threshold,
    )
    app = create_app(state, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="litmap", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--data-dir", default="data", help="root for default file locations")
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="pull documents into the corpus")
    ingest_sub = ingest.add_subparsers(dest="source", required=True)

    arxiv = ingest_sub.add_parser("arxiv", help="harvest a category listing via the archive API")
    arxiv.add_argument("--category", default="cs.AI")
    arxiv.add_argument("--from", dest="from_date", default=None, metavar="DATE")
    arxiv.add_argument("--to", dest="to_date", default=None, metavar="DATE")
    arxiv.add_argument("--label", default="unlabeled", choices=["level0", "level1", "unlabeled"])
    arxiv.add_argument("--page-size", type=int, default=100)
    arxiv.add_argument("--max-records", type=int, default=None)
    arxiv.add_argument("--delay-ms", type=int, default=3000)
    arxiv.add_argument("--corpus", default=None)
    arxiv.set_defaults(func=cmd_ingest_arxiv)

    forum = ingest_sub.add_parser("forum", help="ingest a line-delimited forum export")
    forum.add_argument("--file", required=True)
    forum.add_argument("--corpus", default=None)
    forum.set_defaults(func=cmd_ingest_forum)

    dedup = sub.add_parser("dedup", help="merge cross-posted duplicates")
    dedup.add_argument("--corpus", default=None)
    dedup.set_defaults(func=cmd_dedup)

    embed = sub.add_parser("embed", help="compute or refresh document vectors")
    embed.add_argument("--provider", choices=["hash", "remote"], default="hash")
    embed.add_argument("--endpoint", default=None)
    embed.add_argument("--corpus", default=None)
    embed.add_argument("--cache", default=None)
    embed.set_defaults(func=cmd_embed)

    proj = sub.add_parser("project", help="project embeddings to 2D")
    proj.add_argument("--n-neighbors", type=int, default=250)
    proj.add_argument("--epochs", type=int, default=200)
    proj.add_argument("--seed", type=int, default=0)
    proj.add_argument("--corpus", default=None)
    proj.add_argument("--cache", default=None)
    proj.add_argument("--projection", default=None)
    proj.set_defaults(func=cmd_project)

    clus = sub.add_parser("cluster", help="k-means labels plus the elbow table")
    clus.add_argument("--k", type=int, default=5)
    clus.add_argument("--seed", type=int, default=0)
    clus.add_argument("--restarts", type=int, default=10)
    clus.add_argument("--scan-max", type=int, default=10)
    clus.add_argument("--scan-seeds", type=int, default=10)
    clus.add_argument("--corpus", default=None)
    clus.add_argument("--cache", default=None)
    clus.set_defaults(func=cmd_cluster)

    analyze = sub.add_parser("analyze", help="emit a statistics table (CSV + figure)")
    analyze.add_argument("--report", required=True,
                         help=f"one of: all, {', '.join(analytics.REPORTS)}")
    analyze.add_argument("--no-figure", action="store_true")
    analyze.add_argument("--corpus", default=None)
    analyze.set_defaults(func=cmd_analyze)

    train = sub.add_parser("train", help="fit the relevance classifier")
    train.add_argument("--split", type=float, default=0.8)
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--max-iters", type=int, default=1000)
    train.add_argument("--lr", type=float, default=0.1)
    train.add_argument("--l2", type=float, default=0.0)
    train.add_argument("--corpus", default=None)
    train.add_argument("--cache", default=None)
    train.add_argument("--model", default=None)
    train.set_defaults(func=cmd_train)

    filt = sub.add_parser("filter", help="score recent documents against the model")
    filt.add_argument("--threshold", type=float, default=0.75)
    filt.add_argument("--since", required=True, metavar="DATE")
    filt.add_argument("--out", default=None)
    filt.add_argument("--corpus", default=None)
    filt.add_argument("--cache", default=None)
    filt.add_argument("--model", default=None)
    filt.set_defaults(func=cmd_filter)

    serve = sub.add_parser("serve", help="serve the map, search, feed, and stats")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--threshold", type=float, default=0.75)
    serve.add_argument("--ui", default=None, help="static UI directory to mount at /ui")
    serve.add_argument("--corpus", default=None)
    serve.add_argument("--cache", default=None)
    serve.add_argument("--projection", default=None)
    serve.add_argument("--model", default=None)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LitmapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
