"""Command-line pipeline driver.

Subcommands map one-to-one onto pipeline stages:

    preprocess        filter the raw corpus, build both title lexicons
    train-embeddings  train the word model and the document model
    pagerank          score articles over the hyperlink graph
    generate          rank candidate labels per topic
    features          compute reranking features for the candidates
    train-ranker      fit the supervised reranker on gold ratings
    label             generate + features + rerank, end to end
    evaluate          baseline / in-domain / cross-domain / upper-bound report
    ablate            in-domain report with each feature removed in turn

Every stage reads its paths and parameters from an INI config file
(``--config``), with command-line flags overriding individual keys.  Output
files are written atomically (temp file + rename) and logged with SHA-256
checksums so runs can be compared.  Exit codes: 0 success, 1 runtime
failure, 2 usage error, 3 invalid input.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import logging
import os
import sys
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field, fields
from typing import Sequence

from . import corpus as corpus_mod
from . import embeddings as emb_mod
from . import evaluation as eval_mod
from . import features as feat_mod
from . import generation as gen_mod
from . import ranker as rank_mod
from .errors import FormatError, TopicLabelError

logger = logging.getLogger("topiclabel")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_INPUT = 3


# ---------------------------------------------------------------------------
# Configuration


@dataclass
class PathsConfig:
    corpus: str = ""
    articles: str = ""
    doc_lexicon: str = ""
    word_lexicon: str = ""
    word_vectors: str = ""
    doc_vectors: str = ""
    doc_word_vectors: str = ""
    pagerank_scores: str = ""
    topics: str = ""
    candidates: str = ""
    features: str = ""
    gold: str = ""
    model: str = ""
    labels: str = ""
    report: str = ""
    stats: str = ""


@dataclass
class CorpusParams:
    min_body_tokens: int = 40
    max_title_words: int = 4


@dataclass
class GenerationParams:
    topic_terms: int = 10
    k_per_source: int = 100
    out_k: int = 19


@dataclass
class PagerankParams:
    damping: float = 0.85
    tol: float = 1e-10
    max_iter: int = 200


@dataclass
class EvaluationParams:
    folds: int = 10
    runs: int = 10
    seed: int = 0
    dcg_variant: str = eval_mod.CLASSIC


@dataclass
class PipelineConfig:
    paths: PathsConfig = field(default_factory=PathsConfig)
    corpus: CorpusParams = field(default_factory=CorpusParams)
    skipgram: emb_mod.TrainConfig = field(default_factory=emb_mod.desk_scale_skipgram)
    dbow: emb_mod.TrainConfig = field(default_factory=emb_mod.desk_scale_dbow)
    generation: GenerationParams = field(default_factory=GenerationParams)
    pagerank: PagerankParams = field(default_factory=PagerankParams)
    ranker: rank_mod.RankerConfig = field(default_factory=rank_mod.RankerConfig)
    evaluation: EvaluationParams = field(default_factory=EvaluationParams)
    workers: int = 1


_SECTIONS = {
    "paths": "paths",
    "corpus": "corpus",
    "skipgram": "skipgram",
    "dbow": "dbow",
    "generation": "generation",
    "pagerank": "pagerank",
    "ranker": "ranker",
    "evaluation": "evaluation",
}


def _coerce(value: str, kind: type):
    if kind is bool:
        lowered = value.strip().lower()
        if lowered in {"1", "true", "yes", "on"}:
            return True
        if lowered in {"0", "false", "no", "off"}:
            return False
        raise ValueError(f"not a boolean: {value!r}")
    return kind(value)


def load_config(path: str | None) -> PipelineConfig:
    config = PipelineConfig()
    if path is None:
        return config
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"config file not found: {path}")
    base = os.path.dirname(os.path.abspath(path))
    for section_name, attr in _SECTIONS.items():
        if not parser.has_section(section_name):
            continue
        target = getattr(config, attr)
        known = {f.name: f.type for f in fields(target)}
        for key, raw in parser.items(section_name):
            if key not in known:
                raise FormatError(f"unknown config key [{section_name}] {key}")
            current = getattr(target, key)
            kind = type(current) if current is not None else str
            try:
                value = _coerce(raw, kind)
            except ValueError as exc:
                raise FormatError(f"bad value for [{section_name}] {key}: {exc}") from exc
            if section_name == "paths" and value:
                value = value if os.path.isabs(value) else os.path.join(base, value)
            setattr(target, key, value)
    if parser.has_section("runtime") and parser.has_option("runtime", "workers"):
        config.workers = parser.getint("runtime", "workers")
    return config


def _require(config: PipelineConfig, *path_names: str) -> None:
    """Validate that the named input paths are configured and exist."""
    for name in path_names:
        value = getattr(config.paths, name)
        if not value:
            raise FormatError(f"config path {name!r} is not set")
        if not os.path.exists(value):
            raise FileNotFoundError(f"{name} file not found: {value}")


def _require_out(config: PipelineConfig, *path_names: str) -> None:
    for name in path_names:
        if not getattr(config.paths, name):
            raise FormatError(f"config path {name!r} is not set")


# ---------------------------------------------------------------------------
# Atomic output and provenance


@contextmanager
def atomic_write(path: str):
    """Yield a temp path; replace the target only after a clean write."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    os.close(fd)
    try:
        yield tmp
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()[:16]


def _log_files(kind: str, paths: Sequence[str]) -> None:
    for p in paths:
        if p and os.path.exists(p):
            logger.info("%s %s sha256=%s", kind, p, _digest(p))


# ---------------------------------------------------------------------------
# Stages


def stage_preprocess(config: PipelineConfig) -> None:
    """Filter raw articles and build the two title lexicons."""
    _require(config, "corpus")
    _require_out(config, "articles", "doc_lexicon", "word_lexicon")
    _log_files("input", [config.paths.corpus])
    params = config.corpus
    kept_lines: list[str] = []
    kept_articles: list[corpus_mod.Article] = []
    seen_ids: set[int] = set()
    with open(config.paths.corpus, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            record = corpus_mod.parse_article_record(line, lineno)
            article = corpus_mod.article_from_record(record)
            if article.id in seen_ids:
                raise FormatError(
                    f"{config.paths.corpus}: line {lineno}: "
                    f"duplicate article id {article.id}"
                )
            seen_ids.add(article.id)
            if len(article.body_tokens) < params.min_body_tokens:
                continue
            if corpus_mod.is_disambiguation(article.title):
                continue
            kept_lines.append(line.rstrip("\n"))
            kept_articles.append(article)
    logger.info("preprocess: kept %d articles", len(kept_articles))
    with atomic_write(config.paths.articles) as tmp:
        with open(tmp, "w", encoding="utf-8") as out:
            out.write("\n".join(kept_lines) + ("\n" if kept_lines else ""))
    for variant, dest in (
        (corpus_mod.DOC_EMBEDDING, config.paths.doc_lexicon),
        (corpus_mod.WORD_EMBEDDING, config.paths.word_lexicon),
    ):
        lexicon = corpus_mod.build_title_lexicon(
            kept_articles, variant, params.max_title_words
        )
        with atomic_write(dest) as tmp:
            corpus_mod.write_lexicon(lexicon, tmp)
    _log_files(
        "output",
        [config.paths.articles, config.paths.doc_lexicon, config.paths.word_lexicon],
    )


def stage_train_embeddings(config: PipelineConfig) -> None:
    """Train the word model on collapsed text and the document model."""
    _require(config, "articles", "word_lexicon")
    _require_out(config, "word_vectors", "doc_vectors", "doc_word_vectors")
    _log_files("input", [config.paths.articles, config.paths.word_lexicon])
    articles = corpus_mod.read_articles(config.paths.articles)
    word_lexicon = corpus_mod.read_lexicon(
        config.paths.word_lexicon, config.corpus.max_title_words
    )
    logger.info(
        "training word model on %d articles (workers=%d)", len(articles), config.workers
    )
    collapsed = [
        corpus_mod.collapse_titles(a.body_tokens, word_lexicon) for a in articles
    ]
    word_table = emb_mod.train_skipgram(collapsed, config.skipgram, config.workers)
    logger.info("training document model on %d articles", len(articles))
    doc_table, doc_word_table = emb_mod.train_dbow(
        [(corpus_mod.normalize_title(a.title), a.body_tokens) for a in articles],
        config.dbow,
        config.workers,
    )
    for table, dest in (
        (word_table, config.paths.word_vectors),
        (doc_table, config.paths.doc_vectors),
        (doc_word_table, config.paths.doc_word_vectors),
    ):
        with atomic_write(dest) as tmp:
            emb_mod.export_table(table, tmp)
    _log_files(
        "output",
        [
            config.paths.word_vectors,
            config.paths.doc_vectors,
            config.paths.doc_word_vectors,
        ],
    )


def stage_pagerank(config: PipelineConfig) -> None:
    """Score every article over the hyperlink graph."""
    _require(config, "articles")
    _require_out(config, "pagerank_scores")
    _log_files("input", [config.paths.articles])
    articles = corpus_mod.read_articles(config.paths.articles)
    graph = feat_mod.LinkGraph.from_articles(articles)
    params = config.pagerank
    scores = feat_mod.pagerank(graph, params.damping, params.tol, params.max_iter)
    with atomic_write(config.paths.pagerank_scores) as tmp:
        feat_mod.write_pagerank(scores, tmp)
    _log_files("output", [config.paths.pagerank_scores])


def _load_tables(config: PipelineConfig):
    doc_table = emb_mod.import_table(config.paths.doc_vectors, emb_mod.DOCUMENT)
    doc_word_table = emb_mod.import_table(
        config.paths.doc_word_vectors, emb_mod.WORD_FROM_DOCMODEL
    )
    word_table = emb_mod.import_table(
        config.paths.word_vectors, emb_mod.WORD_FROM_WORDMODEL
    )
    return doc_table, doc_word_table, word_table


def _load_topics(config: PipelineConfig) -> list[gen_mod.Topic]:
    topics = gen_mod.read_topics(config.paths.topics)
    return [gen_mod.truncate_terms(t, config.generation.topic_terms) for t in topics]


def stage_generate(config: PipelineConfig) -> None:
    """Produce the ranked candidate-label table for every topic."""
    _require(
        config, "topics", "doc_vectors", "doc_word_vectors", "word_vectors",
        "doc_lexicon", "word_lexicon",
    )
    _require_out(config, "candidates")
    _log_files(
        "input",
        [config.paths.topics, config.paths.doc_vectors, config.paths.word_vectors],
    )
    doc_table, doc_word_table, word_table = _load_tables(config)
    doc_lexicon = corpus_mod.read_lexicon(config.paths.doc_lexicon)
    word_lexicon = corpus_mod.read_lexicon(config.paths.word_lexicon)
    doc_titles = sorted(k for k in doc_lexicon.entries if k in doc_table)
    word_titles = sorted(
        k for k in word_lexicon.entries
        if corpus_mod.collapsed_token(k) in word_table
    )
    logger.info(
        "generate: %d doc-model titles, %d word-model titles",
        len(doc_titles), len(word_titles),
    )
    params = config.generation
    topics = _load_topics(config)

    def score(topic):
        return gen_mod.generate_candidates(
            topic, doc_table, doc_word_table, word_table, doc_titles, word_titles,
            params.k_per_source, params.out_k,
        )

    # Scoring is read-only per topic, so the parallel path merges in topic
    # order and stays deterministic at any worker count.
    if config.workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            scored = list(pool.map(score, topics))
    else:
        scored = [score(t) for t in topics]
    results = {topic.id: cands for topic, cands in zip(topics, scored)}
    with atomic_write(config.paths.candidates) as tmp:
        gen_mod.write_candidates(results, tmp)
    _log_files("output", [config.paths.candidates])


def stage_features(config: PipelineConfig) -> None:
    """Compute the four reranking features for every generated candidate."""
    _require(
        config, "topics", "candidates", "doc_lexicon", "word_lexicon",
        "pagerank_scores",
    )
    _require_out(config, "features")
    _log_files("input", [config.paths.candidates, config.paths.pagerank_scores])
    topics = {t.id: t for t in _load_topics(config)}
    candidates = gen_mod.read_candidates(config.paths.candidates)
    scores = feat_mod.read_pagerank(config.paths.pagerank_scores)
    doc_lexicon = corpus_mod.read_lexicon(config.paths.doc_lexicon)
    word_lexicon = corpus_mod.read_lexicon(config.paths.word_lexicon)
    merged = {k: set(v) for k, v in doc_lexicon.entries.items()}
    for key, ids in word_lexicon.entries.items():
        merged.setdefault(key, set()).update(ids)
    lexicon = corpus_mod.TitleLexicon(entries=merged)
    table: dict[str, dict[str, feat_mod.FeatureVector]] = {}
    for topic_id, cands in candidates.items():
        if topic_id not in topics:
            raise FormatError(f"candidates reference unknown topic {topic_id!r}")
        labels = [c.label for c in cands]
        table[topic_id] = feat_mod.compute_features(
            topics[topic_id], labels, lexicon, scores
        )
    with atomic_write(config.paths.features) as tmp:
        feat_mod.write_features(table, tmp)
    _log_files("output", [config.paths.features])


def stage_train_ranker(config: PipelineConfig) -> None:
    """Fit the supervised reranker on every rated candidate."""
    _require(config, "features", "gold", "topics")
    _require_out(config, "model")
    _log_files("input", [config.paths.features, config.paths.gold])
    dataset = _load_dataset(config)
    pairs = dataset.training_pairs(dataset.topic_ids())
    logger.info("train-ranker: %d training pairs", len(pairs))
    model = rank_mod.fit(pairs, config.ranker)
    with atomic_write(config.paths.model) as tmp:
        rank_mod.save_model(model, tmp)
    _log_files("output", [config.paths.model])


def stage_label(config: PipelineConfig) -> None:
    """End-to-end labelling: generate, featurize, rerank, write labels."""
    _require(config, "model")
    _require_out(config, "labels")
    stage_generate(config)
    stage_features(config)
    model = rank_mod.load_model(config.paths.model)
    feature_table = feat_mod.read_features(config.paths.features)
    rows = []
    for topic_id in sorted(feature_table):
        per_topic = feature_table[topic_id]
        order = rank_mod.rerank(model, sorted(per_topic.items()))
        for rank, label in enumerate(order, start=1):
            score = rank_mod.predict(model, per_topic[label])
            rows.append((topic_id, rank, label, score))
    with atomic_write(config.paths.labels) as tmp:
        with open(tmp, "w", encoding="utf-8") as out:
            out.write("topic_id\trank\tlabel\tscore\n")
            for topic_id, rank, label, score in rows:
                out.write("%s\t%d\t%s\t%.10g\n" % (topic_id, rank, label, score))
    _log_files("output", [config.paths.labels])


def _load_dataset(config: PipelineConfig) -> eval_mod.RankingDataset:
    topics = _load_topics(config)
    feature_table = feat_mod.read_features(config.paths.features)
    gold = rank_mod.read_gold(config.paths.gold)
    return eval_mod.RankingDataset.build(topics, feature_table, gold)


def stage_evaluate(config: PipelineConfig, protocol: str = "all") -> None:
    """Run the evaluation protocols and write the report."""
    _require(config, "features", "gold", "topics")
    _require_out(config, "report")
    dataset = _load_dataset(config)
    params = config.evaluation
    variant = params.dcg_variant
    rows: list[eval_mod.ReportRow] = []
    domains = dataset.domains()
    for domain in domains:
        n_topics = len(dataset.topic_ids(domain))
        if protocol in ("all", "baseline"):
            rows.append(eval_mod.baseline_report(dataset, domain, variant))
        if protocol in ("all", "in-domain"):
            if n_topics >= params.folds:
                rows.append(
                    eval_mod.cross_validate(
                        dataset, domain, params.folds, params.runs, params.seed,
                        config.ranker, variant=variant,
                    )
                )
            else:
                logger.warning(
                    "skipping in-domain CV for %s: %d topics < %d folds",
                    domain, n_topics, params.folds,
                )
        if protocol in ("all", "cross-domain") and len(domains) > 1:
            others = [d for d in domains if d != domain]
            for source in others:
                rows.append(
                    eval_mod.cross_domain(
                        dataset, [source], domain, config.ranker, variant
                    )
                )
            if len(others) > 1:
                rows.append(
                    eval_mod.cross_domain(dataset, others, domain, config.ranker, variant)
                )
        if protocol in ("all", "upper-bound"):
            rows.append(eval_mod.upper_bound_report(dataset, domain))
    if not rows:
        raise FormatError(
            f"protocol {protocol!r} produced no results "
            f"(domains: {', '.join(domains) or 'none'})"
        )
    with atomic_write(config.paths.report) as tmp:
        eval_mod.write_report(rows, tmp)
    if config.paths.stats:
        stats_rows, aggregates = eval_mod.candidate_quality_stats(dataset)
        with atomic_write(config.paths.stats) as tmp:
            eval_mod.write_stats(stats_rows, aggregates, tmp)
    _log_files("output", [config.paths.report, config.paths.stats])
    print(eval_mod.format_report(rows))


def stage_ablate(config: PipelineConfig, domain: str | None = None) -> None:
    """Feature-ablation report over the in-domain protocol."""
    _require(config, "features", "gold", "topics")
    _require_out(config, "report")
    dataset = _load_dataset(config)
    params = config.evaluation
    domains = [domain] if domain else dataset.domains()
    rows: list[eval_mod.ReportRow] = []
    for d in domains:
        rows.extend(
            eval_mod.ablation(
                dataset, d, params.folds, params.runs, params.seed, config.ranker,
                params.dcg_variant,
            )
        )
    with atomic_write(config.paths.report) as tmp:
        eval_mod.write_report(rows, tmp)
    _log_files("output", [config.paths.report])
    print(eval_mod.format_report(rows))


# ---------------------------------------------------------------------------
# Argument parsing


_PATH_FLAGS = [f.name for f in fields(PathsConfig)]


def _add_path_flags(parser: argparse.ArgumentParser, names: Sequence[str]) -> None:
    for name in names:
        parser.add_argument(
            "--" + name.replace("_", "-"), dest=f"path_{name}", metavar="PATH"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topiclabel",
        description="Label topic-model topics with corpus article titles.",
    )
    parser.add_argument("--config", metavar="FILE", help="INI config file")
    parser.add_argument("--seed", type=int, help="override every stage seed")
    parser.add_argument("--workers", type=int, help="parallel workers (1 = deterministic)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")

    p = sub.add_parser("preprocess", help="filter articles, build title lexicons")
    _add_path_flags(p, ["corpus", "articles", "doc_lexicon", "word_lexicon"])
    p.add_argument("--min-body-tokens", type=int)
    p.add_argument("--max-title-words", type=int)

    p = sub.add_parser("train-embeddings", help="train word and document models")
    _add_path_flags(
        p, ["articles", "word_lexicon", "word_vectors", "doc_vectors", "doc_word_vectors"]
    )
    for prefix in ("sg", "dbow"):
        p.add_argument(f"--{prefix}-dim", type=int)
        p.add_argument(f"--{prefix}-window", type=int)
        p.add_argument(f"--{prefix}-epochs", type=int)
        p.add_argument(f"--{prefix}-negative", type=int)
        p.add_argument(f"--{prefix}-subsample", type=float)
        p.add_argument(f"--{prefix}-min-count", type=int)

    p = sub.add_parser("pagerank", help="score articles over the link graph")
    _add_path_flags(p, ["articles", "pagerank_scores"])
    p.add_argument("--damping", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int)

    p = sub.add_parser("generate", help="rank candidate labels per topic")
    _add_path_flags(
        p,
        [
            "topics", "candidates", "doc_vectors", "doc_word_vectors",
            "word_vectors", "doc_lexicon", "word_lexicon",
        ],
    )
    p.add_argument("--topic-terms", type=int)
    p.add_argument("--k-per-source", type=int)
    p.add_argument("--out-k", type=int)

    p = sub.add_parser("features", help="compute reranking features")
    _add_path_flags(
        p,
        [
            "topics", "candidates", "doc_lexicon", "word_lexicon",
            "pagerank_scores", "features",
        ],
    )
    p.add_argument("--topic-terms", type=int)

    p = sub.add_parser("train-ranker", help="fit the supervised reranker")
    _add_path_flags(p, ["features", "gold", "topics", "model"])
    p.add_argument("--cost", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--epochs", type=int)

    p = sub.add_parser("label", help="end-to-end: generate, featurize, rerank")
    _add_path_flags(
        p,
        [
            "topics", "candidates", "features", "model", "labels", "doc_vectors",
            "doc_word_vectors", "word_vectors", "doc_lexicon", "word_lexicon",
            "pagerank_scores",
        ],
    )
    p.add_argument("--topic-terms", type=int)
    p.add_argument("--k-per-source", type=int)
    p.add_argument("--out-k", type=int)

    p = sub.add_parser("evaluate", help="evaluation report over gold ratings")
    _add_path_flags(p, ["features", "gold", "topics", "report", "stats"])
    p.add_argument(
        "--protocol",
        choices=["all", "baseline", "in-domain", "cross-domain", "upper-bound"],
        default="all",
    )
    p.add_argument("--folds", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--dcg-variant", choices=[eval_mod.CLASSIC, eval_mod.EXPONENTIAL])

    p = sub.add_parser("ablate", help="feature-ablation report")
    _add_path_flags(p, ["features", "gold", "topics", "report"])
    p.add_argument("--domain")
    p.add_argument("--folds", type=int)
    p.add_argument("--runs", type=int)

    return parser


def _apply_overrides(config: PipelineConfig, args: argparse.Namespace) -> None:
    for name in _PATH_FLAGS:
        value = getattr(args, f"path_{name}", None)
        if value is not None:
            setattr(config.paths, name, value)
    if args.workers is not None:
        if args.workers < 1:
            raise FormatError("--workers must be >= 1")
        config.workers = args.workers
    if args.seed is not None:
        config.skipgram.seed = args.seed
        config.dbow.seed = args.seed
        config.ranker.seed = args.seed
        config.evaluation.seed = args.seed

    direct = {
        "min_body_tokens": (config.corpus, "min_body_tokens"),
        "max_title_words": (config.corpus, "max_title_words"),
        "damping": (config.pagerank, "damping"),
        "tol": (config.pagerank, "tol"),
        "max_iter": (config.pagerank, "max_iter"),
        "topic_terms": (config.generation, "topic_terms"),
        "k_per_source": (config.generation, "k_per_source"),
        "out_k": (config.generation, "out_k"),
        "cost": (config.ranker, "cost"),
        "epsilon": (config.ranker, "epsilon"),
        "epochs": (config.ranker, "epochs"),
        "folds": (config.evaluation, "folds"),
        "runs": (config.evaluation, "runs"),
        "dcg_variant": (config.evaluation, "dcg_variant"),
        "sg_dim": (config.skipgram, "dim"),
        "sg_window": (config.skipgram, "window"),
        "sg_epochs": (config.skipgram, "epochs"),
        "sg_negative": (config.skipgram, "negative_samples"),
        "sg_subsample": (config.skipgram, "subsample_threshold"),
        "sg_min_count": (config.skipgram, "min_count"),
        "dbow_dim": (config.dbow, "dim"),
        "dbow_window": (config.dbow, "window"),
        "dbow_epochs": (config.dbow, "epochs"),
        "dbow_negative": (config.dbow, "negative_samples"),
        "dbow_subsample": (config.dbow, "subsample_threshold"),
        "dbow_min_count": (config.dbow, "min_count"),
    }
    for flag, (target, attr) in direct.items():
        value = getattr(args, flag, None)
        if value is not None:
            setattr(target, attr, value)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        config = load_config(args.config)
        _apply_overrides(config, args)
        config.skipgram.validate()
        config.dbow.validate()
        config.ranker.validate()
        logger.info("stage %s starting", args.command)
        if args.command == "preprocess":
            stage_preprocess(config)
        elif args.command == "train-embeddings":
            stage_train_embeddings(config)
        elif args.command == "pagerank":
            stage_pagerank(config)
        elif args.command == "generate":
            stage_generate(config)
        elif args.command == "features":
            stage_features(config)
        elif args.command == "train-ranker":
            stage_train_ranker(config)
        elif args.command == "label":
            stage_label(config)
        elif args.command == "evaluate":
            stage_evaluate(config, args.protocol)
        elif args.command == "ablate":
            stage_ablate(config, args.domain)
        logger.info("stage %s finished", args.command)
        return EXIT_OK
    except (TopicLabelError, FileNotFoundError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - report and exit nonzero
        logger.exception("stage %s failed: %s", args.command, exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
