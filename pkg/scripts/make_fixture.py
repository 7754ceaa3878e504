#!/usr/bin/env python3
"""Regenerate the end-to-end test fixture (deterministic).

Builds a tiny three-cluster corpus of titled articles, six topics (two per
cluster domain), and gold ratings covering every (topic, lexicon title)
pair, so any generated top-19 list is fully rated.  Run from the repo root:

    python3 scripts/make_fixture.py

Outputs land in tests/data/fixture/.  The committed golden outputs under
tests/data/fixture/golden/ are produced by running the pipeline on this
fixture (see README).
"""

from __future__ import annotations

import json
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from topiclabel.corpus import (  # noqa: E402
    DOC_EMBEDDING,
    WORD_EMBEDDING,
    article_from_record,
    build_title_lexicon,
    filter_articles,
)
from topiclabel.ranker import GoldRating, write_gold  # noqa: E402

CLUSTERS = {
    "tech": {
        "vocab": [
            "software", "server", "network", "database", "cloud", "virtual",
            "kernel", "compiler", "algorithm", "protocol", "linux", "neural",
        ],
        "titles": [
            "operating system", "neural network", "cloud computing",
            "database engine", "linux kernel", "virtual machine",
            "compiler design", "network protocol", "software",
            "distributed systems (computing)",
        ],
    },
    "finance": {
        "vocab": [
            "market", "bank", "credit", "inflation", "currency", "bond",
            "equity", "interest", "trading", "asset", "fiscal", "crisis",
        ],
        "titles": [
            "financial crisis", "central bank", "stock market",
            "interest rate", "credit default", "currency union",
            "bond trading", "fiscal policy", "inflation",
            "monetary policy (economics)",
        ],
    },
    "bio": {
        "vocab": [
            "cell", "protein", "gene", "enzyme", "membrane", "dna",
            "mutation", "receptor", "antibody", "organism", "tissue", "virus",
        ],
        "titles": [
            "cell membrane", "gene expression", "protein folding",
            "dna repair", "immune response", "viral infection",
            "enzyme kinetics", "receptor binding", "protein",
            "cell division (biology)",
        ],
    },
}

FILLER = ["the", "of", "and", "in", "a", "is", "for", "with"]


def build_body(rng, cluster, title_words, all_titles):
    """A 48-62 token body mixing cluster vocabulary, the article's own
    title phrase, and mentions of sibling titles."""
    vocab = CLUSTERS[cluster]["vocab"]
    tokens = []
    n = int(rng.integers(48, 63))
    while len(tokens) < n:
        roll = rng.random()
        if roll < 0.15:
            tokens.append(FILLER[int(rng.integers(0, len(FILLER)))])
        elif roll < 0.80:
            tokens.append(vocab[int(rng.integers(0, len(vocab)))])
        elif roll < 0.92:
            tokens.extend(title_words)
        else:
            other = all_titles[int(rng.integers(0, len(all_titles)))]
            tokens.extend(other.lower().split())
    return " ".join(tokens)


def main(out_dir: str) -> None:
    rng = np.random.default_rng(20160805)
    os.makedirs(out_dir, exist_ok=True)

    records = []
    next_id = 1
    cluster_of_article: dict[int, str] = {}
    for cluster, spec in CLUSTERS.items():
        plain_titles = [t for t in spec["titles"] if "(" not in t]
        ids_in_cluster = list(range(next_id, next_id + len(spec["titles"])))
        for title in spec["titles"]:
            title_words = title.split(" (")[0].lower().split()
            body = build_body(rng, cluster, title_words, plain_titles)
            outlinks = [
                int(x) for x in rng.choice(ids_in_cluster, size=3, replace=False)
                if int(x) != next_id
            ]
            records.append(
                {"id": next_id, "title": title.title(), "text": body,
                 "outlinks": sorted(outlinks)}
            )
            cluster_of_article[next_id] = cluster
            next_id += 1
        # one disambiguation page and one short stub per cluster; both are
        # dropped by preprocessing
        records.append(
            {"id": next_id, "title": f"{cluster.title()} (disambiguation)",
             "text": build_body(rng, cluster, ["stub"], plain_titles),
             "outlinks": []}
        )
        next_id += 1
        records.append(
            {"id": next_id, "title": f"Tiny {cluster} stub",
             "text": "too short to keep", "outlinks": []}
        )
        next_id += 1

    corpus_path = os.path.join(out_dir, "corpus.jsonl")
    with open(corpus_path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True) + "\n")

    topics = []
    for cluster in CLUSTERS:
        vocab = CLUSTERS[cluster]["vocab"]
        for variant in range(2):
            order = rng.permutation(len(vocab))[:10]
            topics.append(
                {
                    "id": f"{cluster}-{variant}",
                    "domain": cluster,
                    "terms": [vocab[i] for i in order],
                }
            )
    topics_path = os.path.join(out_dir, "topics.jsonl")
    with open(topics_path, "w", encoding="utf-8") as handle:
        for topic in topics:
            handle.write(json.dumps(topic, sort_keys=True) + "\n")

    # Gold ratings for every (topic, title) pair in either lexicon variant:
    # same-cluster titles rate high, others low, with deterministic jitter.
    articles = list(
        filter_articles(article_from_record(r) for r in records)
    )
    labels: dict[str, str] = {}
    for variant in (DOC_EMBEDDING, WORD_EMBEDDING):
        lexicon = build_title_lexicon(articles, variant)
        for key, ids in lexicon.entries.items():
            labels[key] = cluster_of_article[min(ids)]
    ratings = []
    for topic in topics:
        for label in sorted(labels):
            same = labels[label] == topic["domain"]
            base = 2.1 if same else 0.3
            jitter = float(rng.random()) * 0.8
            ratings.append(
                GoldRating(
                    topic_id=topic["id"],
                    label=label,
                    mean_rating=round(min(base + jitter, 3.0), 2),
                    n_annotations=int(rng.integers(5, 11)),
                )
            )
    write_gold(ratings, os.path.join(out_dir, "gold.tsv"))

    with open(os.path.join(out_dir, "fixture.ini"), "w", encoding="utf-8") as handle:
        handle.write(FIXTURE_INI)

    print(f"fixture written to {out_dir}: {len(records)} articles, "
          f"{len(topics)} topics, {len(ratings)} gold ratings, "
          f"{len(labels)} distinct labels")


FIXTURE_INI = """\
# Desk-scale pipeline configuration for the committed test fixture.
# All paths are relative to this file; outputs land under build/.

[paths]
corpus = corpus.jsonl
topics = topics.jsonl
gold = gold.tsv
articles = build/articles.jsonl
doc_lexicon = build/doc_lexicon.tsv
word_lexicon = build/word_lexicon.tsv
word_vectors = build/word_vectors.txt
doc_vectors = build/doc_vectors.txt
doc_word_vectors = build/doc_word_vectors.txt
pagerank_scores = build/pagerank.tsv
candidates = build/candidates.tsv
features = build/features.tsv
model = build/model.json
labels = build/labels.tsv
report = build/report.tsv
stats = build/stats.tsv

[corpus]
min_body_tokens = 40
max_title_words = 4

[skipgram]
dim = 16
window = 5
negative_samples = 5
subsample_threshold = 0.01
epochs = 40
min_count = 1
seed = 7

[dbow]
dim = 16
window = 8
negative_samples = 5
subsample_threshold = 0.01
epochs = 30
min_count = 1
seed = 8

[generation]
topic_terms = 10
k_per_source = 100
out_k = 19

[pagerank]
damping = 0.85
tol = 1e-10
max_iter = 200

[ranker]
cost = 1.0
epsilon = 0.1
epochs = 2000
seed = 0

[evaluation]
folds = 2
runs = 2
seed = 1
dcg_variant = classic
"""


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(__file__), "..", "tests", "data", "fixture"
    )
    main(os.path.abspath(target))
