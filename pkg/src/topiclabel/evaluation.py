"""Evaluation protocols: top-1 average rating and nDCG over gold ratings.

Covers the unsupervised baseline, in-domain 10-fold cross-validation
averaged over shuffled repartitionings, cross-domain training, the
annotation-determined upper bound, per-topic candidate-quality statistics,
and feature ablation.  Folds always partition topics, never (topic,
candidate) pairs, so a topic's candidates can never leak between train and
test.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats as _scipy_stats

from .errors import DomainOverlapError, MissingGoldError
from .features import FEATURE_NAMES, FeatureVector, unsupervised_rank
from .generation import Topic
from .ranker import GoldRating, RankerConfig, RegressionModel, fit, rerank

logger = logging.getLogger(__name__)

CLASSIC = "classic"          # no discount at rank 1, 1/log2(rank) after
EXPONENTIAL = "exponential"  # (2^gain - 1) / log2(rank + 1)

BASELINE = "baseline"
IN_DOMAIN = "in_domain"
UPPER_BOUND = "upper_bound"

# Published full-scale reference results (top-1 average rating); they are
# determined by the released annotation dataset and a full corpus build,
# and are only checked when the user supplies those annotations.
REFERENCE_UPPER_BOUND_TOP1 = {"blogs": 2.48, "books": 2.49, "news": 2.56, "pubmed": 2.51}
REFERENCE_BASELINE_TOP1 = {"blogs": 1.91, "books": 1.97, "news": 2.04, "pubmed": 1.94}


@dataclass
class ReportRow:
    test_domain: str
    condition: str
    top1_avg: float
    ndcg_1: float
    ndcg_3: float
    ndcg_5: float
    n_topics: int
    delta_top1: float | None = None


@dataclass
class RankingDataset:
    """Topics joined with their candidates' features and gold ratings."""

    topics: dict[str, Topic]
    candidates: dict[str, list[tuple[str, FeatureVector]]]
    gold: dict[tuple[str, str], GoldRating]

    @classmethod
    def build(
        cls,
        topics: Iterable[Topic],
        features: Mapping[str, Mapping[str, FeatureVector]],
        ratings: Iterable[GoldRating],
    ) -> "RankingDataset":
        """Join the three tables, keeping candidates that have both a
        feature vector and a gold rating."""
        topic_map = {t.id: t for t in topics}
        gold = {(r.topic_id, r.label): r for r in ratings}
        candidates: dict[str, list[tuple[str, FeatureVector]]] = {}
        dropped = 0
        for topic_id, per_topic in features.items():
            if topic_id not in topic_map:
                continue
            rows = []
            for label in sorted(per_topic):
                if (topic_id, label) in gold:
                    rows.append((label, per_topic[label]))
                else:
                    dropped += 1
            if rows:
                candidates[topic_id] = rows
        if dropped:
            logger.info("dropped %d candidates without gold ratings", dropped)
        kept_topics = {tid: topic_map[tid] for tid in candidates}
        return cls(topics=kept_topics, candidates=candidates, gold=gold)

    def domains(self) -> list[str]:
        return sorted({t.domain for t in self.topics.values()})

    def topic_ids(self, domain: str | None = None) -> list[str]:
        if domain is None:
            return sorted(self.candidates)
        return sorted(
            tid for tid in self.candidates if self.topics[tid].domain == domain
        )

    def ratings_for(self, topic_id: str) -> dict[str, float]:
        return {
            label: self.gold[(topic_id, label)].mean_rating
            for label, _ in self.candidates[topic_id]
        }

    def gold_values(self) -> dict[tuple[str, str], float]:
        return {key: r.mean_rating for key, r in self.gold.items()}

    def training_pairs(
        self, topic_ids: Iterable[str]
    ) -> list[tuple[FeatureVector, float]]:
        pairs = []
        for tid in topic_ids:
            for label, fv in self.candidates[tid]:
                pairs.append((fv, self.gold[(tid, label)].mean_rating))
        return pairs


# ---------------------------------------------------------------------------
# Metrics


def top1_average(
    rankings: Mapping[str, Sequence[str]],
    gold: Mapping[tuple[str, str], float],
) -> float:
    """Mean gold rating of each topic's rank-1 label."""
    if not rankings:
        raise ValueError("no rankings to evaluate")
    total = 0.0
    for topic_id in sorted(rankings):
        top = rankings[topic_id][0]
        key = (topic_id, top)
        if key not in gold:
            raise MissingGoldError(f"no gold rating for topic {topic_id!r} label {top!r}")
        total += gold[key]
    return total / len(rankings)


def _dcg(gains: Sequence[float], variant: str) -> float:
    if variant == CLASSIC:
        total = 0.0
        for i, g in enumerate(gains, start=1):
            total += g if i == 1 else g / math.log2(i)
        return total
    if variant == EXPONENTIAL:
        return sum(
            (2.0 ** g - 1.0) / math.log2(i + 1) for i, g in enumerate(gains, start=1)
        )
    raise ValueError(f"unknown DCG variant {variant!r}")


def ndcg_at_k(
    ranked: Sequence[str],
    ratings: Mapping[str, float],
    k: int,
    variant: str = CLASSIC,
) -> float:
    """DCG of the top-k ranked labels over the DCG of the ideal ordering.

    The ideal ordering sorts the same candidate set by gold rating.  When
    the ideal DCG is zero (all gains zero) the ranking is defined as
    perfect.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    gains = []
    for label in ranked[:k]:
        if label not in ratings:
            raise MissingGoldError(f"no gold rating for ranked label {label!r}")
        gains.append(ratings[label])
    ideal = sorted((ratings[label] for label in ranked), reverse=True)[:k]
    ideal_dcg = _dcg(ideal, variant)
    if ideal_dcg == 0.0:
        return 1.0
    return _dcg(gains, variant) / ideal_dcg


def _evaluate(
    rankings: Mapping[str, Sequence[str]],
    dataset: RankingDataset,
    variant: str,
) -> tuple[float, float, float, float]:
    gold = dataset.gold_values()
    top1 = top1_average(rankings, gold)
    by_k = []
    for k in (1, 3, 5):
        vals = [
            ndcg_at_k(rankings[tid], dataset.ratings_for(tid), k, variant)
            for tid in sorted(rankings)
        ]
        by_k.append(sum(vals) / len(vals))
    return top1, by_k[0], by_k[1], by_k[2]


# ---------------------------------------------------------------------------
# Protocols


def baseline_rankings(
    dataset: RankingDataset, topic_ids: Iterable[str]
) -> dict[str, list[str]]:
    return {
        tid: unsupervised_rank(
            [label for label, _ in dataset.candidates[tid]], dataset.topics[tid]
        )
        for tid in topic_ids
    }


def baseline_report(
    dataset: RankingDataset, domain: str, variant: str = CLASSIC
) -> ReportRow:
    ids = dataset.topic_ids(domain)
    rankings = baseline_rankings(dataset, ids)
    top1, n1, n3, n5 = _evaluate(rankings, dataset, variant)
    return ReportRow(domain, BASELINE, top1, n1, n3, n5, len(ids))


def upper_bound_report(dataset: RankingDataset, domain: str) -> ReportRow:
    """Perfect-ranking evaluation: determined entirely by the gold ratings."""
    ids = dataset.topic_ids(domain)
    if not ids:
        raise ValueError(f"no topics in domain {domain!r}")
    best = [max(dataset.ratings_for(tid).values()) for tid in ids]
    return ReportRow(domain, UPPER_BOUND, sum(best) / len(best), 1.0, 1.0, 1.0, len(ids))


def model_rankings(
    model: RegressionModel, dataset: RankingDataset, topic_ids: Iterable[str]
) -> dict[str, list[str]]:
    return {tid: rerank(model, dataset.candidates[tid]) for tid in topic_ids}


def cross_validate(
    dataset: RankingDataset,
    domain: str,
    folds: int = 10,
    runs: int = 10,
    seed: int = 0,
    config: RankerConfig | None = None,
    feature_indices: Sequence[int] | None = None,
    variant: str = CLASSIC,
    condition: str = IN_DOMAIN,
) -> ReportRow:
    """K-fold cross-validation over topics, averaged over shuffled runs.

    Each run repartitions the domain's topics with its own seed; metrics
    are averaged over every (run, fold) evaluation in order.
    """
    ids = dataset.topic_ids(domain)
    if len(ids) < folds:
        raise ValueError(
            f"domain {domain!r} has {len(ids)} topics, fewer than {folds} folds"
        )
    sums = np.zeros(4)
    count = 0
    for run in range(runs):
        rng = np.random.default_rng(seed + run)
        order = list(ids)
        rng.shuffle(order)
        parts = [order[f::folds] for f in range(folds)]
        for test_ids in parts:
            test_set = set(test_ids)
            train_ids = [tid for tid in order if tid not in test_set]
            model = fit(dataset.training_pairs(train_ids), config, feature_indices)
            rankings = model_rankings(model, dataset, sorted(test_ids))
            sums += np.array(_evaluate(rankings, dataset, variant))
            count += 1
    top1, n1, n3, n5 = (sums / count).tolist()
    return ReportRow(domain, condition, top1, n1, n3, n5, len(ids))


def cross_domain(
    dataset: RankingDataset,
    train_domains: Sequence[str],
    test_domain: str,
    config: RankerConfig | None = None,
    variant: str = CLASSIC,
) -> ReportRow:
    """Fit on whole domains, evaluate every topic of a disjoint domain."""
    if test_domain in set(train_domains):
        raise DomainOverlapError(
            f"test domain {test_domain!r} appears in the training domains"
        )
    train_ids: list[str] = []
    for d in train_domains:
        train_ids.extend(dataset.topic_ids(d))
    model = fit(dataset.training_pairs(train_ids), config)
    test_ids = dataset.topic_ids(test_domain)
    if not test_ids:
        raise ValueError(f"no topics in domain {test_domain!r}")
    rankings = model_rankings(model, dataset, test_ids)
    top1, n1, n3, n5 = _evaluate(rankings, dataset, variant)
    condition = "cross_domain:" + "+".join(sorted(train_domains))
    return ReportRow(test_domain, condition, top1, n1, n3, n5, len(test_ids))


def ablation(
    dataset: RankingDataset,
    domain: str,
    folds: int = 10,
    runs: int = 10,
    seed: int = 0,
    config: RankerConfig | None = None,
    variant: str = CLASSIC,
) -> list[ReportRow]:
    """In-domain protocol with each feature removed in turn.

    The first row is the all-features run; each later row drops one feature
    and reports its top-1 delta against the all-features run.
    """
    rows = [
        cross_validate(
            dataset, domain, folds, runs, seed, config, None, variant,
            condition="ablation:all",
        )
    ]
    base_top1 = rows[0].top1_avg
    for drop, name in enumerate(FEATURE_NAMES):
        kept = [i for i in range(len(FEATURE_NAMES)) if i != drop]
        row = cross_validate(
            dataset, domain, folds, runs, seed, config, kept, variant,
            condition=f"ablation:-{name}",
        )
        row.delta_top1 = row.top1_avg - base_top1
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# Candidate-quality statistics


@dataclass
class TopicStats:
    topic_id: str
    domain: str
    mean_rating: float
    max_rating: float
    min_rating: float


def candidate_quality_stats(
    dataset: RankingDataset,
) -> tuple[list[TopicStats], dict[str, dict[str, float]]]:
    """Per-topic mean/max/min candidate ratings plus per-domain averages.

    The per-topic rows are plot-ready (boxplot input); the aggregate maps
    domain -> averaged mean/max/min.
    """
    rows = []
    for tid in dataset.topic_ids():
        ratings = list(dataset.ratings_for(tid).values())
        rows.append(
            TopicStats(
                topic_id=tid,
                domain=dataset.topics[tid].domain,
                mean_rating=sum(ratings) / len(ratings),
                max_rating=max(ratings),
                min_rating=min(ratings),
            )
        )
    aggregates: dict[str, dict[str, float]] = {}
    for domain in dataset.domains():
        in_domain = [r for r in rows if r.domain == domain]
        n = len(in_domain)
        aggregates[domain] = {
            "mean": sum(r.mean_rating for r in in_domain) / n,
            "max": sum(r.max_rating for r in in_domain) / n,
            "min": sum(r.min_rating for r in in_domain) / n,
        }
    return rows, aggregates


def paired_ttest_greater(xs: Sequence[float], ys: Sequence[float]):
    """One-sided paired t-test that mean(xs) > mean(ys).

    A thin wrapper for comparing per-topic statistics between two systems;
    returns (statistic, p value).
    """
    result = _scipy_stats.ttest_rel(xs, ys, alternative="greater")
    return float(result.statistic), float(result.pvalue)


# ---------------------------------------------------------------------------
# Report output


REPORT_COLUMNS = (
    "test_domain", "condition", "top1_avg", "ndcg_1", "ndcg_3", "ndcg_5",
    "n_topics", "delta_top1",
)


def write_report(rows: Sequence[ReportRow], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\t".join(REPORT_COLUMNS) + "\n")
        for row in rows:
            delta = "" if row.delta_top1 is None else "%.4f" % row.delta_top1
            handle.write(
                "%s\t%s\t%.4f\t%.4f\t%.4f\t%.4f\t%d\t%s\n"
                % (
                    row.test_domain, row.condition, row.top1_avg, row.ndcg_1,
                    row.ndcg_3, row.ndcg_5, row.n_topics, delta,
                )
            )


def format_report(rows: Sequence[ReportRow]) -> str:
    """Human-readable table of report rows."""
    header = f"{'domain':<10} {'condition':<28} {'top1':>6} {'nDCG-1':>7} {'nDCG-3':>7} {'nDCG-5':>7} {'topics':>7}"
    lines = [header, "-" * len(header)]
    for row in rows:
        condition = row.condition
        if row.delta_top1 is not None:
            condition += " (%+.3f)" % row.delta_top1
        lines.append(
            f"{row.test_domain:<10} {condition:<28} {row.top1_avg:>6.3f} "
            f"{row.ndcg_1:>7.3f} {row.ndcg_3:>7.3f} {row.ndcg_5:>7.3f} {row.n_topics:>7d}"
        )
    return "\n".join(lines)


def write_stats(
    rows: Sequence[TopicStats], aggregates: Mapping[str, Mapping[str, float]], path
) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("topic_id\tdomain\tmean\tmax\tmin\n")
        for row in rows:
            handle.write(
                "%s\t%s\t%.4f\t%.4f\t%.4f\n"
                % (row.topic_id, row.domain, row.mean_rating, row.max_rating, row.min_rating)
            )
        for domain in sorted(aggregates):
            agg = aggregates[domain]
            handle.write(
                "ALL\t%s\t%.4f\t%.4f\t%.4f\n"
                % (domain, agg["mean"], agg["max"], agg["min"])
            )
