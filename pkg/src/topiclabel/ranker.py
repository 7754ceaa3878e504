"""Supervised reranking: linear epsilon-insensitive SVR over the features.

Features are z-scored before training (their natural scales differ by
orders of magnitude), the regressor is fitted by deterministic full-batch
subgradient descent (kernels.svr_fit), and candidates are reordered by
predicted rating.  The ablation harness can train on a subset of feature
columns, so the model records which columns it was fitted on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import DegenerateTrainingError, FormatError, MissingFeaturesError, names_file
from .features import FEATURE_NAMES, FeatureVector


@dataclass
class GoldRating:
    """Mean human rating of one (topic, label) pair on the 0-3 scale."""

    topic_id: str
    label: str
    mean_rating: float
    n_annotations: int = 1

    def __post_init__(self) -> None:
        if not 0.0 <= self.mean_rating <= 3.0:
            raise ValueError(
                f"rating {self.mean_rating} for ({self.topic_id!r}, {self.label!r}) "
                "outside [0, 3]"
            )
        if self.n_annotations < 1:
            raise ValueError("n_annotations must be >= 1")


@dataclass
class RankerConfig:
    cost: float = 1.0
    epsilon: float = 0.1
    epochs: int = 5000
    seed: int = 0  # recorded for provenance; the full-batch fit is deterministic

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.cost <= 0:
            raise ValueError("cost must be positive")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass
class RegressionModel:
    weights: np.ndarray
    bias: float
    feature_means: np.ndarray
    feature_stds: np.ndarray
    config: RankerConfig
    feature_indices: tuple[int, ...] = field(
        default_factory=lambda: tuple(range(len(FEATURE_NAMES)))
    )


def _standardize(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    means = matrix.mean(axis=0)
    stds = matrix.std(axis=0)
    stds = np.where(stds > 0.0, stds, 1.0)  # constant features pass through
    return (matrix - means) / stds, means, stds


def fit(
    pairs: Sequence[tuple[FeatureVector, float]],
    config: RankerConfig | None = None,
    feature_indices: Sequence[int] | None = None,
) -> RegressionModel:
    """Train the regressor on (features, mean rating) pairs."""
    if config is None:
        config = RankerConfig()
    if len(pairs) < 2:
        raise DegenerateTrainingError(
            f"need at least 2 training pairs, got {len(pairs)}"
        )
    indices = tuple(feature_indices) if feature_indices is not None else tuple(
        range(len(FEATURE_NAMES))
    )
    matrix = np.stack([fv.as_array()[list(indices)] for fv, _ in pairs])
    targets = np.array([rating for _, rating in pairs], dtype=np.float64)
    standardized, means, stds = _standardize(matrix)
    weights, bias = kernels.svr_fit(
        standardized, targets, config.cost, config.epsilon, config.epochs
    )
    return RegressionModel(
        weights=weights,
        bias=float(bias),
        feature_means=means,
        feature_stds=stds,
        config=config,
        feature_indices=indices,
    )


def predict(model: RegressionModel, fv: FeatureVector) -> float:
    """Predicted rating for one candidate's features."""
    if not np.all(np.isfinite(model.weights)) or not np.isfinite(model.bias):
        raise DegenerateTrainingError("model weights are not finite")
    x = fv.as_array()[list(model.feature_indices)]
    z = (x - model.feature_means) / model.feature_stds
    return float(model.weights @ z + model.bias)


def rerank(
    model: RegressionModel, candidates: Sequence[tuple[str, FeatureVector]]
) -> list[str]:
    """Order candidate labels by predicted rating, best first.

    Ties fall back to the unsupervised trigram rank, then to the label.
    """
    for label, fv in candidates:
        if fv is None:
            raise MissingFeaturesError(f"candidate {label!r} has no feature vector")
    scored = [
        (label, predict(model, fv), fv.letter_trigram_rank)
        for label, fv in candidates
    ]
    scored.sort(key=lambda row: (-row[1], row[2], row[0]))
    return [label for label, _, _ in scored]


# ---------------------------------------------------------------------------
# File formats


def save_model(model: RegressionModel, path) -> None:
    payload = {
        "feature_names": [FEATURE_NAMES[i] for i in model.feature_indices],
        "feature_indices": list(model.feature_indices),
        "weights": model.weights.tolist(),
        "bias": model.bias,
        "feature_means": model.feature_means.tolist(),
        "feature_stds": model.feature_stds.tolist(),
        "config": {
            "cost": model.config.cost,
            "epsilon": model.config.epsilon,
            "epochs": model.config.epochs,
            "seed": model.config.seed,
        },
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


@names_file
def load_model(path) -> RegressionModel:
    with open(path, encoding="utf-8") as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as exc:
            raise FormatError(f"bad model file: {exc}") from exc
    try:
        return RegressionModel(
            weights=np.array(payload["weights"], dtype=np.float64),
            bias=float(payload["bias"]),
            feature_means=np.array(payload["feature_means"], dtype=np.float64),
            feature_stds=np.array(payload["feature_stds"], dtype=np.float64),
            config=RankerConfig(**payload["config"]),
            feature_indices=tuple(payload["feature_indices"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad model file: {exc}") from exc


GOLD_COLUMNS = ("topic_id", "label", "mean_rating", "n_annotations")


def write_gold(ratings: Sequence[GoldRating], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\t".join(GOLD_COLUMNS) + "\n")
        for r in sorted(ratings, key=lambda r: (r.topic_id, r.label)):
            handle.write(
                "%s\t%s\t%.10g\t%d\n"
                % (r.topic_id, r.label, r.mean_rating, r.n_annotations)
            )


@names_file
def read_gold(path) -> list[GoldRating]:
    ratings = []
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n").split("\t")
        if tuple(header) != GOLD_COLUMNS:
            raise FormatError(f"unexpected gold table header: {header}")
        for lineno, line in enumerate(handle, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != len(GOLD_COLUMNS):
                raise FormatError(f"line {lineno}: expected {len(GOLD_COLUMNS)} columns")
            try:
                ratings.append(
                    GoldRating(parts[0], parts[1], float(parts[2]), int(parts[3]))
                )
            except ValueError as exc:
                raise FormatError(f"line {lineno}: {exc}") from exc
    return ratings


def gold_index(ratings: Sequence[GoldRating]) -> dict[tuple[str, str], GoldRating]:
    return {(r.topic_id, r.label): r for r in ratings}
