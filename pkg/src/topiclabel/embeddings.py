"""Skip-gram and dbow embedding training with negative sampling.

Both trainers share one kernel pass (see kernels.train_epoch): the word
model trains (center, context) pairs inside a window, the document model
additionally trains (document, word) pairs, learning its word vectors
jointly through the same output layer.  Noise tokens come from the unigram
distribution raised to 0.75; frequent tokens are dropped stochastically
below the sub-sampling threshold; the learning rate decays linearly over
all token positions of all epochs.

Training is bitwise reproducible for a fixed config at workers=1.  With
more workers, shards update the shared weight matrices without locking, so
results are approximate and run-dependent.
"""

from __future__ import annotations

import math
import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import (
    DegenerateVectorError,
    DimensionMismatchError,
    DuplicateTokenError,
    EmptyCorpusError,
    EmptyVocabularyError,
    FormatError,
    names_file,
)

WORD_FROM_WORDMODEL = "word_from_wordmodel"
WORD_FROM_DOCMODEL = "word_from_docmodel"
DOCUMENT = "document"

NOISE_EXPONENT = 0.75


@dataclass
class EmbeddingTable:
    """A dense vector per vocabulary token."""

    dim: int
    vocab: dict[str, int]
    vectors: np.ndarray
    kind: str
    _order: list[str] | None = field(default=None, repr=False)

    def __contains__(self, token: str) -> bool:
        return token in self.vocab

    def __len__(self) -> int:
        return len(self.vocab)

    def vector(self, token: str) -> np.ndarray:
        row = self.vocab.get(token)
        if row is None:
            raise KeyError(token)
        return self.vectors[row]

    def tokens_in_order(self) -> list[str]:
        if self._order is None:
            order: list[str | None] = [None] * len(self.vocab)
            for token, row in self.vocab.items():
                order[row] = token
            self._order = order  # type: ignore[assignment]
        return self._order  # type: ignore[return-value]


@dataclass
class TrainConfig:
    dim: int = 50
    window: int = 5
    negative_samples: int = 5
    subsample_threshold: float = 1e-2
    epochs: int = 100
    min_count: int = 1
    seed: int = 1
    alpha_initial: float = 0.025
    alpha_final: float = 1e-4
    dynamic_window: bool = True

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.negative_samples < 0:
            raise ValueError("negative_samples must be >= 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 0.0 < self.subsample_threshold <= 1.0:
            raise ValueError("subsample_threshold must be in (0, 1]")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        if self.alpha_initial <= 0 or self.alpha_final < 0:
            raise ValueError("learning rates must be positive")


def paper_scale_skipgram(seed: int = 1) -> TrainConfig:
    """Full-scale word-model preset (300-d, window 5, 100 epochs)."""
    return TrainConfig(
        dim=300, window=5, negative_samples=5, subsample_threshold=1e-5,
        epochs=100, min_count=5, seed=seed,
    )


def paper_scale_dbow(seed: int = 1) -> TrainConfig:
    """Full-scale document-model preset (300-d, window 15, 20 epochs)."""
    return TrainConfig(
        dim=300, window=15, negative_samples=5, subsample_threshold=1e-5,
        epochs=20, min_count=5, seed=seed,
    )


def desk_scale_skipgram(seed: int = 1) -> TrainConfig:
    """Small-corpus word-model preset: lower dim, more epochs, keep rare words."""
    return TrainConfig(
        dim=50, window=5, negative_samples=5, subsample_threshold=1e-2,
        epochs=200, min_count=1, seed=seed,
    )


def desk_scale_dbow(seed: int = 1) -> TrainConfig:
    return TrainConfig(
        dim=50, window=15, negative_samples=5, subsample_threshold=1e-2,
        epochs=80, min_count=1, seed=seed,
    )


# ---------------------------------------------------------------------------
# Vocabulary plumbing


def _build_vocab(counts: Counter, min_count: int) -> tuple[list[str], np.ndarray]:
    kept = [(t, c) for t, c in counts.items() if c >= min_count]
    kept.sort(key=lambda tc: (-tc[1], tc[0]))
    tokens = [t for t, _ in kept]
    return tokens, np.array([c for _, c in kept], dtype=np.int64)


def _keep_probs(counts: np.ndarray, threshold: float) -> np.ndarray:
    """Per-token probability of keeping an occurrence during sub-sampling.

    word2vec's rule: with f the token count and tc = threshold * corpus
    size, keep with probability (sqrt(f/tc) + 1) * tc/f, capped at 1.  A
    threshold of 1 keeps everything.
    """
    total = counts.sum()
    tc = threshold * total
    probs = (np.sqrt(counts / tc) + 1.0) * (tc / counts)
    return np.minimum(probs, 1.0)


def _noise_cdf(counts: np.ndarray) -> np.ndarray:
    weights = counts.astype(np.float64) ** NOISE_EXPONENT
    cdf = np.cumsum(weights)
    cdf = np.round(cdf / cdf[-1] * kernels.NOISE_DOMAIN).astype(np.int64)
    cdf[-1] = kernels.NOISE_DOMAIN
    return cdf


def _encode(
    docs: Sequence[Sequence[str]], index: dict[str, int]
) -> tuple[np.ndarray, np.ndarray]:
    """Flatten documents to vocab ids, dropping out-of-vocabulary tokens."""
    flat: list[int] = []
    offsets = np.empty(len(docs) + 1, dtype=np.int64)
    offsets[0] = 0
    for d, doc in enumerate(docs):
        flat.extend(index[t] for t in doc if t in index)
        offsets[d + 1] = len(flat)
    return np.array(flat, dtype=np.int32), offsets


def _run_epochs(
    tokens: np.ndarray,
    offsets: np.ndarray,
    doc_rows: np.ndarray,
    word_vecs: np.ndarray,
    ctx_vecs: np.ndarray,
    doc_vecs: np.ndarray,
    keep_probs: np.ndarray,
    noise_cdf: np.ndarray,
    config: TrainConfig,
    train_words: bool,
    train_docs: bool,
    workers: int,
) -> None:
    args = (
        config.window, config.negative_samples, config.dynamic_window,
        train_words, train_docs, config.alpha_initial, config.alpha_final,
    )
    if workers <= 1:
        state = kernels.lcg_seed(config.seed)
        done = 0
        total = int(tokens.size) * config.epochs
        for _ in range(config.epochs):
            state, done = kernels.train_epoch(
                tokens, offsets, doc_rows, word_vecs, ctx_vecs, doc_vecs,
                keep_probs, noise_cdf, *args, done, total, state,
            )
        return

    # Hogwild-style: shards update shared weights without locking.  The
    # kernel releases the GIL under numba, so threads genuinely overlap.
    n_docs = offsets.shape[0] - 1
    shards = []
    for w in range(workers):
        picked = list(range(w, n_docs, workers))
        if not picked:
            continue
        sub_offsets = np.empty(len(picked) + 1, dtype=np.int64)
        sub_offsets[0] = 0
        parts = []
        for k, d in enumerate(picked):
            parts.append(tokens[offsets[d] : offsets[d + 1]])
            sub_offsets[k + 1] = sub_offsets[k] + (offsets[d + 1] - offsets[d])
        sub_tokens = np.concatenate(parts) if parts else np.empty(0, np.int32)
        shards.append((sub_tokens, sub_offsets, doc_rows[picked]))

    def run(shard_id: int, shard) -> None:
        sub_tokens, sub_offsets, sub_rows = shard
        state = kernels.lcg_seed(config.seed * 7919 + shard_id * 104729 + 1)
        done = 0
        total = max(int(sub_tokens.size) * config.epochs, 1)
        for _ in range(config.epochs):
            state, done = kernels.train_epoch(
                sub_tokens, sub_offsets, sub_rows, word_vecs, ctx_vecs,
                doc_vecs, keep_probs, noise_cdf, *args, done, total, state,
            )

    threads = [
        threading.Thread(target=run, args=(i, shard)) for i, shard in enumerate(shards)
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()


def _prepare(docs: list[Sequence[str]], config: TrainConfig):
    if not docs:
        raise EmptyCorpusError("no documents to train on")
    counts: Counter = Counter()
    for doc in docs:
        counts.update(doc)
    tokens, kept_counts = _build_vocab(counts, config.min_count)
    if not tokens:
        raise EmptyVocabularyError(
            f"no token appears at least min_count={config.min_count} times"
        )
    index = {t: i for i, t in enumerate(tokens)}
    flat, offsets = _encode(docs, index)
    if flat.size == 0:
        raise EmptyVocabularyError("corpus is empty after vocabulary cutoff")
    return tokens, index, kept_counts, flat, offsets


def train_skipgram(
    docs: Iterable[Sequence[str]], config: TrainConfig, workers: int = 1
) -> EmbeddingTable:
    """Train skip-gram word vectors with negative sampling.

    docs is a sequence of token lists, titles already collapsed to single
    tokens.  Returns the input-side word vectors.
    """
    docs = [list(d) for d in docs]
    tokens, index, counts, flat, offsets = _prepare(docs, config)
    rng = np.random.default_rng(config.seed)
    word_vecs = (rng.random((len(tokens), config.dim)) - 0.5) / config.dim
    ctx_vecs = np.zeros((len(tokens), config.dim))
    doc_vecs = np.zeros((1, config.dim))  # unused by the word model
    _run_epochs(
        flat, offsets, np.zeros(len(docs), dtype=np.int32), word_vecs, ctx_vecs,
        doc_vecs, _keep_probs(counts, config.subsample_threshold),
        _noise_cdf(counts), config, True, False, workers,
    )
    return EmbeddingTable(config.dim, index, word_vecs, WORD_FROM_WORDMODEL)


def train_dbow(
    docs: Iterable[tuple[str, Sequence[str]]], config: TrainConfig, workers: int = 1
) -> tuple[EmbeddingTable, EmbeddingTable]:
    """Train dbow document vectors, learning word vectors jointly.

    docs is a sequence of (document key, token list) pairs; duplicate keys
    share one document vector.  Returns (document table, word table): the
    document vector is trained to predict each of the document's words, and
    the words also train each other skip-gram style through the shared
    output layer.
    """
    docs = list(docs)
    bodies = [list(toks) for _, toks in docs]
    tokens, index, counts, flat, offsets = _prepare(bodies, config)

    doc_index: dict[str, int] = {}
    doc_rows = np.empty(len(docs), dtype=np.int32)
    for d, (key, _) in enumerate(docs):
        doc_rows[d] = doc_index.setdefault(key, len(doc_index))

    rng = np.random.default_rng(config.seed)
    word_vecs = (rng.random((len(tokens), config.dim)) - 0.5) / config.dim
    doc_vecs = (rng.random((len(doc_index), config.dim)) - 0.5) / config.dim
    ctx_vecs = np.zeros((len(tokens), config.dim))
    _run_epochs(
        flat, offsets, doc_rows, word_vecs, ctx_vecs, doc_vecs,
        _keep_probs(counts, config.subsample_threshold), _noise_cdf(counts),
        config, True, True, workers,
    )
    return (
        EmbeddingTable(config.dim, doc_index, doc_vecs, DOCUMENT),
        EmbeddingTable(config.dim, index, word_vecs, WORD_FROM_DOCMODEL),
    )


# ---------------------------------------------------------------------------
# Scoring helpers


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two equal-length vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shapes {a.shape} and {b.shape} differ")
    na = math.sqrt(float(a @ a))
    nb = math.sqrt(float(b @ b))
    if na == 0.0 or nb == 0.0:
        raise DegenerateVectorError("cosine of a zero-norm vector")
    return float(a @ b) / (na * nb)


def negative_sampling_loss(
    center: np.ndarray, context: np.ndarray, negatives: np.ndarray
) -> float:
    """Loss for one (center, context, negatives) training event.

    -log sigma(c.ctx) - sum_k log sigma(-c.n_k); the quantity each kernel
    update descends.  Kept as a plain reference implementation for gradient
    checking.
    """
    loss = float(np.logaddexp(0.0, -center @ context))
    for neg in negatives:
        loss += float(np.logaddexp(0.0, center @ neg))
    return loss


def negative_sampling_gradients(
    center: np.ndarray, context: np.ndarray, negatives: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic gradients of negative_sampling_loss w.r.t. all inputs."""

    def sigmoid(x: float) -> float:
        return 1.0 / (1.0 + math.exp(-x))

    g_pos = sigmoid(float(center @ context)) - 1.0  # d/dx of -log sigma(x)
    g_center = g_pos * context
    g_context = g_pos * center
    g_negatives = np.empty_like(negatives)
    for k, neg in enumerate(negatives):
        g_k = sigmoid(float(center @ neg))
        g_center = g_center + g_k * neg
        g_negatives[k] = g_k * center
    return g_center, g_context, g_negatives


# ---------------------------------------------------------------------------
# Text interchange format


def export_table(table: EmbeddingTable, path) -> None:
    """Write "vocab_size dim" then one "token v1 .. vdim" line per token.

    Floats are printed with 17 significant digits, so export/import
    round-trips bit for bit.
    """
    tokens = table.tokens_in_order()
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"{len(tokens)} {table.dim}\n")
        for row, token in enumerate(tokens):
            values = " ".join("%.17g" % v for v in table.vectors[row])
            handle.write(f"{token} {values}\n")


@names_file
def import_table(path, kind: str = WORD_FROM_WORDMODEL) -> EmbeddingTable:
    """Read the interchange format back into a table.

    Tokens may contain spaces (document keys are titles); the last `dim`
    fields of each row are the vector, everything before them is the token.
    """
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().split()
        if len(header) != 2:
            raise FormatError("header must be 'vocab_size dim'")
        try:
            size, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise FormatError("header must be 'vocab_size dim'") from exc
        if size < 0 or dim < 1:
            raise FormatError(f"invalid header: {size} {dim}")
        vocab: dict[str, int] = {}
        vectors = np.empty((size, dim))
        row = 0
        for lineno, line in enumerate(handle, start=2):
            if not line.strip():
                continue
            if row >= size:
                raise FormatError(f"more rows than header vocab_size={size}")
            parts = line.split()
            token = " ".join(parts[:-dim])
            if not token:
                raise DimensionMismatchError(
                    f"line {lineno}: expected a token and {dim} values"
                )
            try:
                values = [float(x) for x in parts[-dim:]]
            except ValueError as exc:
                raise DimensionMismatchError(
                    f"line {lineno}: expected {dim} numeric values"
                ) from exc
            if token in vocab:
                raise DuplicateTokenError(f"line {lineno}: duplicate token {token!r}")
            vocab[token] = row
            vectors[row] = values
            row += 1
    if row != size:
        raise FormatError(f"expected {size} rows, found {row}")
    if not np.all(np.isfinite(vectors)):
        raise FormatError("embedding file contains non-finite values")
    return EmbeddingTable(dim, vocab, vectors, kind)
