"""Hot numeric kernels with a numba-compiled fast path.

Every kernel is written once as a plain Python function over numpy arrays.
When numba is importable (and not disabled), the same source is compiled
with ``numba.njit``; otherwise the uncompiled function runs as-is.  Both
paths execute the identical sequence of float64 operations, so they produce
bit-for-bit identical results — the compiled path is just orders of
magnitude faster on the training and power-iteration loops.

Set ``TOPICLABEL_NUMBA=0`` in the environment to force the uncompiled path.
``benchmarks/bench_kernels.py`` times the two paths side by side.

Randomness inside kernels uses a Park-Miller LCG (state * 48271 mod 2^31-1)
because its arithmetic never leaves int64 range, which keeps the compiled
and uncompiled paths exactly equivalent.
"""

import math
import os

import numpy as np

try:
    import numba
    from numba.extending import register_jitable
except ImportError:  # pragma: no cover - numba is a hard dependency, but the
    numba = None     # plain path keeps the package importable without it

    def register_jitable(fn):
        return fn


NUMBA_ENABLED = numba is not None and os.environ.get(
    "TOPICLABEL_NUMBA", "1"
).strip().lower() not in {"0", "false", "off", "no"}

LCG_MODULUS = 2147483647  # 2**31 - 1, prime
LCG_MULTIPLIER = 48271
NOISE_DOMAIN = LCG_MODULUS - 1  # noise tables are scaled to sum to this


def lcg_seed(seed):
    """Map an arbitrary integer seed onto a valid LCG state in [1, m-1]."""
    return int(seed) % (LCG_MODULUS - 1) + 1


@register_jitable
def _lcg_next(state):
    return state * LCG_MULTIPLIER % LCG_MODULUS


@register_jitable
def _sigmoid(x):
    # Saturate far from zero: keeps math.exp in a range where the compiled
    # and interpreted paths agree exactly and never overflow.
    if x > 30.0:
        return 1.0
    if x < -30.0:
        return 0.0
    return 1.0 / (1.0 + math.exp(-x))


@register_jitable
def _draw_noise(state, noise_cdf, forbidden):
    """Draw a vocabulary index from the noise table, avoiding `forbidden`.

    Returns (state, index); index is -1 when no acceptable draw was found
    (only possible for single-token vocabularies).
    """
    for _ in range(64):
        state = _lcg_next(state)
        r = state - 1
        if r >= noise_cdf[-1]:
            r = noise_cdf[-1] - 1
        lo = 0
        hi = noise_cdf.shape[0] - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if noise_cdf[mid] > r:
                hi = mid
            else:
                lo = mid + 1
        if lo != forbidden:
            return state, lo
    return state, -1


@register_jitable
def _train_pair(vecs, row, ctx_vecs, target, noise_cdf, negative, alpha, work, state):
    """One negative-sampling update for the pair (input row, target token).

    Pushes sigma(v.c_target) toward 1 and sigma(v.c_noise) toward 0,
    updating the input vector and the touched output vectors in place.
    """
    dim = vecs.shape[1]
    for j in range(dim):
        work[j] = 0.0
    for k in range(negative + 1):
        if k == 0:
            out = target
            label = 1.0
        else:
            state, out = _draw_noise(state, noise_cdf, target)
            if out < 0:
                continue
            label = 0.0
        x = 0.0
        for j in range(dim):
            x += vecs[row, j] * ctx_vecs[out, j]
        g = (label - _sigmoid(x)) * alpha
        for j in range(dim):
            work[j] += g * ctx_vecs[out, j]
            ctx_vecs[out, j] += g * vecs[row, j]
    for j in range(dim):
        vecs[row, j] += work[j]
    return state


def train_epoch(
    tokens,
    offsets,
    doc_rows,
    word_vecs,
    ctx_vecs,
    doc_vecs,
    keep_probs,
    noise_cdf,
    window,
    negative,
    dynamic_window,
    train_words,
    train_docs,
    alpha_initial,
    alpha_final,
    done,
    total,
    state,
):
    """One pass over the corpus for skip-gram and/or dbow training.

    tokens/offsets hold every document's token ids concatenated; doc_rows
    maps each document to its row in doc_vecs.  With train_words set, each
    surviving position is trained against its window (skip-gram); with
    train_docs set, the document vector is trained to predict each surviving
    token (dbow).  The learning rate decays linearly with `done`/`total`,
    counters of token positions across all epochs.

    Returns (state, done) so the caller can chain epochs.
    """
    n_docs = offsets.shape[0] - 1
    max_len = 0
    for d in range(n_docs):
        length = offsets[d + 1] - offsets[d]
        if length > max_len:
            max_len = length
    kept = np.empty(max_len, dtype=np.int32)
    work = np.empty(word_vecs.shape[1])
    alpha_span = alpha_final - alpha_initial

    for d in range(n_docs):
        # sub-sample frequent tokens once per document pass
        n_kept = 0
        for p in range(offsets[d], offsets[d + 1]):
            tok = tokens[p]
            keep = keep_probs[tok]
            if keep < 1.0:
                state = _lcg_next(state)
                if (state - 1) / (LCG_MODULUS - 1.0) >= keep:
                    continue
            kept[n_kept] = tok
            n_kept += 1

        doc_len = offsets[d + 1] - offsets[d]
        alpha = alpha_initial + alpha_span * (done / total)
        done += doc_len

        if train_words:
            for pos in range(n_kept):
                if dynamic_window:
                    state = _lcg_next(state)
                    span = 1 + (state - 1) % window
                else:
                    span = window
                lo = pos - span
                if lo < 0:
                    lo = 0
                hi = pos + span + 1
                if hi > n_kept:
                    hi = n_kept
                center = kept[pos]
                for q in range(lo, hi):
                    if q == pos:
                        continue
                    state = _train_pair(
                        word_vecs, center, ctx_vecs, kept[q],
                        noise_cdf, negative, alpha, work, state,
                    )
        if train_docs:
            row = doc_rows[d]
            for pos in range(n_kept):
                state = _train_pair(
                    doc_vecs, row, ctx_vecs, kept[pos],
                    noise_cdf, negative, alpha, work, state,
                )
    return state, done


def pagerank_power(indptr, targets, damping, tol, max_iter):
    """Power iteration for PageRank with uniform teleport.

    Dangling mass is redistributed uniformly each iteration.  Stops when the
    L1 change drops below tol.  Returns (scores, iterations, residual).
    """
    n = indptr.shape[0] - 1
    rank = np.full(n, 1.0 / n)
    fresh = np.empty(n)
    residual = 0.0
    iterations = 0
    for _ in range(max_iter):
        dangling = 0.0
        for i in range(n):
            if indptr[i + 1] == indptr[i]:
                dangling += rank[i]
        base = (1.0 - damping) / n + damping * dangling / n
        for i in range(n):
            fresh[i] = base
        for i in range(n):
            degree = indptr[i + 1] - indptr[i]
            if degree > 0:
                share = damping * rank[i] / degree
                for e in range(indptr[i], indptr[i + 1]):
                    fresh[targets[e]] += share
        residual = 0.0
        for i in range(n):
            residual += abs(fresh[i] - rank[i])
            rank[i] = fresh[i]
        iterations += 1
        if residual < tol:
            break
    return rank, iterations, residual


def svr_fit(features, targets, cost, epsilon, epochs):
    """Full-batch subgradient descent for linear epsilon-insensitive SVR.

    Minimises (1/2)||w||^2 + cost * sum max(0, |w.x + b - y| - epsilon).
    Equivalently (lam/2)||w||^2 + mean hinge with lam = 1/(cost*n), stepped
    at the Pegasos rate 1/(lam*t) with iterates projected onto the ball of
    radius 1/sqrt(lam).  The bias is unregularised, starts at mean(y) and
    steps at 1/t.  Returns the suffix average of the second half of the
    iterates, which converges faster than the last iterate.
    """
    n, dim = features.shape
    lam = 1.0 / (cost * n)
    limit = 1.0 / math.sqrt(lam)
    w = np.zeros(dim)
    grad = np.empty(dim)
    w_sum = np.zeros(dim)
    b_sum = 0.0
    tail = epochs - epochs // 2
    b = 0.0
    for i in range(n):
        b += targets[i]
    b /= n
    for t in range(1, epochs + 1):
        for j in range(dim):
            grad[j] = lam * w[j]
        grad_b = 0.0
        for i in range(n):
            r = b - targets[i]
            for j in range(dim):
                r += w[j] * features[i, j]
            if r > epsilon:
                s = 1.0
            elif r < -epsilon:
                s = -1.0
            else:
                continue
            for j in range(dim):
                grad[j] += s * features[i, j] / n
            grad_b += s / n
        eta = 1.0 / (lam * t)
        for j in range(dim):
            w[j] -= eta * grad[j]
        b -= grad_b / t
        norm2 = 0.0
        for j in range(dim):
            norm2 += w[j] * w[j]
        norm = math.sqrt(norm2)
        if norm > limit:
            scale = limit / norm
            for j in range(dim):
                w[j] *= scale
        if t > epochs // 2:
            for j in range(dim):
                w_sum[j] += w[j]
            b_sum += b
    for j in range(dim):
        w_sum[j] /= tail
    return w_sum, b_sum / tail


PLAIN = {
    "train_epoch": train_epoch,
    "pagerank_power": pagerank_power,
    "svr_fit": svr_fit,
}

if numba is not None:
    COMPILED = {
        name: numba.njit(cache=True, nogil=True)(fn) for name, fn in PLAIN.items()
    }
else:  # pragma: no cover
    COMPILED = {}


def get_kernel(name):
    """Return the active implementation of a kernel by name."""
    if NUMBA_ENABLED:
        return COMPILED[name]
    return PLAIN[name]


if NUMBA_ENABLED:
    train_epoch = COMPILED["train_epoch"]
    pagerank_power = COMPILED["pagerank_power"]
    svr_fit = COMPILED["svr_fit"]
