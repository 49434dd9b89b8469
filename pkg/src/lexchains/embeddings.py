"""Token embedding models: text-format IO, vector math and a small CBOW
trainer with negative sampling."""

from __future__ import annotations

import gzip
import logging
import math
import threading
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from lexchains.errors import FormatError, LexChainsError

log = logging.getLogger(__name__)


class UndefinedSimilarity(LexChainsError, ValueError):
    """Cosine similarity requested for a zero vector."""


def cosine(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = math.sqrt(float(a @ a))
    nb = math.sqrt(float(b @ b))
    if na == 0.0 or nb == 0.0:
        raise UndefinedSimilarity("cosine similarity of a zero vector is undefined")
    return min(1.0, max(-1.0, float(a @ b) / (na * nb)))


def centroid(vectors: Sequence) -> np.ndarray:
    """Componentwise mean, accumulated in double precision."""
    if len(vectors) == 0:
        raise ValueError("centroid of an empty list")
    arr = np.asarray(vectors, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("vectors must share one dimension")
    return arr.mean(axis=0)


class EmbeddingModel:
    """Immutable token -> vector table with a fixed dimension.

    Lookups of unknown tokens return ``None``; callers decide how to
    treat them.
    """

    def __init__(self, tokens: Sequence[str], vectors, duplicates: int = 0):
        vectors = np.asarray(vectors, dtype=np.float32)
        if vectors.ndim != 2 or vectors.shape[0] != len(tokens):
            raise ValueError("vectors must be a (len(tokens), dimension) array")
        if vectors.shape[1] < 1:
            raise ValueError("dimension must be positive")
        for t in tokens:
            if not t or any(c.isspace() for c in t):
                raise ValueError(f"invalid token {t!r}")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("vectors contain non-finite values")
        self.tokens = list(tokens)
        self.index = {t: i for i, t in enumerate(self.tokens)}
        if len(self.index) != len(self.tokens):
            raise ValueError("duplicate tokens")
        self.vectors = vectors
        self.vectors.setflags(write=False)
        self.duplicates = duplicates

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self.index

    def __iter__(self):
        return iter(self.tokens)

    def get(self, token: str):
        i = self.index.get(token)
        return None if i is None else self.vectors[i]

    def __getitem__(self, token: str) -> np.ndarray:
        v = self.get(token)
        if v is None:
            raise KeyError(token)
        return v

    def __eq__(self, other):
        if not isinstance(other, EmbeddingModel):
            return NotImplemented
        return self.tokens == other.tokens and np.array_equal(self.vectors, other.vectors)

    @classmethod
    def from_dict(cls, table: dict) -> "EmbeddingModel":
        tokens = list(table)
        return cls(tokens, np.array([table[t] for t in tokens], dtype=np.float32))


def _open_text(path, mode):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, mode + "t", encoding="utf-8")
    return open(path, mode, encoding="utf-8")


def load_text_model(path) -> EmbeddingModel:
    """Read the ``vocab_size dimension`` header format (gzip by extension)."""
    source = str(path)
    with _open_text(path, "r") as fh:
        header = fh.readline().split()
        try:
            count, dim = int(header[0]), int(header[1])
            if len(header) != 2 or count < 0 or dim < 1:
                raise ValueError
        except (ValueError, IndexError):
            raise FormatError("expected header 'vocab_size dimension'", source, 1) from None
        table: dict[str, np.ndarray] = {}
        duplicates = rows = 0
        for lineno, line in enumerate(fh, 2):
            parts = line.rstrip("\r\n").split(" ")
            if parts and parts[-1] == "":
                parts.pop()
            if not parts or parts == [""]:
                continue
            rows += 1
            if rows > count:
                raise FormatError(f"more rows than the {count} declared", source, lineno)
            if len(parts) != dim + 1:
                raise FormatError(f"expected {dim} values, found {len(parts) - 1}", source, lineno)
            try:
                vec = np.array(parts[1:], dtype=np.float32)
            except ValueError:
                raise FormatError("non-numeric vector component", source, lineno) from None
            if not np.all(np.isfinite(vec)):
                raise FormatError("non-finite vector component", source, lineno)
            if parts[0] in table:
                duplicates += 1
                del table[parts[0]]
            table[parts[0]] = vec
        if rows != count:
            raise FormatError(f"header declares {count} rows, found {rows}", source)
    if duplicates:
        log.warning("%s: %d duplicate tokens, last occurrence kept", source, duplicates)
    tokens = list(table)
    vectors = np.array([table[t] for t in tokens], dtype=np.float32).reshape(len(tokens), dim)
    return EmbeddingModel(tokens, vectors, duplicates=duplicates)


def save_text_model(model: EmbeddingModel, path) -> None:
    with _open_text(path, "w") as fh:
        fh.write(f"{len(model)} {model.dimension}\n")
        for token, vec in zip(model.tokens, model.vectors):
            fh.write(token + " " + " ".join(f"{float(x):.6g}" for x in vec) + "\n")


# --------------------------------------------------------------------------
# CBOW with negative sampling


@dataclass
class TrainConfig:
    dimension: int = 300
    window: int = 15
    min_count: int = 10
    epochs: int = 5
    negative_samples: int = 5
    learning_rate: float = 0.025
    min_learning_rate: float = 0.0001
    seed: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.dimension < 1 or self.window < 1 or self.min_count < 1:
            raise ValueError("dimension, window and min_count must be >= 1")
        if self.epochs < 1 or self.negative_samples < 0 or self.workers < 1:
            raise ValueError("epochs and workers must be >= 1, negative_samples >= 0")


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.clip(x, -30.0, 30.0)))


def cbow_loss_and_grads(w_in, w_out, context, target, negatives):
    """Negative-sampling loss for one CBOW example and its gradients.

    Returns ``(loss, grad_in, grad_out)``; both gradients map a weight
    row index to the gradient of the loss with respect to that row.
    """
    h = w_in[context].mean(axis=0)
    rows = [target, *negatives]
    labels = np.zeros(len(rows))
    labels[0] = 1.0
    scores = w_out[rows] @ h
    p = _sigmoid(scores)
    loss = -math.log(max(p[0], 1e-300)) - float(np.sum(np.log(np.maximum(1.0 - p[1:], 1e-300))))
    g = p - labels  # dL/dscore
    grad_h = g @ w_out[rows]
    grad_out: dict[int, np.ndarray] = {}
    for row, gi in zip(rows, g):
        grad_out[row] = grad_out.get(row, 0.0) + gi * h
    grad_in: dict[int, np.ndarray] = {}
    for row in context:
        grad_in[int(row)] = grad_in.get(int(row), 0.0) + grad_h / len(context)
    return loss, grad_in, grad_out


class _Vocab:
    def __init__(self, corpus, min_count):
        counts = Counter(tok for doc in corpus for tok in doc)
        kept = [(t, c) for t, c in counts.items() if c >= min_count]
        # frequency-descending, lexicographic for ties: independent of corpus order quirks
        kept.sort(key=lambda tc: (-tc[1], tc[0]))
        self.tokens = [t for t, _ in kept]
        self.counts = np.array([c for _, c in kept], dtype=np.float64)
        self.index = {t: i for i, t in enumerate(self.tokens)}


def train_cbow(corpus: Iterable[Sequence[str]], cfg: TrainConfig | None = None) -> EmbeddingModel:
    """Train CBOW vectors over tokenized documents.

    With ``cfg.workers == 1`` the result depends only on the corpus and
    ``cfg`` (bit-reproducible).  More workers update the shared weights
    without locking, so results vary between runs.
    """
    cfg = cfg or TrainConfig()
    docs = [list(doc) for doc in corpus]
    if not any(docs):
        raise LexChainsError("training corpus is empty")
    vocab = _Vocab(docs, cfg.min_count)
    if not vocab.tokens:
        raise LexChainsError(f"no token reaches min_count={cfg.min_count}")
    encoded = [np.array([vocab.index[t] for t in doc if t in vocab.index], dtype=np.int64) for doc in docs]
    encoded = [d for d in encoded if len(d) > 1]

    rng = np.random.default_rng(cfg.seed)
    n, dim = len(vocab.tokens), cfg.dimension
    w_in = ((rng.random((n, dim)) - 0.5) / dim).astype(np.float32)
    w_out = np.zeros((n, dim), dtype=np.float32)
    noise = vocab.counts**0.75
    noise /= noise.sum()
    cum_noise = np.cumsum(noise)
    cum_noise[-1] = 1.0

    total_words = sum(len(d) for d in encoded) * cfg.epochs
    progress = [0]

    def run_shard(shard, seed):
        local = np.random.default_rng(seed)
        for _ in range(cfg.epochs):
            for doc in shard:
                for pos in range(len(doc)):
                    frac = progress[0] / max(1, total_words)
                    alpha = max(cfg.min_learning_rate, cfg.learning_rate * (1.0 - frac))
                    progress[0] += 1
                    lo, hi = max(0, pos - cfg.window), min(len(doc), pos + cfg.window + 1)
                    context = np.concatenate((doc[lo:pos], doc[pos + 1 : hi]))
                    target = int(doc[pos])
                    negs = np.searchsorted(cum_noise, local.random(cfg.negative_samples), side="right")
                    negs = [int(x) for x in negs if x != target]
                    _sgd_step(w_in, w_out, context, target, negs, alpha)

    if cfg.workers == 1:
        run_shard(encoded, cfg.seed)
    else:
        shards = [encoded[i :: cfg.workers] for i in range(cfg.workers)]
        seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.workers)
        threads = [threading.Thread(target=run_shard, args=(s, sd)) for s, sd in zip(shards, seeds)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

    return EmbeddingModel(vocab.tokens, w_in)


def _sgd_step(w_in, w_out, context, target, negatives, alpha):
    h = w_in[context].mean(axis=0, dtype=np.float64)
    rows = [target, *negatives]
    out = w_out[rows].astype(np.float64)
    g = _sigmoid(out @ h)
    g[0] -= 1.0
    grad_h = g @ out
    # sequential so repeated negatives accumulate like separate updates
    for row, gi in zip(rows, g):
        w_out[row] -= (alpha * gi * h).astype(np.float32)
    np.subtract.at(w_in, context, (alpha * grad_h / len(context)).astype(np.float32))
