"""Document classification harness: averaged document vectors, a tf-idf
bag-of-words baseline, k-NN and softmax regression, F1-micro and
stratified k-fold evaluation."""

from __future__ import annotations

import csv
import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from lexchains.embeddings import EmbeddingModel
from lexchains.errors import FormatError, LexChainsError

log = logging.getLogger(__name__)


@dataclass
class LabeledDataset:
    """Documents (token lists or precomputed vectors) with one label each."""

    documents: list
    labels: list[str]
    predefined_split: bool = False

    def __post_init__(self):
        if len(self.documents) != len(self.labels):
            raise ValueError("documents and labels differ in length")

    def __len__(self):
        return len(self.labels)

    def subset(self, idx) -> "LabeledDataset":
        return LabeledDataset([self.documents[i] for i in idx], [self.labels[i] for i in idx])


@dataclass
class DocumentVector:
    vector: np.ndarray | None
    covered: int
    total: int

    @property
    def valid(self) -> bool:
        return self.covered > 0


def doc_vector(doc: Sequence[str], model: EmbeddingModel) -> DocumentVector:
    """Mean of the in-vocabulary token vectors; invalid when none are."""
    vecs = [v for v in map(model.get, doc) if v is not None]
    if not vecs:
        return DocumentVector(None, 0, len(doc))
    return DocumentVector(np.mean(np.asarray(vecs, dtype=np.float64), axis=0), len(vecs), len(doc))


# --------------------------------------------------------------------------
# bag of words


def select_features(corpus: Sequence[Sequence[str]], top_k: int = 300) -> list[str]:
    """The ``top_k`` most frequent tokens; ties in lexicographic order."""
    counts = Counter(t for doc in corpus for t in doc)
    ranked = sorted(counts.items(), key=lambda tc: (-tc[1], tc[0]))
    return [t for t, _ in ranked[:top_k]]


def tfidf_idf(corpus: Sequence[Sequence[str]], features: Sequence[str]) -> np.ndarray:
    n = len(corpus)
    df = Counter(t for doc in corpus for t in set(doc))
    return np.array([math.log((1 + n) / (1 + df[f])) + 1.0 for f in features])


def tfidf_transform(corpus: Sequence[Sequence[str]], features: Sequence[str], idf: np.ndarray) -> np.ndarray:
    col = {f: j for j, f in enumerate(features)}
    mat = np.zeros((len(corpus), len(features)))
    for i, doc in enumerate(corpus):
        for t in doc:
            j = col.get(t)
            if j is not None:
                mat[i, j] += 1.0
    mat *= idf
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    np.divide(mat, norms, out=mat, where=norms > 0)
    return mat


def bow_tfidf(corpus: Sequence[Sequence[str]], top_k: int = 300):
    """Return ``(matrix, features)``: raw counts times smoothed idf
    ``ln((1+N)/(1+df)) + 1``, rows L2-normalised."""
    if not corpus:
        raise ValueError("corpus is empty")
    features = select_features(corpus, top_k)
    return tfidf_transform(corpus, features, tfidf_idf(corpus, features)), features


# --------------------------------------------------------------------------
# classifiers


def _cosine_distances(train: np.ndarray, query: np.ndarray) -> np.ndarray:
    tn = np.linalg.norm(train, axis=1)
    qn = float(np.linalg.norm(query))
    denom = tn * qn
    sims = np.zeros(len(train))
    ok = denom > 0
    sims[ok] = (train[ok] @ query) / denom[ok]
    return 1.0 - np.clip(sims, -1.0, 1.0)


def knn_predict(train: Sequence[tuple[np.ndarray, str]], query, k: int) -> str:
    """Majority label among the ``k`` nearest by cosine distance.

    Distance ties resolve by training order, vote ties by smaller mean
    distance, then lexicographically.  Zero vectors count as orthogonal
    to everything.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not train:
        raise ValueError("empty training set")
    X = np.asarray([v for v, _ in train], dtype=np.float64)
    dist = _cosine_distances(X, np.asarray(query, dtype=np.float64))
    nearest = np.argsort(dist, kind="stable")[:k]
    votes: dict[str, list[float]] = {}
    for i in nearest:
        votes.setdefault(train[i][1], []).append(dist[i])
    return min(votes, key=lambda lab: (-len(votes[lab]), sum(votes[lab]) / len(votes[lab]), lab))


class KNNClassifier:
    def __init__(self, k: int = 5):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k

    def fit(self, X, y):
        self.train = list(zip(np.asarray(X, dtype=np.float64), y))
        return self

    def predict(self, X) -> list[str]:
        return [knn_predict(self.train, q, self.k) for q in np.asarray(X, dtype=np.float64)]

    def __repr__(self):
        return f"knn(k={self.k})"


def softmax_loss_grad(W, b, X, y, l2):
    """Mean cross-entropy plus ``l2/2 * |W|^2`` and its gradients."""
    logits = X @ W + b
    logits -= logits.max(axis=1, keepdims=True)
    p = np.exp(logits)
    p /= p.sum(axis=1, keepdims=True)
    n = len(X)
    loss = -np.mean(np.log(p[np.arange(n), y] + 1e-300)) + 0.5 * l2 * float(np.sum(W * W))
    p[np.arange(n), y] -= 1.0
    gW = X.T @ p / n + l2 * W
    gb = p.mean(axis=0)
    return loss, gW, gb


@dataclass
class LogRegModel:
    classes: list[str]
    W: np.ndarray
    b: np.ndarray
    mean: np.ndarray
    scale: np.ndarray

    def probabilities(self, X) -> np.ndarray:
        Z = (np.asarray(X, dtype=np.float64) - self.mean) / self.scale
        logits = Z @ self.W + self.b
        logits -= logits.max(axis=1, keepdims=True)
        p = np.exp(logits)
        return p / p.sum(axis=1, keepdims=True)


def logreg_train(X, y: Sequence[str], l2: float = 1e-3, epochs: int = 500, rate: float = 0.5,
                 seed: int = 0) -> LogRegModel:
    """Multinomial softmax regression by full-batch gradient descent on
    standardised features."""
    classes = sorted(set(y))
    if len(classes) < 2:
        raise LexChainsError("logistic regression needs at least two classes")
    X = np.asarray(X, dtype=np.float64)
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    Z = (X - mean) / scale
    yi = np.array([classes.index(lab) for lab in y])
    rng = np.random.default_rng(seed)
    W = rng.normal(scale=0.01, size=(X.shape[1], len(classes)))
    b = np.zeros(len(classes))
    for _ in range(epochs):
        _, gW, gb = softmax_loss_grad(W, b, Z, yi, l2)
        W -= rate * gW
        b -= rate * gb
    return LogRegModel(classes, W, b, mean, scale)


def logreg_predict(model: LogRegModel, query) -> str:
    p = model.probabilities(np.atleast_2d(query))[0]
    best = p.max()
    # exact ties: lexicographically first class
    return min(c for c, pc in zip(model.classes, p) if pc == best)


class LogRegClassifier:
    def __init__(self, l2: float = 1e-3, epochs: int = 500, rate: float = 0.5, seed: int = 0):
        self.l2, self.epochs, self.rate, self.seed = l2, epochs, rate, seed

    def fit(self, X, y):
        self.model = logreg_train(X, y, self.l2, self.epochs, self.rate, self.seed)
        return self

    def predict(self, X) -> list[str]:
        return [logreg_predict(self.model, q) for q in np.asarray(X, dtype=np.float64)]

    def __repr__(self):
        return f"logreg(l2={self.l2})"


CLASSIFIERS: dict[str, Callable] = {"knn": KNNClassifier, "logreg": LogRegClassifier}


# --------------------------------------------------------------------------
# pipelines: fit(documents, labels) / predict(documents)


def _majority(labels):
    counts = Counter(labels)
    return min(counts, key=lambda lab: (-counts[lab], lab))


class VectorPipeline:
    """Classifier over precomputed vectors; ``None`` marks an invalid
    document, which is skipped in training and gets the majority label."""

    def __init__(self, classifier):
        self.classifier = classifier

    def vectors(self, documents):
        return list(documents)

    def fit(self, documents, labels):
        vecs = self.vectors(documents)
        keep = [i for i, v in enumerate(vecs) if v is not None]
        if not keep:
            raise LexChainsError("no valid document vectors in the training data")
        self.majority = _majority(labels)
        self.classifier.fit(np.array([vecs[i] for i in keep]), [labels[i] for i in keep])
        return self

    def predict(self, documents) -> list[str]:
        vecs = self.vectors(documents)
        valid = [i for i, v in enumerate(vecs) if v is not None]
        preds = [self.majority] * len(vecs)
        if valid:
            for i, p in zip(valid, self.classifier.predict(np.array([vecs[i] for i in valid]))):
                preds[i] = p
        return preds


class EmbeddingPipeline(VectorPipeline):
    """Token documents averaged in an embedding model."""

    def __init__(self, model: EmbeddingModel, classifier):
        super().__init__(classifier)
        self.model = model

    def vectors(self, documents):
        return [doc_vector(d, self.model).vector for d in documents]


class BowPipeline(VectorPipeline):
    """tf-idf over the training fold's top-k tokens."""

    def __init__(self, classifier, top_k: int = 300):
        super().__init__(classifier)
        self.top_k = top_k

    def fit(self, documents, labels):
        self.features = select_features(documents, self.top_k)
        self.idf = tfidf_idf(documents, self.features)
        return super().fit(documents, labels)

    def vectors(self, documents):
        return list(tfidf_transform(documents, self.features, self.idf))


# --------------------------------------------------------------------------
# metrics and evaluation


def f1_micro(pred: Sequence[str], gold: Sequence[str]) -> float:
    """Micro-averaged F1 from pooled per-class counts."""
    if len(pred) != len(gold):
        raise ValueError("prediction and gold lists differ in length")
    if not gold:
        raise ValueError("empty label lists")
    tp = fp = fn = 0
    for c in set(pred) | set(gold):
        tp += sum(1 for p, g in zip(pred, gold) if p == c and g == c)
        fp += sum(1 for p, g in zip(pred, gold) if p == c and g != c)
        fn += sum(1 for p, g in zip(pred, gold) if p != c and g == c)
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


def accuracy(pred, gold) -> float:
    return sum(p == g for p, g in zip(pred, gold)) / len(gold)


def kfold_indices(labels: Sequence[str], k: int, seed: int) -> list[list[int]]:
    """Stratified folds from a seeded shuffle (plain folds if some class
    has fewer than ``k`` members)."""
    n = len(labels)
    if k < 2:
        raise ValueError("k must be >= 2")
    if n < k:
        raise ValueError(f"dataset of {n} documents is smaller than k={k}")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    counts = Counter(labels)
    if min(counts.values()) >= k:
        start = 0
        for label in sorted(counts):
            idx = [i for i, lab in enumerate(labels) if lab == label]
            for j, i in enumerate(rng.permutation(idx)):
                folds[(start + j) % k].append(int(i))
            start = (start + len(idx)) % k
    else:
        log.warning("a class has fewer than %d members; using unstratified folds", k)
        for j, i in enumerate(rng.permutation(n)):
            folds[j % k].append(int(i))
    return [sorted(f) for f in folds]


@dataclass
class CVResult:
    mean: float
    scores: list[float]
    folds: list[list[int]] = field(repr=False, default_factory=list)


def kfold_eval(dataset: LabeledDataset, pipeline_factory: Callable[[], object], k: int = 10,
               seed: int = 0) -> CVResult:
    """Mean F1-micro over ``k`` folds; a fresh pipeline is built per fold."""
    folds = kfold_indices(dataset.labels, k, seed)
    scores = []
    for test in folds:
        held = set(test)
        train = [i for i in range(len(dataset)) if i not in held]
        tr, te = dataset.subset(train), dataset.subset(test)
        pipe = pipeline_factory()
        pipe.fit(tr.documents, tr.labels)
        scores.append(f1_micro(pipe.predict(te.documents), te.labels))
    return CVResult(float(np.mean(scores)), scores, folds)


def grid_search(dataset: LabeledDataset, make_pipeline: Callable[..., object], grid: dict[str, list],
                k: int = 10, seed: int = 0):
    """Exhaustive search; returns ``(best_params, best_result)``, first
    grid point winning ties."""
    if not grid or any(len(v) == 0 for v in grid.values()):
        raise ValueError("empty parameter grid")
    names = list(grid)
    best = None
    for values in itertools.product(*(grid[n] for n in names)):
        params = dict(zip(names, values))
        result = kfold_eval(dataset, lambda: make_pipeline(**params), k, seed)
        if best is None or result.mean > best[1].mean:
            best = (params, result)
    return best


def tuned_kfold_eval(dataset: LabeledDataset, make_pipeline: Callable[..., object], grid: dict[str, list],
                     k: int = 10, inner_k: int | None = None, seed: int = 0):
    """k-fold evaluation with a grid search on each training fold only.

    Returns ``(CVResult, chosen_params_per_fold)``.
    """
    folds = kfold_indices(dataset.labels, k, seed)
    scores, chosen = [], []
    for test in folds:
        held = set(test)
        train = dataset.subset([i for i in range(len(dataset)) if i not in held])
        params, _ = grid_search(train, make_pipeline, grid, min(inner_k or k, len(train)), seed)
        pipe = make_pipeline(**params)
        pipe.fit(train.documents, train.labels)
        te = dataset.subset(test)
        scores.append(f1_micro(pipe.predict(te.documents), te.labels))
        chosen.append(params)
    return CVResult(float(np.mean(scores)), scores, folds), chosen


# --------------------------------------------------------------------------
# document-vector CSV


def write_vectors_csv(path, labels: Sequence[str], vectors: Sequence, dimension: int) -> None:
    """``label,dim0..dimD``; invalid documents get empty components."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", *(f"dim{i}" for i in range(dimension))])
        for label, vec in zip(labels, vectors):
            if vec is None:
                w.writerow([label, *([""] * dimension)])
            else:
                w.writerow([label, *(f"{float(x):.9g}" for x in vec)])


def read_vectors_csv(path) -> LabeledDataset:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if not header or header[0] != "label":
            raise FormatError("expected header 'label,dim0,...'", str(path), 1)
        dim = len(header) - 1
        docs, labels = [], []
        for lineno, row in enumerate(rows, 2):
            if len(row) != dim + 1:
                raise FormatError(f"expected {dim + 1} fields, found {len(row)}", str(path), lineno)
            labels.append(row[0])
            if all(x == "" for x in row[1:]):
                docs.append(None)
                continue
            try:
                docs.append(np.array([float(x) for x in row[1:]]))
            except ValueError:
                raise FormatError("non-numeric component", str(path), lineno) from None
    return LabeledDataset(docs, labels)


def report_line(dataset: str, classifier: str, result: CVResult, k: int, seed: int) -> str:
    return f"{dataset} {classifier} {result.mean:.6f} {k} {seed}"


def dataset_stats(docs) -> dict:
    labels = {d.label for d in docs if d.label is not None}
    tokens = {t for d in docs for t in d.tokens}
    return {"documents": len(docs), "classes": len(labels), "tokens": len(tokens)}


def chunk_size_study(corpus, model: EmbeddingModel, chunk_sizes: Sequence[int], make_classifier,
                     k: int = 10, seed: int = 0, tsm: EmbeddingModel | None = None):
    """Fixed-chain chunk-size sweep over an annotated, labeled corpus.

    For each chunk size the corpus is chained with ``tsm`` (``model`` if
    not given), documents are averaged in ``model`` and scored by k-fold
    F1-micro.  Returns rows ``(chunk_size, mean_f1, compression)``.
    """
    from lexchains.chains import chain_corpus

    tsm = model if tsm is None else tsm
    n_in = sum(len(d) for d in corpus)
    rows = []
    for cs in chunk_sizes:
        chained = chain_corpus(corpus, "fixed", tsm=tsm, chunk_size=cs)
        ds = LabeledDataset([d.rendered() for d in chained], [d.label for d in chained])
        result = kfold_eval(ds, lambda: EmbeddingPipeline(model, make_classifier()), k, seed)
        n_out = sum(len(d) for d in chained)
        rows.append((cs, result.mean, n_out / n_in if n_in else 1.0))
    return rows
