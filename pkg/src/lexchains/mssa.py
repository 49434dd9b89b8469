"""Text cleaning and sliding-window sense annotation.

Each mappable token is assigned the sense whose gloss vector is most
cosine-similar to its immediate neighbours (one token to each side).
The refinement pass repeats the selection using synset vectors trained
on an earlier annotation, and can be iterated.
"""

from __future__ import annotations

import logging
import unicodedata
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Sequence

import numpy as np

from lexchains.corpus import AnnotatedDocument, AnnotatedToken, Document, render
from lexchains.embeddings import EmbeddingModel, TrainConfig, centroid, train_cbow
from lexchains.wordnet import LexicalDatabase, SynsetId, senses

log = logging.getLogger(__name__)


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    text = resources.files("lexchains").joinpath("data/stopwords.txt").read_text(encoding="utf-8")
    return frozenset(text.split())


def _strip_punctuation(text: str) -> str:
    return "".join(" " if unicodedata.category(c).startswith("P") else c for c in text)


def preprocess(text: str) -> list[str]:
    """Lowercase, replace punctuation by spaces, drop stopwords.

    Apostrophes count as punctuation, so a possessive splits into the
    stem and a stray ``s`` that the stopword list removes.
    """
    stop = stopwords()
    return [t for t in _strip_punctuation(text.lower()).split() if t not in stop]


def _cos_or_zero(a, b) -> float:
    # undefined similarities (missing or zero vectors) contribute nothing
    if a is None or b is None:
        return 0.0
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return min(1.0, max(-1.0, float(np.dot(a, b)) / (na * nb)))


def window_score(sense_vec, left, right) -> float:
    """Score of one candidate sense against its left and right neighbours."""
    return _cos_or_zero(sense_vec, left) + _cos_or_zero(sense_vec, right)


def select_sense(candidates: Sequence[SynsetId], sense_vec, left, right) -> SynsetId:
    """Argmax of ``window_score``; the earliest candidate wins ties."""
    best, best_score = candidates[0], None
    for sid in candidates:
        s = window_score(sense_vec(sid), left, right)
        if best_score is None or s > best_score:
            best, best_score = sid, s
    return best


def _as_f64(v):
    return None if v is None else np.asarray(v, dtype=np.float64)


class Disambiguator:
    """Sense annotation against a word-level model (gloss centroids)."""

    def __init__(self, wv: EmbeddingModel, db: LexicalDatabase):
        self.wv = wv
        self.db = db
        self._gloss_cache: dict[SynsetId, np.ndarray | None] = {}

    def gloss_words(self, sid: SynsetId) -> list[str]:
        syn = self.db[sid]
        return preprocess(syn.gloss) + list(syn.lemmas)

    def gloss_vector(self, sid: SynsetId):
        if sid not in self._gloss_cache:
            vecs = [v for v in map(self.wv.get, self.gloss_words(sid)) if v is not None]
            self._gloss_cache[sid] = centroid(vecs) if vecs else None
        return self._gloss_cache[sid]

    def context_vector(self, word: str, position: int, previous):
        return _as_f64(self.wv.get(word))

    def sense_vector(self, sid: SynsetId, word: str):
        return self.gloss_vector(sid)

    def __call__(self, tokens: Sequence[str], previous: AnnotatedDocument | None = None,
                 label=None) -> AnnotatedDocument:
        words = [t for t in tokens if senses(t, None, self.db)]
        ctx = [self.context_vector(w, i, previous) for i, w in enumerate(words)]
        out = []
        for i, word in enumerate(words):
            candidates = senses(word, None, self.db)
            left = ctx[i - 1] if i > 0 else None
            right = ctx[i + 1] if i + 1 < len(words) else None
            chosen = select_sense(candidates, lambda s: self.sense_vector(s, word), left, right)
            out.append(AnnotatedToken(word, chosen))
        return AnnotatedDocument(out, label)


class Refiner(Disambiguator):
    """Sense annotation against a synset-level model from an earlier pass."""

    def __init__(self, sv: EmbeddingModel, db: LexicalDatabase):
        super().__init__(sv, db)
        self._fallback_cache: dict[SynsetId, np.ndarray | None] = {}

    def sense_vector(self, sid: SynsetId, word: str):
        direct = self.wv.get(render(word, sid))
        if direct is not None:
            return _as_f64(direct)
        if sid not in self._fallback_cache:
            vecs = []
            for w in preprocess(self.db[sid].gloss):
                first = senses(w, None, self.db)
                if first:
                    v = self.wv.get(render(w, first[0]))
                    if v is not None:
                        vecs.append(v)
            self._fallback_cache[sid] = centroid(vecs) if vecs else None
        return self._fallback_cache[sid]

    def context_vector(self, word: str, position: int, previous):
        if previous is not None:
            return _as_f64(self.wv.get(previous.tokens[position].render()))
        for sid in senses(word, None, self.db):
            v = self.wv.get(render(word, sid))
            if v is not None:
                return _as_f64(v)
        return None

    def __call__(self, tokens, previous=None, label=None) -> AnnotatedDocument:
        if isinstance(tokens, AnnotatedDocument):
            previous = tokens
            label = tokens.label if label is None else label
            tokens = [t.word for t in tokens.tokens]
        return super().__call__(tokens, previous, label)


def disambiguate(tokens: Sequence[str], wv: EmbeddingModel, db: LexicalDatabase) -> AnnotatedDocument:
    """Annotate ``tokens`` with senses; tokens unknown to ``db`` are dropped."""
    return Disambiguator(wv, db)(tokens)


def refine(tokens, sv: EmbeddingModel, db: LexicalDatabase) -> AnnotatedDocument:
    """One refinement pass with a synset model keyed by ``word#offset#pos``.

    ``tokens`` may be plain words or the ``AnnotatedDocument`` of an
    earlier pass; in the latter case neighbours are represented by the
    vectors of their previously chosen senses.
    """
    return Refiner(sv, db)(tokens)


@dataclass
class AnnotationStats:
    documents: int = 0
    tokens_in: int = 0
    tokens_dropped: int = 0
    senses_assigned: int = 0
    changed_by_refinement: int = 0

    def summary(self) -> str:
        return (f"documents={self.documents} tokens={self.tokens_in} "
                f"dropped={self.tokens_dropped} assigned={self.senses_assigned} "
                f"refined_changes={self.changed_by_refinement}")


def _map(fn, items, workers):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def annotate_corpus(docs: Sequence[Document], wv: EmbeddingModel, db: LexicalDatabase,
                    passes: int = 0, synset_model: EmbeddingModel | None = None,
                    train_config: TrainConfig | None = None, workers: int = 1):
    """Clean, annotate and optionally refine ``passes`` times.

    ``docs`` carry raw text as their single token.  Each refinement pass
    uses ``synset_model`` if given, otherwise a model trained on the
    previous pass's output.  Returns ``(annotated_docs, stats)``.
    """
    if passes < 0:
        raise ValueError("passes must be >= 0")
    stats = AnnotationStats(documents=len(docs))
    cleaned = [preprocess(" ".join(d.tokens)) for d in docs]
    stats.tokens_in = sum(map(len, cleaned))
    first = Disambiguator(wv, db)
    current = _map(lambda i: first(cleaned[i], label=docs[i].label), range(len(docs)), workers)
    stats.tokens_dropped = stats.tokens_in - sum(map(len, current))
    stats.senses_assigned = stats.tokens_in - stats.tokens_dropped
    for n in range(passes):
        sv = synset_model
        if sv is None:
            sv = train_cbow([d.rendered() for d in current], train_config or TrainConfig())
        refiner = Refiner(sv, db)
        updated = _map(refiner, current, workers)
        changed = sum(a != b for old, new in zip(current, updated) for a, b in zip(old.tokens, new.tokens))
        log.info("refinement pass %d changed %d senses", n + 1, changed)
        stats.changed_by_refinement += changed
        current = updated
    return current, stats
