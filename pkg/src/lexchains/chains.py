"""Flexible and fixed lexical chains over synset-annotated documents.

Flexible chains grow while each new synset shares at least one related
synset with everything accumulated so far in the current chain; fixed
chains are consecutive chunks of a preset size.  Every chain is reduced
to the member closest (by cosine) to the centroid of the members'
vectors in a synset embedding model.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from lexchains.corpus import AnnotatedDocument, AnnotatedToken
from lexchains.embeddings import EmbeddingModel
from lexchains.errors import LexChainsError
from lexchains.wordnet import LexicalDatabase, SynsetId, related_synsets


@dataclass
class LexicalChain:
    members: list[AnnotatedToken]
    # accumulated related synsets; empty for fixed chains
    related: frozenset[SynsetId] = frozenset()


@dataclass
class ChainedDocument:
    chains: list[LexicalChain] = field(default_factory=list)
    representatives: list[AnnotatedToken] = field(default_factory=list)
    label: str | None = None

    def to_document(self) -> AnnotatedDocument:
        return AnnotatedDocument(list(self.representatives), self.label)


def _members(doc) -> list[AnnotatedToken]:
    return list(doc.tokens) if isinstance(doc, AnnotatedDocument) else list(doc)


def _label(doc):
    return doc.label if isinstance(doc, AnnotatedDocument) else None


def best_repr(chain, tsm: EmbeddingModel | None) -> AnnotatedToken:
    """Member whose vector is most cosine-similar to the chain centroid.

    Members missing from ``tsm`` are left out of the centroid and cannot
    win; the earliest member wins ties.  With no member in ``tsm`` (or no
    model at all) the first member is returned.
    """
    members = chain.members if isinstance(chain, LexicalChain) else list(chain)
    if not members:
        raise ValueError("cannot represent an empty chain")
    if tsm is None:
        return members[0]
    found = [(m, tsm.get(m.render())) for m in members]
    found = [(m, np.asarray(v, dtype=np.float64)) for m, v in found if v is not None]
    if not found:
        return members[0]
    center = np.mean([v for _, v in found], axis=0)
    cnorm = float(np.linalg.norm(center))
    best, best_sim = found[0][0], -math.inf
    for member, vec in found:
        vnorm = float(np.linalg.norm(vec))
        if cnorm == 0.0 or vnorm == 0.0:
            continue
        sim = float(vec @ center) / (vnorm * cnorm)
        if sim > best_sim:
            best, best_sim = member, sim
    return best


def fllc2(doc, tsm: EmbeddingModel | None, db: LexicalDatabase) -> ChainedDocument:
    """Flexible lexical chains.

    A synset joins the current chain when its related set intersects the
    union of the related sets of every synset already in the chain;
    otherwise the chain is closed and a new one starts with it.
    """
    tokens = _members(doc)
    out = ChainedDocument(label=_label(doc))
    if not tokens:
        return out

    def close(members, related):
        chain = LexicalChain(members, frozenset(related))
        out.chains.append(chain)
        out.representatives.append(best_repr(chain, tsm))

    members = [tokens[0]]
    related = set(related_synsets(tokens[0].synset, db))
    for tok in tokens[1:]:
        new_rel = related_synsets(tok.synset, db)
        if not related.isdisjoint(new_rel):
            members.append(tok)
            related |= new_rel
        else:
            close(members, related)
            members, related = [tok], set(new_rel)
    if members:
        close(members, related)
    return out


def fxlc2(doc, tsm: EmbeddingModel | None, chunk_size: int) -> ChainedDocument:
    """Fixed lexical chains: consecutive chunks of ``chunk_size`` synsets,
    the last one possibly shorter."""
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    tokens = _members(doc)
    out = ChainedDocument(label=_label(doc))
    for start in range(0, len(tokens), chunk_size):
        chain = LexicalChain(tokens[start : start + chunk_size])
        out.chains.append(chain)
        out.representatives.append(best_repr(chain, tsm))
    return out


def chunk_count(n: int, chunk_size: int) -> int:
    return math.ceil(n / chunk_size)


def chain_corpus(corpus: Sequence[AnnotatedDocument], mode: str, *, tsm: EmbeddingModel | None = None,
                 db: LexicalDatabase | None = None, chunk_size: int | None = None,
                 workers: int = 1) -> list[AnnotatedDocument]:
    """Replace every document by its chain representatives.

    ``mode`` is ``"flexible"`` (needs ``db``) or ``"fixed"`` (needs
    ``chunk_size``).  Labels are kept, so the output can be chained or
    trained on again.
    """
    if mode == "flexible":
        if db is None:
            raise ValueError("flexible chaining needs a lexical database")

        def run(doc):
            return fllc2(doc, tsm, db)
    elif mode == "fixed":
        if chunk_size is None:
            raise ValueError("fixed chaining needs a chunk size")
        if chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")

        def run(doc):
            return fxlc2(doc, tsm, chunk_size)
    else:
        raise ValueError(f"unknown chaining mode {mode!r}")

    def guarded(item):
        i, doc = item
        try:
            return run(doc).to_document()
        except Exception as exc:
            raise LexChainsError(f"document {i}: {exc}") from exc

    items = list(enumerate(corpus))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(guarded, items))
    return [guarded(item) for item in items]
