"""WordNet lexical database: WNDB and portable-format loaders plus the
19-relation neighbourhood used for flexible chaining."""

from __future__ import annotations

import enum
import io
import logging
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from lexchains.errors import FormatError, LexChainsError, LookupFailure

log = logging.getLogger(__name__)

POS_TAGS = ("n", "v", "a", "s", "r")
_POS_ORDER = {p: i for i, p in enumerate(POS_TAGS)}
_WNDB_FILES = {"n": "noun", "v": "verb", "a": "adj", "r": "adv"}


@dataclass(frozen=True, order=True)
class SynsetId:
    pos: str
    offset: int

    def __post_init__(self):
        if self.pos not in _POS_ORDER:
            raise ValueError(f"invalid part of speech {self.pos!r}")
        if not 0 <= self.offset <= 99_999_999:
            raise ValueError(f"synset offset out of range: {self.offset}")

    @property
    def offset8(self) -> str:
        return f"{self.offset:08d}"

    def __str__(self):
        return f"{self.pos}{self.offset:08d}"

    @classmethod
    def parse(cls, text: str) -> "SynsetId":
        """Parse the compact ``<pos><offset8>`` form, e.g. ``n02084071``."""
        if len(text) != 9 or not text[1:].isdigit():
            raise ValueError(f"malformed synset id {text!r}")
        return cls(text[0], int(text[1:]))

    def sort_key(self):
        return (_POS_ORDER[self.pos], self.offset)


class RelationKind(enum.Enum):
    HYPERNYM = "hypernym"
    INSTANCE_HYPERNYM = "instance_hypernym"
    HYPONYM = "hyponym"
    INSTANCE_HYPONYM = "instance_hyponym"
    MEMBER_HOLONYM = "member_holonym"
    SUBSTANCE_HOLONYM = "substance_holonym"
    PART_HOLONYM = "part_holonym"
    MEMBER_MERONYM = "member_meronym"
    SUBSTANCE_MERONYM = "substance_meronym"
    PART_MERONYM = "part_meronym"
    ATTRIBUTE = "attribute"
    ENTAILMENT = "entailment"
    CAUSE = "cause"
    ALSO_SEE = "also_see"
    VERB_GROUP = "verb_group"
    SIMILAR_TO = "similar_to"
    TOPIC_DOMAIN = "topic_domain"
    REGION_DOMAIN = "region_domain"
    USAGE_DOMAIN = "usage_domain"


# WNDB pointer symbols (wninput(5WN)) for the supported kinds; anything
# else (antonyms, derivations, pertainyms, domain members, ...) is dropped.
POINTER_SYMBOLS = {
    "@": RelationKind.HYPERNYM,
    "@i": RelationKind.INSTANCE_HYPERNYM,
    "~": RelationKind.HYPONYM,
    "~i": RelationKind.INSTANCE_HYPONYM,
    "#m": RelationKind.MEMBER_HOLONYM,
    "#s": RelationKind.SUBSTANCE_HOLONYM,
    "#p": RelationKind.PART_HOLONYM,
    "%m": RelationKind.MEMBER_MERONYM,
    "%s": RelationKind.SUBSTANCE_MERONYM,
    "%p": RelationKind.PART_MERONYM,
    "=": RelationKind.ATTRIBUTE,
    "*": RelationKind.ENTAILMENT,
    ">": RelationKind.CAUSE,
    "^": RelationKind.ALSO_SEE,
    "$": RelationKind.VERB_GROUP,
    "&": RelationKind.SIMILAR_TO,
    ";c": RelationKind.TOPIC_DOMAIN,
    ";r": RelationKind.REGION_DOMAIN,
    ";u": RelationKind.USAGE_DOMAIN,
}


@dataclass(frozen=True)
class Synset:
    id: SynsetId
    lemmas: tuple[str, ...]
    gloss: str
    pointers: tuple[tuple[RelationKind, SynsetId], ...] = ()

    def __post_init__(self):
        if not self.lemmas:
            raise ValueError(f"synset {self.id} has no lemmas")


def _index_pos(pos: str) -> str:
    # satellites share the adjective index
    return "a" if pos == "s" else pos


@dataclass
class LexicalDatabase:
    """Synset store plus a ``(lemma, pos) -> senses`` index.

    Adjective satellites are indexed under ``"a"`` together with head
    adjectives, so the index mirrors WordNet's ``index.adj``.  Treat the
    instance as read-only once a loader has returned it.
    """

    synsets: dict[SynsetId, Synset] = field(default_factory=dict)
    sense_index: dict[tuple[str, str], list[SynsetId]] = field(default_factory=dict)
    dropped_pointers: Counter = field(default_factory=Counter)

    def __len__(self):
        return len(self.synsets)

    def __contains__(self, sid):
        return sid in self.synsets

    def __getitem__(self, sid: SynsetId) -> Synset:
        try:
            return self.synsets[sid]
        except KeyError:
            raise LookupFailure(f"unknown synset {sid}") from None

    def __eq__(self, other):
        if not isinstance(other, LexicalDatabase):
            return NotImplemented
        return self.synsets == other.synsets and self.sense_index == other.sense_index

    def related_synsets(self, sid: SynsetId) -> frozenset[SynsetId]:
        return related_synsets(sid, self)

    def senses(self, lemma: str, pos: str | None = None) -> list[SynsetId]:
        return senses(lemma, pos, self)

    def validate(self, source=None):
        """Check every pointer and index entry refers to a stored synset."""
        orphans = set()
        for syn in self.synsets.values():
            for _, target in syn.pointers:
                if target not in self.synsets:
                    orphans.add(target)
        for ids in self.sense_index.values():
            orphans.update(i for i in ids if i not in self.synsets)
        if orphans:
            listed = ", ".join(str(o) for o in sorted(orphans, key=SynsetId.sort_key))
            raise FormatError(f"dangling synset references: {listed}", source)


def related_synsets(sid: SynsetId, db: LexicalDatabase) -> frozenset[SynsetId]:
    """Targets of all supported pointers of ``sid``, plus ``sid`` itself.

    Only direct neighbours are returned; relations are not followed
    transitively.
    """
    syn = db[sid]
    return frozenset([sid, *(target for _, target in syn.pointers)])


def senses(lemma: str, pos: str | None, db: LexicalDatabase) -> list[SynsetId]:
    """Senses of ``lemma`` in index order; ``[]`` when unknown.

    ``pos="a"`` includes satellites; ``pos="s"`` restricts to them.
    Without ``pos`` the lists are concatenated in n, v, a/s, r order.
    """
    if pos is None:
        out: list[SynsetId] = []
        for p in ("n", "v", "a", "r"):
            out.extend(db.sense_index.get((lemma, p), ()))
        return out
    if pos not in _POS_ORDER:
        raise ValueError(f"invalid part of speech {pos!r}")
    ids = db.sense_index.get((lemma, _index_pos(pos)), [])
    if pos == "s":
        return [i for i in ids if i.pos == "s"]
    return list(ids)


# --------------------------------------------------------------------------
# WNDB


def _clean_lemma(word: str) -> str:
    # adjective syntactic markers: (a), (p), (ip)
    if word.endswith(")") and "(" in word:
        word = word[: word.index("(")]
    return word.lower()


def _definition(gloss: str) -> str:
    definition = gloss.split('"', 1)[0].strip()
    return definition.rstrip(";").strip()


def _parse_data_line(line: str, fname: str, byte_offset: int):
    body, bar, gloss = line.partition(" | ")
    if not bar:
        body, gloss = line.rstrip(" |"), ""
    fields = body.split()
    try:
        offset = int(fields[0])
        ss_type = fields[2]
        w_cnt = int(fields[3], 16)
        words = [_clean_lemma(fields[4 + 2 * i]) for i in range(w_cnt)]
        pos_ptr = 4 + 2 * w_cnt
        p_cnt = int(fields[pos_ptr])
        pointers = []
        for i in range(p_cnt):
            sym, target, tpos, src_tgt = fields[pos_ptr + 1 + 4 * i : pos_ptr + 5 + 4 * i]
            int(src_tgt, 16)
            pointers.append((sym, int(target), tpos, src_tgt))
        if ss_type not in _POS_ORDER or not words:
            raise ValueError
    except (ValueError, IndexError):
        raise FormatError("malformed data record", fname, f"byte {byte_offset}") from None
    return offset, ss_type, words, pointers, _definition(gloss)


def _iter_records(path: Path):
    """Yield ``(byte_offset, text)`` for non-header lines."""
    with open(path, "rb") as fh:
        pos = 0
        for raw in fh:
            start, pos = pos, pos + len(raw)
            if raw.startswith(b"  ") or not raw.strip():
                continue
            yield start, raw.decode("utf-8", errors="replace").rstrip("\r\n")


def load_wndb(directory) -> LexicalDatabase:
    """Load WordNet 3.0 ``data.*`` and ``index.*`` files from ``directory``."""
    directory = Path(directory)
    for stem in ("data", "index"):
        for suffix in _WNDB_FILES.values():
            p = directory / f"{stem}.{suffix}"
            if not p.is_file():
                raise FileNotFoundError(f"missing WordNet file: {p.name} (in {directory})")

    db = LexicalDatabase()
    # (file pos, offset) -> actual id; adjective file holds both 'a' and 's'
    by_offset: dict[tuple[str, int], SynsetId] = {}
    raw_pointers: dict[SynsetId, list] = {}
    for fpos, suffix in _WNDB_FILES.items():
        fname = f"data.{suffix}"
        for byte_offset, line in _iter_records(directory / fname):
            offset, ss_type, words, ptrs, gloss = _parse_data_line(line, fname, byte_offset)
            if _index_pos(ss_type) != fpos:
                raise FormatError(f"synset type {ss_type!r} in {fname}", fname, f"byte {byte_offset}")
            sid = SynsetId(ss_type, offset)
            by_offset[(fpos, offset)] = sid
            db.synsets[sid] = Synset(sid, tuple(dict.fromkeys(words)), gloss)
            raw_pointers[sid] = ptrs

    orphans = []
    for sid, ptrs in raw_pointers.items():
        resolved = []
        for sym, target, tpos, src_tgt in ptrs:
            kind = POINTER_SYMBOLS.get(sym)
            if kind is None or src_tgt != "0000":
                db.dropped_pointers[sym if kind is None else f"{sym}(lexical)"] += 1
                continue
            tid = by_offset.get((_index_pos(tpos), target))
            if tid is None:
                orphans.append(f"{tpos}{target:08d}")
                continue
            resolved.append((kind, tid))
        syn = db.synsets[sid]
        db.synsets[sid] = Synset(sid, syn.lemmas, syn.gloss, tuple(dict.fromkeys(resolved)))
    if orphans:
        raise FormatError(f"dangling pointer targets: {', '.join(sorted(set(orphans)))}", directory)

    for fpos, suffix in _WNDB_FILES.items():
        fname = f"index.{suffix}"
        for byte_offset, line in _iter_records(directory / fname):
            fields = line.split()
            try:
                lemma = fields[0].lower()
                synset_cnt = int(fields[2])
                p_cnt = int(fields[3])
                offsets = [int(f) for f in fields[6 + p_cnt : 6 + p_cnt + synset_cnt]]
                if len(offsets) != synset_cnt:
                    raise ValueError
            except (ValueError, IndexError):
                raise FormatError("malformed index record", fname, f"byte {byte_offset}") from None
            ids = []
            for off in offsets:
                sid = by_offset.get((fpos, off))
                if sid is None:
                    raise FormatError(f"dangling index entry {fpos}{off:08d}", fname, f"byte {byte_offset}")
                ids.append(sid)
            listed = db.sense_index.setdefault((lemma, fpos), [])
            listed.extend(i for i in ids if i not in listed)
    if db.dropped_pointers:
        log.info("dropped %d unsupported pointers", sum(db.dropped_pointers.values()))
    return db


# --------------------------------------------------------------------------
# portable format
#
#   S <id> lemma1,lemma2 | gloss
#   P <id> <relation_kind> <id>
#   I <lemma> <pos> <id> [<id> ...]     optional explicit sense order
#   # comment


def _parse_portable(lines: Iterable[str], source) -> LexicalDatabase:
    synsets: dict[SynsetId, tuple[tuple[str, ...], str]] = {}
    pointers: dict[SynsetId, list] = {}
    pointer_lines: list[tuple[int, SynsetId, RelationKind, SynsetId]] = []
    explicit: dict[tuple[str, str], list[SynsetId]] = {}
    explicit_lines: list[tuple[int, list[SynsetId]]] = []

    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        tag, _, rest = line.partition(" ")
        try:
            if tag == "S":
                head, bar, gloss = rest.partition(" | ")
                if not bar:
                    head, gloss = rest.rstrip().removesuffix(" |"), ""
                sid_text, lemma_text = head.split()
                sid = SynsetId.parse(sid_text)
                lemmas = tuple(lemma_text.split(","))
                if sid in synsets:
                    raise ValueError(f"duplicate synset {sid}")
                if not all(lemmas):
                    raise ValueError("empty lemma")
                synsets[sid] = (lemmas, gloss.strip())
            elif tag == "P":
                src, kind, dst = rest.split()
                pointer_lines.append((lineno, SynsetId.parse(src), RelationKind(kind), SynsetId.parse(dst)))
            elif tag == "I":
                lemma, pos, *ids = rest.split()
                if pos not in ("n", "v", "a", "r") or not ids:
                    raise ValueError("bad index line")
                parsed = [SynsetId.parse(i) for i in ids]
                explicit[(lemma, pos)] = parsed
                explicit_lines.append((lineno, parsed))
            else:
                raise ValueError(f"unknown record tag {tag!r}")
        except ValueError as exc:
            raise FormatError(f"syntax error: {exc}", source, lineno) from None

    for lineno, src, kind, dst in pointer_lines:
        for sid in (src, dst):
            if sid not in synsets:
                raise FormatError(f"pointer references undefined synset {sid}", source, lineno)
        pointers.setdefault(src, []).append((kind, dst))
    for lineno, ids in explicit_lines:
        for sid in ids:
            if sid not in synsets:
                raise FormatError(f"index references undefined synset {sid}", source, lineno)

    db = LexicalDatabase()
    for sid, (lemmas, gloss) in synsets.items():
        db.synsets[sid] = Synset(sid, lemmas, gloss, tuple(dict.fromkeys(pointers.get(sid, ()))))
        for lemma in lemmas:
            key = (lemma, _index_pos(sid.pos))
            if key not in explicit:
                db.sense_index.setdefault(key, []).append(sid)
    db.sense_index.update({k: list(v) for k, v in explicit.items()})
    return db


def load_portable(path) -> LexicalDatabase:
    with open(path, encoding="utf-8") as fh:
        return _parse_portable(fh, os.fspath(path))


def loads_portable(text: str, source="<string>") -> LexicalDatabase:
    return _parse_portable(io.StringIO(text), source)


def dumps_portable(db: LexicalDatabase) -> str:
    """Serialize deterministically: synsets, pointers, then sense order."""
    out = []
    ordered = sorted(db.synsets, key=SynsetId.sort_key)
    for sid in ordered:
        syn = db.synsets[sid]
        for lemma in syn.lemmas:
            if "," in lemma or any(c.isspace() for c in lemma):
                raise LexChainsError(f"lemma {lemma!r} of {sid} cannot be written in portable format")
        gloss = " ".join(syn.gloss.split())
        out.append(f"S {sid} {','.join(syn.lemmas)} | {gloss}".rstrip())
    for sid in ordered:
        for kind, target in db.synsets[sid].pointers:
            out.append(f"P {sid} {kind.value} {target}")
    for (lemma, pos), ids in sorted(db.sense_index.items()):
        out.append(f"I {lemma} {pos} {' '.join(str(i) for i in ids)}")
    return "\n".join(out) + ("\n" if out else "")


def save_portable(db: LexicalDatabase, path) -> None:
    Path(path).write_text(dumps_portable(db), encoding="utf-8")


def load_database(path) -> LexicalDatabase:
    """Load a WNDB directory or a portable-format file."""
    p = Path(path)
    if p.is_dir():
        return load_wndb(p)
    return load_portable(p)
