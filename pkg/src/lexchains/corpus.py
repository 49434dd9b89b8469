"""Annotated tokens and the line-oriented corpus files shared by all stages.

Every corpus file holds one document per line, tokens separated by single
spaces, with an optional ``label<TAB>`` prefix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from lexchains.errors import FormatError
from lexchains.wordnet import SynsetId


@dataclass(frozen=True)
class AnnotatedToken:
    word: str
    synset: SynsetId

    def render(self) -> str:
        return f"{self.word}#{self.synset.offset8}#{self.synset.pos}"

    __str__ = render

    @classmethod
    def parse(cls, text: str) -> "AnnotatedToken":
        word, sep1, rest = text.rpartition("#")
        # rest is pos; split the offset off the word part
        word, sep2, offset = word.rpartition("#")
        if not (sep1 and sep2 and word) or len(offset) != 8 or not offset.isdigit():
            raise ValueError(f"malformed annotated token {text!r}")
        return cls(word, SynsetId(rest, int(offset)))


def render(word: str, synset: SynsetId) -> str:
    return f"{word}#{synset.offset8}#{synset.pos}"


@dataclass
class AnnotatedDocument:
    tokens: list[AnnotatedToken] = field(default_factory=list)
    label: str | None = None

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def rendered(self) -> list[str]:
        return [t.render() for t in self.tokens]


@dataclass
class Document:
    """A document as plain string tokens (or raw text), optionally labeled."""

    tokens: list[str]
    label: str | None = None


def _split_label(line: str) -> tuple[str | None, str]:
    if "\t" in line:
        label, _, body = line.partition("\t")
        return label, body
    return None, line


def iter_lines(path) -> Iterator[tuple[int, str | None, str]]:
    """Yield ``(line_number, label, body)`` for each line of a corpus file."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            label, body = _split_label(line)
            yield lineno, label, body


def read_raw_corpus(path) -> list[Document]:
    """Documents whose body is raw text (``tokens`` holds one string)."""
    return [Document([body], label) for _, label, body in iter_lines(path)]


def read_token_corpus(path) -> list[Document]:
    return [Document(body.split(), label) for _, label, body in iter_lines(path)]


def read_annotated_corpus(path) -> list[AnnotatedDocument]:
    docs = []
    for lineno, label, body in iter_lines(path):
        try:
            tokens = [AnnotatedToken.parse(t) for t in body.split()]
        except ValueError as exc:
            raise FormatError(str(exc), str(path), lineno) from None
        docs.append(AnnotatedDocument(tokens, label))
    return docs


def format_line(tokens: Iterable[str], label: str | None) -> str:
    body = " ".join(tokens)
    if label is not None:
        if "\t" in label or "\n" in label:
            raise ValueError(f"label {label!r} contains a tab or newline")
        return f"{label}\t{body}"
    return body


def write_corpus(docs, path) -> None:
    """Write ``Document`` or ``AnnotatedDocument`` items, one per line."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            if isinstance(doc, AnnotatedDocument):
                tokens = doc.rendered()
            else:
                tokens = doc.tokens
            fh.write(format_line(tokens, doc.label) + "\n")
