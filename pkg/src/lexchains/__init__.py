"""Lexical chains over synset-annotated text: flexible and fixed chain
construction, sense annotation, synset embeddings and a document
classification harness."""

from lexchains.errors import FormatError, LexChainsError, LookupFailure

__version__ = "0.1.0"

__all__ = ["FormatError", "LexChainsError", "LookupFailure", "__version__"]
