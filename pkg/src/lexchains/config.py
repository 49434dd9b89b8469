"""Pipeline configuration, stored as JSON."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from lexchains.embeddings import TrainConfig
from lexchains.errors import LexChainsError

WORDNET_ENV = "LEXCHAINS_WORDNET"


@dataclass
class PipelineConfig:
    corpus: str
    words: str
    wordnet: str | None = None
    synset_model: str | None = None
    out_dir: str = "pipeline-out"
    mode: str = "fixed"
    chunk_size: int | None = 2
    passes: int = 0
    train: TrainConfig = field(default_factory=TrainConfig)
    classifier: str = "knn"
    classifier_params: dict = field(default_factory=dict)
    folds: int = 10
    seed: int = 0
    workers: int = 1
    name: str = "corpus"

    def __post_init__(self):
        if isinstance(self.train, dict):
            self.train = TrainConfig(**self.train)
        if self.wordnet is None:
            self.wordnet = os.environ.get(WORDNET_ENV)

    def validate(self) -> None:
        """Check the configuration before any stage runs."""
        problems = []
        for name in ("corpus", "words", "wordnet"):
            value = getattr(self, name)
            if value is None:
                problems.append(f"{name}: not set")
            elif not Path(value).exists():
                problems.append(f"{name}: {value} does not exist")
        if self.synset_model is not None and not Path(self.synset_model).exists():
            problems.append(f"synset_model: {self.synset_model} does not exist")
        if self.mode not in ("fixed", "flexible"):
            problems.append(f"mode: unknown mode {self.mode!r}")
        if self.mode == "fixed" and (self.chunk_size is None or self.chunk_size < 1):
            problems.append("chunk_size: fixed mode needs a positive chunk size")
        if self.passes < 0:
            problems.append("passes: must be >= 0")
        if self.folds < 2:
            problems.append("folds: must be >= 2")
        if problems:
            raise LexChainsError("invalid pipeline configuration:\n  " + "\n  ".join(problems))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def loads(cls, text: str) -> "PipelineConfig":
        data = json.loads(text)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise LexChainsError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        return cls.loads(Path(path).read_text(encoding="utf-8"))
