"""Synthetic LDA corpus with exactly known conditional label probabilities.

Each document draws a topic mixture ``theta ~ Dirichlet(1, ..., 1)`` and a
bag of words from it. Its label is 1 when the target topic shows up among
``labels_per_doc`` topics drawn i.i.d. from ``theta``, so

    P(Y = 1 | theta) = 1 - (1 - theta[target]) ** labels_per_doc

is available in closed form for every document.
"""

from __future__ import annotations

import io
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import EmptyCorpus, InvalidConfig, IoFailure, ParseError
from .ioutil import atomic_write_text, fmt_float

__all__ = [
    "LdaConfig",
    "LdaDocument",
    "LdaCorpus",
    "topic_word_matrix",
    "generate_corpus",
    "corpus_baselines",
    "export_corpus",
    "import_corpus",
]

_TOPIC_STREAM = 0
_DOC_STREAM = 1


@dataclass(frozen=True)
class LdaConfig:
    num_docs: int = 20000
    num_topics: int = 20
    vocab_size: int = 1000
    avg_doc_len: float = 200.0
    labels_per_doc: int = 10
    target_topic: int = 0
    power_law_exponent: float = 1.0
    seed: int = 0xC0FFEE

    def validate(self) -> None:
        for name in ("num_docs", "num_topics", "vocab_size", "labels_per_doc"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise InvalidConfig(f"{name} must be a positive integer, got {v!r}")
        if not (math.isfinite(self.avg_doc_len) and self.avg_doc_len > 0):
            raise InvalidConfig("avg_doc_len must be positive")
        if not (math.isfinite(self.power_law_exponent) and self.power_law_exponent > 0):
            raise InvalidConfig("power_law_exponent must be positive")
        if not (0 <= self.target_topic < self.num_topics):
            raise InvalidConfig(
                f"target_topic {self.target_topic} outside [0, {self.num_topics})"
            )


@dataclass(eq=False)
class LdaDocument:
    word_ids: np.ndarray
    word_counts: np.ndarray
    theta: np.ndarray | None
    true_prob: float
    label: int

    @property
    def length(self) -> int:
        return int(self.word_counts.sum())

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.word_ids.tolist(), self.word_counts.tolist()))


@dataclass(eq=False)
class LdaCorpus:
    config: LdaConfig
    topic_word: np.ndarray | None
    documents: list[LdaDocument] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.documents)

    @property
    def labels(self) -> np.ndarray:
        return np.array([d.label for d in self.documents], dtype=np.int64)

    @property
    def true_probs(self) -> np.ndarray:
        return np.array([d.true_prob for d in self.documents])

    def count_matrix(self) -> sparse.csr_matrix:
        """Documents x vocabulary word-count matrix."""
        indptr = np.zeros(len(self.documents) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([d.word_ids.size for d in self.documents])
        if self.documents:
            indices = np.concatenate([d.word_ids for d in self.documents])
            data = np.concatenate([d.word_counts for d in self.documents]).astype(float)
        else:
            indices = np.zeros(0, dtype=np.int64)
            data = np.zeros(0)
        shape = (len(self.documents), self.config.vocab_size)
        return sparse.csr_matrix((data, indices, indptr), shape=shape)


def topic_word_matrix(config: LdaConfig) -> np.ndarray:
    """Per-topic Zipf-like word laws, each over its own random word order."""
    rng = np.random.default_rng([config.seed, _TOPIC_STREAM])
    ranks = np.arange(1, config.vocab_size + 1, dtype=float)
    weights = ranks ** (-config.power_law_exponent)
    weights /= weights.sum()
    out = np.empty((config.num_topics, config.vocab_size))
    for k in range(config.num_topics):
        out[k, rng.permutation(config.vocab_size)] = weights
    return out


def _document(config: LdaConfig, topic_word: np.ndarray, index: int) -> LdaDocument:
    rng = np.random.default_rng([config.seed, _DOC_STREAM, index])
    e = rng.standard_exponential(config.num_topics)
    theta = e / e.sum()
    length = max(1, int(rng.poisson(config.avg_doc_len)))
    # Each word picks a topic from theta and then a word from that topic; the
    # resulting per-word law is the mixture theta @ topic_word.
    word_law = theta @ topic_word
    counts = rng.multinomial(length, word_law / word_law.sum())
    ids = np.flatnonzero(counts)
    drawn = rng.multinomial(config.labels_per_doc, theta)
    label = int(drawn[config.target_topic] > 0)
    true_prob = 1.0 - (1.0 - theta[config.target_topic]) ** config.labels_per_doc
    return LdaDocument(ids, counts[ids], theta, float(true_prob), label)


def generate_corpus(config: LdaConfig | None = None) -> LdaCorpus:
    """Generate a corpus; each document has its own ``(seed, index)`` stream."""
    config = config or LdaConfig()
    config.validate()
    topic_word = topic_word_matrix(config)
    docs = [_document(config, topic_word, i) for i in range(config.num_docs)]
    return LdaCorpus(config, topic_word, docs)


def corpus_baselines(corpus: LdaCorpus) -> tuple[float, float]:
    """Label frequency and the l1 error of always predicting it."""
    if len(corpus) == 0:
        raise EmptyCorpus("corpus has no documents")
    freq = float(corpus.labels.mean())
    trivial = float(np.mean(np.abs(freq - corpus.true_probs)))
    return freq, trivial


def export_corpus(corpus: LdaCorpus, path: str | os.PathLike) -> None:
    """Write ``label true_prob word:count ...`` lines after a ``#`` config header."""
    buf = io.StringIO()
    buf.write("# lda-corpus " + json.dumps(asdict(corpus.config), sort_keys=True) + "\n")
    for d in corpus.documents:
        pairs = " ".join(f"{w}:{c}" for w, c in zip(d.word_ids.tolist(), d.word_counts.tolist()))
        buf.write(f"{d.label} {fmt_float(d.true_prob)} {pairs}\n")
    try:
        atomic_write_text(path, buf.getvalue())
    except OSError as exc:
        raise IoFailure(f"cannot write corpus to {path}: {exc}") from exc


def import_corpus(path: str | os.PathLike) -> LdaCorpus:
    """Read a corpus written by :func:`export_corpus` (no topic mixtures)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read corpus {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# lda-corpus "):
        raise ParseError("missing '# lda-corpus' header", 1)
    try:
        raw = json.loads(lines[0][len("# lda-corpus "):])
        known = {f.name for f in fields(LdaConfig)}
        config = LdaConfig(**{k: v for k, v in raw.items() if k in known})
    except (ValueError, TypeError) as exc:
        raise ParseError(f"bad config header: {exc}", 1) from exc
    docs = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        try:
            label = int(parts[0])
            true_prob = float(parts[1])
            pairs = [p.split(":") for p in parts[2:]]
            ids = np.array([int(w) for w, _ in pairs], dtype=np.int64)
            counts = np.array([int(c) for _, c in pairs], dtype=np.int64)
        except (ValueError, IndexError) as exc:
            raise ParseError(f"malformed document line: {exc}", lineno) from exc
        if label not in (0, 1) or not (0.0 <= true_prob <= 1.0):
            raise ParseError("label must be 0/1 and true_prob in [0, 1]", lineno)
        if ids.size and (ids.min() < 0 or ids.max() >= config.vocab_size):
            raise ParseError("word index outside the vocabulary", lineno)
        docs.append(LdaDocument(ids, counts, None, true_prob, label))
    return LdaCorpus(config, None, docs)
