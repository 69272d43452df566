"""Scored, labeled samples and the tie-pooled view every algorithm runs on."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import (
    EmptyDataset,
    InvalidDistribution,
    InvalidLabel,
    LengthMismatch,
    MixedLabelConvention,
    ScoreOutOfRange,
)

__all__ = [
    "LabeledScore",
    "ScoredDataset",
    "ScoreGroup",
    "SortedGroups",
    "DiscreteDistribution",
    "canonicalize_labels",
    "validate_scores",
    "group_by_score",
    "sample_dataset",
]


class LabeledScore(NamedTuple):
    score: float
    label: int


def canonicalize_labels(raw_labels: Iterable[float]) -> list[int]:
    """Map labels written as {0, 1} or {-1, +1} onto {0, 1}.

    The two conventions may not be mixed: an input containing both -1 and 0
    is ambiguous and raises :class:`MixedLabelConvention`.

    >>> canonicalize_labels([-1, 1, 1])
    [0, 1, 1]
    """
    raw = list(raw_labels)
    seen = set()
    for value in raw:
        if isinstance(value, bool):
            value = int(value)
        try:
            ok = value in (-1, 0, 1)
        except TypeError:
            ok = False
        if not ok:
            raise InvalidLabel(f"label {value!r} is not one of -1, 0, 1")
        seen.add(int(value))
    if -1 in seen and 0 in seen:
        raise MixedLabelConvention("labels mix the {0,1} and {-1,1} conventions")
    return [1 if int(v) == 1 else 0 for v in raw]


def validate_scores(scores: Sequence[float] | np.ndarray) -> np.ndarray:
    """Return ``scores`` as a float array, rejecting anything outside [0, 1]."""
    arr = np.asarray(scores, dtype=float)
    if arr.ndim != 1:
        raise ScoreOutOfRange("scores must be a flat sequence")
    bad = ~np.isfinite(arr) | (arr < 0.0) | (arr > 1.0)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ScoreOutOfRange(f"score at index {i} is {arr[i]!r}, outside [0, 1]")
    return arr


@dataclass(frozen=True, eq=False)
class ScoredDataset:
    """Classifier outputs ``f(X_i)`` paired with canonical labels ``Y_i``.

    Stored column-wise as read-only numpy arrays. Construct through
    :meth:`from_arrays` (or :meth:`from_pairs`) to get validation and label
    canonicalization.
    """

    scores: np.ndarray
    labels: np.ndarray

    @classmethod
    def from_arrays(cls, scores, labels) -> "ScoredDataset":
        s = validate_scores(scores)
        raw = np.asarray(labels).ravel().tolist()
        if len(raw) != len(s):
            raise LengthMismatch(f"{len(s)} scores but {len(raw)} labels")
        y = np.asarray(canonicalize_labels(raw), dtype=np.int64)
        s = s.copy()
        s.setflags(write=False)
        y.setflags(write=False)
        return cls(s, y)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "ScoredDataset":
        pairs = list(pairs)
        return cls.from_arrays([p[0] for p in pairs], [p[1] for p in pairs])

    @property
    def n(self) -> int:
        return int(self.scores.shape[0])

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[LabeledScore]:
        for s, y in zip(self.scores.tolist(), self.labels.tolist()):
            yield LabeledScore(s, y)

    @property
    def samples(self) -> list[LabeledScore]:
        return list(self)

    def with_scores(self, scores) -> "ScoredDataset":
        """Same labels, new scores (e.g. after recalibration)."""
        return ScoredDataset.from_arrays(scores, self.labels)


class ScoreGroup(NamedTuple):
    score: float
    count: int
    positives: int


@dataclass(frozen=True, eq=False)
class SortedGroups:
    """Distinct scores in strictly ascending order with pooled counts."""

    scores: np.ndarray
    counts: np.ndarray
    positives: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def groups(self) -> list[ScoreGroup]:
        return [
            ScoreGroup(s, c, p)
            for s, c, p in zip(
                self.scores.tolist(), self.counts.tolist(), self.positives.tolist()
            )
        ]

    def __len__(self) -> int:
        return int(self.scores.shape[0])


def group_by_score(dataset: ScoredDataset) -> SortedGroups:
    """Pool samples with bit-identical scores.

    Ties are exact float equality, never an epsilon: intervals ``(p1, p2]``
    over scores select whole groups, and any tolerance would change which
    intervals exist.
    """
    if dataset.n == 0:
        raise EmptyDataset("dataset has no samples")
    order = np.argsort(dataset.scores, kind="stable")
    s = dataset.scores[order]
    y = dataset.labels[order]
    starts = np.flatnonzero(np.concatenate(([True], s[1:] != s[:-1])))
    counts = np.diff(np.append(starts, s.shape[0]))
    positives = np.add.reduceat(y, starts)
    return SortedGroups(s[starts].copy(), counts.astype(np.int64), positives.astype(np.int64))


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """A finite joint law of (f(X), Y).

    Each atom is a region of feature space on which the classifier outputs
    ``f_value``; it has probability ``mass`` and ``P(Y=1 | region) =
    positive_rate``.
    """

    f_values: np.ndarray
    masses: np.ndarray
    positive_rates: np.ndarray

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple[float, float, float]]) -> "DiscreteDistribution":
        atoms = list(atoms)
        if not atoms:
            raise InvalidDistribution("distribution has no atoms")
        f, m, r = (np.array(col, dtype=float) for col in zip(*atoms))
        dist = cls(f, m, r)
        dist.validate()
        return dist

    def validate(self) -> None:
        f, m, r = self.f_values, self.masses, self.positive_rates
        if not (f.shape == m.shape == r.shape) or f.ndim != 1 or f.size == 0:
            raise InvalidDistribution("atom columns must be equal-length, nonempty")
        for name, col in (("f_value", f), ("mass", m), ("positive_rate", r)):
            if not np.all(np.isfinite(col)):
                raise InvalidDistribution(f"non-finite {name}")
        if np.any((f < 0) | (f > 1)):
            raise InvalidDistribution("f_value outside [0, 1]")
        if np.any((r < 0) | (r > 1)):
            raise InvalidDistribution("positive_rate outside [0, 1]")
        if np.any((m <= 0) | (m > 1)):
            raise InvalidDistribution("mass outside (0, 1]")
        if abs(math.fsum(m.tolist()) - 1.0) > 1e-12:
            raise InvalidDistribution(f"masses sum to {math.fsum(m.tolist())!r}, not 1")
        if np.any(np.diff(f) <= 0):
            raise InvalidDistribution("f_values must be strictly ascending")

    @property
    def atoms(self) -> list[tuple[float, float, float]]:
        return list(
            zip(self.f_values.tolist(), self.masses.tolist(), self.positive_rates.tolist())
        )

    @property
    def positive_probability(self) -> float:
        return float(np.dot(self.masses, self.positive_rates))


def sample_dataset(dist: DiscreteDistribution, n: int, seed: int) -> ScoredDataset:
    """Draw ``n`` i.i.d. samples: atom by mass, then a Bernoulli label.

    The whole draw comes from one generator seeded by ``seed``; the result
    does not depend on threading.
    """
    dist.validate()
    if n < 1:
        raise EmptyDataset("n must be at least 1")
    rng = np.random.default_rng(seed)
    p = dist.masses / dist.masses.sum()
    idx = rng.choice(dist.f_values.shape[0], size=n, p=p)
    labels = (rng.random(n) < dist.positive_rates[idx]).astype(np.int64)
    return ScoredDataset.from_arrays(dist.f_values[idx], labels)
