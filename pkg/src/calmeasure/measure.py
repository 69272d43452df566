"""Interval-supremum calibration measures.

For scores ``f`` and labels ``y`` the empirical measure is

    c_emp = (1/n) sup_{p1 < p2} | sum_i 1{p1 < f_i <= p2} (y_i - f_i) |

Only distinct score values matter as interval endpoints, so after pooling
ties the supremum is a range of a prefix-sum sequence: the largest
``|P_j - P_i|`` over ``i < j`` is simply ``max(P) - min(P)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DiscreteDistribution, ScoredDataset, group_by_score
from .errors import EmptyDataset, EmptyInput, LengthMismatch

__all__ = [
    "WorstInterval",
    "CalibrationReport",
    "TrueCalibrationReport",
    "empirical_calibration",
    "empirical_calibration_bruteforce",
    "true_calibration",
    "l1_empirical",
]


@dataclass(frozen=True)
class WorstInterval:
    """The interval ``(p1, p2]`` realizing the supremum.

    ``deviation`` is signed: positive means more label-1 mass than predicted
    (under-confident), negative means over-confident. ``p1`` may be ``-inf``.
    """

    p1: float
    p2: float
    deviation: float

    def to_json(self) -> dict:
        p1 = "-inf" if self.p1 == -math.inf else self.p1
        return {"p1": p1, "p2": self.p2, "deviation": self.deviation}


@dataclass(frozen=True)
class CalibrationReport:
    c_emp: float
    worst_interval: WorstInterval
    n: int

    def to_json(self) -> dict:
        return {
            "c_emp": self.c_emp,
            "n": self.n,
            "worst_interval": self.worst_interval.to_json(),
        }


@dataclass(frozen=True)
class TrueCalibrationReport:
    c: float
    worst_interval: WorstInterval

    def to_json(self) -> dict:
        return {"c": self.c, "worst_interval": self.worst_interval.to_json()}


def _prefix_range(points: np.ndarray, deltas: np.ndarray) -> tuple[float, WorstInterval]:
    """Largest |P_j - P_i| over i < j, where P is the prefix sum of ``deltas``.

    Ties between equally extreme prefixes resolve to the smallest ``p1`` and
    then the smallest ``p2``.
    """
    prefix = np.concatenate(([0.0], np.cumsum(deltas)))
    lo = int(np.argmin(prefix))
    hi = int(np.argmax(prefix))
    spread = float(prefix[hi] - prefix[lo])
    if spread == 0.0:
        return 0.0, WorstInterval(-math.inf, float(points[0]), 0.0)
    i, j = min(lo, hi), max(lo, hi)
    p1 = -math.inf if i == 0 else float(points[i - 1])
    return spread, WorstInterval(p1, float(points[j - 1]), float(prefix[j] - prefix[i]))


def empirical_calibration(dataset: ScoredDataset) -> CalibrationReport:
    """Exact ``c_emp`` in O(n log n) via pooled prefix sums."""
    if dataset.n == 0:
        raise EmptyDataset("dataset has no samples")
    g = group_by_score(dataset)
    d = g.positives - g.counts * g.scores
    spread, worst = _prefix_range(g.scores, d)
    n = dataset.n
    return CalibrationReport(spread / n, worst, n)


def empirical_calibration_bruteforce(dataset: ScoredDataset) -> CalibrationReport:
    """Reference ``c_emp`` evaluating every candidate interval directly.

    Builds the full table of interval sums over raw (unpooled) samples for
    every ``p1`` in ``{-inf} U scores`` and ``p2`` in scores. Pairs with
    ``p1 >= p2`` select nothing and contribute zero, which also covers the
    empty interval. O(m^2 n) time; meant for n up to a few thousand.
    """
    if dataset.n == 0:
        raise EmptyDataset("dataset has no samples")
    s = dataset.scores
    w = dataset.labels - s
    distinct = np.unique(s)
    lower = np.concatenate(([-np.inf], distinct))
    above = (s[None, :] > lower[:, None]) * w[None, :]
    below = (s[None, :] <= distinct[:, None]).astype(float)
    table = above @ below.T
    flat = int(np.argmax(np.abs(table)))
    r, c = divmod(flat, table.shape[1])
    best = float(abs(table[r, c]))
    n = dataset.n
    if best == 0.0:
        return CalibrationReport(0.0, WorstInterval(-math.inf, float(distinct[0]), 0.0), n)
    worst = WorstInterval(float(lower[r]), float(distinct[c]), float(table[r, c]))
    return CalibrationReport(best / n, worst, n)


def true_calibration(dist: DiscreteDistribution) -> TrueCalibrationReport:
    """Population measure ``c(f)`` of a finite distribution."""
    dist.validate()
    d = dist.masses * (dist.positive_rates - dist.f_values)
    spread, worst = _prefix_range(dist.f_values, d)
    return TrueCalibrationReport(spread, worst)


def l1_empirical(scores, true_probs) -> float:
    """Mean absolute gap between estimates and true conditional probabilities."""
    a = np.asarray(scores, dtype=float)
    b = np.asarray(true_probs, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"{a.size} scores but {b.size} true probabilities")
    if a.size == 0:
        raise EmptyInput("no samples")
    return float(np.mean(np.abs(a - b)))
