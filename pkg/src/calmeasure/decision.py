"""Cost-sensitive decisions from probability estimates.

A false positive costs ``a`` and a false negative costs ``b``. With
calibrated estimates the loss-minimizing rule predicts 1 exactly when the
estimate is at least ``a / (a + b)``; every function here uses that closed
(``>=``) threshold rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Sequence

import numpy as np

from .core import DiscreteDistribution, ScoredDataset
from .errors import EmptyDataset, InvalidArguments, InvalidCosts, PreLossZero
from .pav import calibrate

__all__ = [
    "CostPair",
    "LossSummary",
    "bayes_threshold",
    "empirical_loss",
    "expected_loss_on_distribution",
    "loss_ratio_experiment",
    "default_p_grid",
]


@dataclass(frozen=True)
class CostPair:
    false_positive_cost: float
    false_negative_cost: float

    def __post_init__(self):
        for name in ("false_positive_cost", "false_negative_cost"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidCosts(f"{name} must be finite and positive, got {v!r}")

    @classmethod
    def for_level(cls, p: float) -> "CostPair":
        """Costs ``(p, 1 - p)``, whose Bayes threshold is ``p`` itself."""
        return cls(p, 1.0 - p)

    @property
    def a(self) -> float:
        return self.false_positive_cost

    @property
    def b(self) -> float:
        return self.false_negative_cost


@dataclass(frozen=True)
class LossSummary:
    threshold: float
    total_loss: float
    mean_loss: float
    fp: int
    fn: int

    def to_json(self) -> dict:
        return asdict(self)


def bayes_threshold(costs: CostPair) -> float:
    return costs.a / (costs.a + costs.b)


def _check_threshold(threshold: float) -> None:
    if not (0.0 <= threshold <= 1.0):
        raise InvalidArguments(f"threshold {threshold!r} outside [0, 1]")


def empirical_loss(dataset: ScoredDataset, threshold: float, costs: CostPair) -> LossSummary:
    if dataset.n == 0:
        raise EmptyDataset("dataset has no samples")
    _check_threshold(threshold)
    predict = dataset.scores >= threshold
    positive = dataset.labels == 1
    fp = int(np.count_nonzero(predict & ~positive))
    fn = int(np.count_nonzero(~predict & positive))
    total = costs.a * fp + costs.b * fn
    return LossSummary(float(threshold), total, total / dataset.n, fp, fn)


def expected_loss_on_distribution(
    dist: DiscreteDistribution, threshold: float, costs: CostPair
) -> float:
    dist.validate()
    predict = dist.f_values >= threshold
    r = dist.positive_rates
    per_atom = np.where(predict, costs.a * (1.0 - r), costs.b * r)
    return float(np.dot(dist.masses, per_atom))


def default_p_grid() -> list[float]:
    return [k / 10 for k in range(1, 10)]


def loss_ratio_experiment(
    train: ScoredDataset | None,
    validation: ScoredDataset,
    test: ScoredDataset,
    p_grid: Sequence[float] | None = None,
) -> list[tuple[float, float]]:
    """Average test loss after / before isotonic recalibration, per level ``p``.

    The link is fit on ``validation`` and applied to ``test``. At level ``p``
    a false positive costs ``p``, a false negative ``1 - p``, and both score
    sets are thresholded at ``p``. ``train`` only documents where the base
    scores came from; it does not enter the computation.
    """
    if validation.n == 0 or test.n == 0:
        raise EmptyDataset("validation and test sets must be nonempty")
    if train is not None and train.n == 0:
        raise EmptyDataset("training set is empty")
    grid = default_p_grid() if p_grid is None else list(p_grid)
    for p in grid:
        if not (0.0 < p < 1.0):
            raise InvalidArguments(f"level {p!r} must lie in (0, 1)")
    link = calibrate(validation)
    calibrated = test.with_scores(link(test.scores))
    out = []
    for p in grid:
        costs = CostPair.for_level(p)
        before = empirical_loss(test, p, costs).mean_loss
        after = empirical_loss(calibrated, p, costs).mean_loss
        if before == 0.0:
            if after != 0.0:
                raise PreLossZero(f"loss before calibration is 0 at p={p!r} but {after!r} after")
            out.append((p, 1.0))
        else:
            out.append((p, after / before))
    return out
