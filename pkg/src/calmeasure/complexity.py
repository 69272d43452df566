"""Rademacher quantities behind the uniform-convergence guarantee.

For a single fuzzy classifier ``f`` the interval-threshold class is
``H = {x -> 1{p1 < f(x) <= p2}}``. Two derived classes weight the indicator
by the label (``H1``) or by the score itself (``H2``). For a fixed sign
vector the supremum over intervals is a maximum-subarray problem on the
tie-pooled weights, solved in one prefix-sum sweep.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy.special import expit

from .core import ScoredDataset
from .errors import (
    DimensionMismatch,
    EmptyDataset,
    InvalidArguments,
    InvalidDelta,
    RankDeficient,
)

__all__ = [
    "VARIANTS",
    "RademacherEstimate",
    "SvmWitness",
    "interval_sup",
    "estimate_interval_rademacher",
    "svm_witness",
    "theorem2_epsilon",
    "finite_output_bound",
]

VARIANTS = ("H", "H1", "H2")
EXACT_MAX_N = 20
_CHUNK = 4096


@dataclass(frozen=True)
class RademacherEstimate:
    mean: float
    std_error: float
    num_sigma: int
    class_variant: str
    exact: bool

    def to_json(self) -> dict:
        return asdict(self)


def interval_sup(weights: np.ndarray) -> np.ndarray:
    """Largest sum over a contiguous run of columns, floored at 0 (empty run).

    ``weights`` has shape ``(k, m)``; returns one value per row. Equivalent
    to ``max_{i <= j} (P_j - P_i)`` for the row prefix sums ``P``.
    """
    w = np.atleast_2d(weights)
    prefix = np.concatenate((np.zeros((w.shape[0], 1)), np.cumsum(w, axis=1)), axis=1)
    running_min = np.minimum.accumulate(prefix, axis=1)
    return np.max(prefix - running_min, axis=1)


def _base_weights(dataset: ScoredDataset, variant: str) -> np.ndarray:
    if variant == "H":
        return np.ones(dataset.n)
    if variant == "H1":
        return dataset.labels.astype(float)
    if variant == "H2":
        return dataset.scores.astype(float)
    raise InvalidArguments(f"variant must be one of {VARIANTS}, got {variant!r}")


def _pooling(dataset: ScoredDataset) -> tuple[np.ndarray, np.ndarray]:
    """Sample order by score and the start offset of each tie group."""
    order = np.argsort(dataset.scores, kind="stable")
    s = dataset.scores[order]
    starts = np.flatnonzero(np.concatenate(([True], s[1:] != s[:-1])))
    return order, starts


def _sups(signs: np.ndarray, base: np.ndarray, order: np.ndarray, starts: np.ndarray) -> np.ndarray:
    """Per-row supremum for a block of sign vectors (rows)."""
    contrib = signs[:, order] * base[order][None, :]
    return interval_sup(np.add.reduceat(contrib, starts, axis=1))


def _all_signs(n: int) -> np.ndarray:
    return np.array(list(itertools.product((1.0, -1.0), repeat=n)))


def estimate_interval_rademacher(
    dataset: ScoredDataset, variant: str = "H", num_sigma: int = 1000, seed: int = 0
) -> RademacherEstimate:
    """Empirical Rademacher complexity of H, H1 or H2 on ``dataset``.

    Exact when ``n <= 20`` and ``num_sigma >= 2**n``: all sign vectors are
    enumerated. Otherwise Monte Carlo; sign vectors are drawn in fixed-size
    chunks, chunk ``c`` from a generator keyed on ``(seed, c)``, so results
    do not depend on how chunks are scheduled.
    """
    if dataset.n == 0:
        raise EmptyDataset("dataset has no samples")
    if num_sigma < 1:
        raise InvalidArguments("num_sigma must be at least 1")
    n = dataset.n
    base = _base_weights(dataset, variant)
    order, starts = _pooling(dataset)

    if n <= EXACT_MAX_N and num_sigma >= 2**n:
        total = 0.0
        # enumerate in slabs so n = 20 stays within memory
        head = max(0, n - 12)
        tail_signs = _all_signs(n - head)
        for prefix in itertools.product((1.0, -1.0), repeat=head):
            block = np.hstack((np.tile(prefix, (tail_signs.shape[0], 1)), tail_signs))
            total += math.fsum(_sups(block, base, order, starts).tolist())
        mean = total / 2**n / n
        return RademacherEstimate(mean, 0.0, 2**n, variant, True)

    values = []
    for c, start in enumerate(range(0, num_sigma, _CHUNK)):
        k = min(_CHUNK, num_sigma - start)
        rng = np.random.default_rng([seed, c])
        signs = rng.integers(0, 2, size=(k, n)) * 2.0 - 1.0
        values.append(_sups(signs, base, order, starts) / n)
    vals = np.concatenate(values)
    se = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
    return RademacherEstimate(float(vals.mean()), se, num_sigma, variant, False)


@dataclass(frozen=True)
class SvmWitness:
    sigma: np.ndarray
    weights: np.ndarray
    lam: float
    achieved: float
    target: int
    tolerance: float

    def to_json(self) -> dict:
        return {
            "sigma": self.sigma.tolist(),
            "weights": self.weights.tolist(),
            "lambda": self.lam,
            "achieved": self.achieved,
            "target": self.target,
            "tolerance": self.tolerance,
        }


def svm_witness(X, sigma, lambda_magnitude: float = 50.0, norm_bound: float = 1.0) -> SvmWitness:
    """Sigmoid-of-linear classifier whose outputs correlate with ``sigma``.

    Solves ``w . X_i = sigma_i`` with the minimum-norm solution, rescales
    ``w`` to norm ``norm_bound`` and puts the lost magnitude into the slope
    ``a``, then evaluates ``f(X_i) = 1 / (1 + exp(a w*.X_i)) = 1 / (1 +
    exp(lambda sigma_i))`` at ``lambda = -lambda_magnitude``. As the
    magnitude grows, ``sum sigma_i f(X_i)`` tends to the number of +1 signs.
    """
    X = np.asarray(X, dtype=float)
    sig = np.asarray(sigma, dtype=float).ravel()
    if X.ndim != 2:
        raise DimensionMismatch("X must be a 2-d array")
    n, d = X.shape
    if n >= d:
        raise DimensionMismatch(f"need fewer samples than dimensions, got n={n}, d={d}")
    if sig.shape != (n,) or not np.all(np.abs(sig) == 1.0):
        raise InvalidArguments("sigma must be a +-1 vector with one entry per row of X")
    if np.any(np.linalg.norm(X, axis=1) > 1.0 + 1e-12):
        raise InvalidArguments("rows of X must have Euclidean norm <= 1")
    if not lambda_magnitude > 0:
        raise InvalidArguments("lambda_magnitude must be positive")

    gram = X @ X.T
    eig = np.linalg.eigvalsh(gram)
    if eig[0] <= 1e-8 * max(eig[-1], np.finfo(float).tiny):
        raise RankDeficient("rows of X are not linearly independent")
    w = X.T @ np.linalg.solve(gram, sig)
    w_norm = float(np.linalg.norm(w))
    w_star = norm_bound * w / w_norm
    lam = -float(lambda_magnitude)
    a = lam * w_norm / norm_bound
    f = expit(-(a * (X @ w_star)))
    achieved = float(np.dot(sig, f))
    target = int(np.count_nonzero(sig > 0))
    tolerance = n * 2.0 * math.exp(-lambda_magnitude) + 1e-9
    return SvmWitness(sig, w_star, lam, achieved, target, tolerance)


def theorem2_epsilon(rademacher: float, n: int, delta: float) -> float:
    """Smallest ``eps`` with ``R + sqrt(2 ln(8/delta) / n) = eps / 2``."""
    if not (0.0 < delta < 1.0):
        raise InvalidDelta(f"delta must be in (0, 1), got {delta!r}")
    if n < 1 or rademacher < 0:
        raise InvalidArguments("need n >= 1 and a nonnegative Rademacher value")
    return 2.0 * (rademacher + math.sqrt(2.0 * math.log(8.0 / delta) / n))


def finite_output_bound(d: int, n: int, p_star_size: int) -> float:
    """Massart/Sauer bound on R_D(H) when f takes finitely many values.

    ``sqrt((2 d (ln(n/d) + 1) + 4 ln(|P*| + 1)) / n)``, valid for
    ``n > d + 1``.
    """
    if d < 1 or p_star_size < 1 or n <= d + 1:
        raise InvalidArguments("need d >= 1, |P*| >= 1 and n > d + 1")
    return math.sqrt((2 * d * (math.log(n / d) + 1) + 4 * math.log(p_star_size + 1)) / n)
