"""Isotonic recalibration through the cumulative-sum diagram.

Samples are sorted by score and ties pooled into blocks. The diagram has a
point ``(k, S_k)`` at every block boundary, where ``k`` counts samples and
``S_k`` counts positives. The greatest convex minorant of those points gives
cumulative fitted values ``Z_k``; its slopes are the calibrated values
``z_i``. A continuous nondecreasing link function is then obtained by linear
interpolation between (score, z) knots, held constant outside them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import DiscreteDistribution, ScoredDataset, group_by_score, validate_scores
from .errors import (
    EmptyDataset,
    EmptyGrid,
    FitDatasetMismatch,
    InvalidArguments,
    LengthMismatch,
)

__all__ = [
    "lower_hull",
    "CumulativeDiagram",
    "IsotonicFit",
    "LinkFunction",
    "ConvergenceDiagnostics",
    "cumulative_diagram",
    "fit_pav",
    "build_link",
    "apply_link",
    "calibrate",
    "calibration_objective",
    "convergence_diagnostics",
]


def lower_hull(xs: Sequence, ys: Sequence) -> list[int]:
    """Indices of the lower convex hull vertices of points sorted by ``x``.

    Monotone-stack (Andrew's chain) construction. Collinear interior points
    are dropped. With integer inputs every cross product is exact.
    """
    hull: list[int] = []
    for k in range(len(xs)):
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            cross = (xs[j] - xs[i]) * (ys[k] - ys[i]) - (ys[j] - ys[i]) * (xs[k] - xs[i])
            if cross > 0:
                break
            hull.pop()
        hull.append(k)
    return hull


@dataclass(frozen=True, eq=False)
class CumulativeDiagram:
    """Points ``(x_b, S_b)`` at tie-block boundaries, starting at (0, 0)."""

    x: np.ndarray
    s: np.ndarray

    @property
    def points(self) -> list[tuple[int, int]]:
        return list(zip(self.x.tolist(), self.s.tolist()))


@dataclass(frozen=True, eq=False)
class IsotonicFit:
    """PAV output.

    ``z`` holds one calibrated value per sample in ascending-score order
    (``order`` maps those positions back to the input). ``hull_vertices``
    are sample counts ``i`` at which the minorant touches the diagram.
    """

    z: np.ndarray
    hull_vertices: list[int]
    order: np.ndarray
    diagram: CumulativeDiagram

    @property
    def n(self) -> int:
        return int(self.z.shape[0])

    @property
    def cumulative(self) -> np.ndarray:
        """``Z_0 .. Z_n``."""
        return np.concatenate(([0.0], np.cumsum(self.z)))

    def values_in_input_order(self) -> np.ndarray:
        out = np.empty_like(self.z)
        out[self.order] = self.z
        return out


def cumulative_diagram(dataset: ScoredDataset) -> CumulativeDiagram:
    g = group_by_score(dataset)
    x = np.concatenate(([0], np.cumsum(g.counts)))
    s = np.concatenate(([0], np.cumsum(g.positives)))
    return CumulativeDiagram(x.astype(np.int64), s.astype(np.int64))


def fit_pav(dataset: ScoredDataset) -> IsotonicFit:
    if dataset.n == 0:
        raise EmptyDataset("dataset has no samples")
    diagram = cumulative_diagram(dataset)
    xs = diagram.x.tolist()
    ss = diagram.s.tolist()
    vertices = lower_hull(xs, ss)
    z = np.empty(dataset.n)
    for a, b in zip(vertices[:-1], vertices[1:]):
        lo, hi = xs[a], xs[b]
        # int / int is correctly rounded, so equal slopes give equal floats.
        z[lo:hi] = (ss[b] - ss[a]) / (hi - lo)
    order = np.argsort(dataset.scores, kind="stable")
    return IsotonicFit(z, [xs[v] for v in vertices], order, diagram)


@dataclass(frozen=True, eq=False)
class LinkFunction:
    """Continuous nondecreasing map ``[0, 1] -> [0, 1]``.

    Linear between knots, constant beyond the first and last knot. At a knot
    score the knot value is returned exactly.
    """

    knot_scores: np.ndarray
    knot_values: np.ndarray
    interpolation: str = field(default="linear-clamped")

    def __post_init__(self):
        ks, kv = self.knot_scores, self.knot_values
        if ks.ndim != 1 or ks.shape != kv.shape or ks.size == 0:
            raise InvalidArguments("knots must be a nonempty list of (score, value)")
        if np.any(np.diff(ks) <= 0):
            raise InvalidArguments("knot scores must be strictly ascending")
        if np.any(np.diff(kv) < 0):
            raise InvalidArguments("knot values must be nondecreasing")
        if np.any((kv < 0) | (kv > 1)) or np.any((ks < 0) | (ks > 1)):
            raise InvalidArguments("knots must lie in [0, 1] x [0, 1]")
        if self.interpolation != "linear-clamped":
            raise InvalidArguments(f"unknown interpolation {self.interpolation!r}")

    @classmethod
    def from_knots(cls, knots: Sequence[tuple[float, float]]) -> "LinkFunction":
        arr = np.asarray(knots, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0].copy(), arr[:, 1].copy())

    @property
    def knots(self) -> list[tuple[float, float]]:
        return list(zip(self.knot_scores.tolist(), self.knot_values.tolist()))

    def __call__(self, scores) -> np.ndarray:
        x = np.asarray(scores, dtype=float)
        ks, kv = self.knot_scores, self.knot_values
        j = np.searchsorted(ks, x, side="right") - 1
        below, above = j < 0, j >= ks.size - 1
        jj = np.clip(j, 0, max(ks.size - 2, 0))
        out = np.empty_like(x)
        out[below] = kv[0]
        out[above] = kv[-1]
        mid = ~(below | above)
        if mid.any():
            a, b = kv[jj[mid]], kv[jj[mid] + 1]
            x0, x1 = ks[jj[mid]], ks[jj[mid] + 1]
            t = (x[mid] - x0) / (x1 - x0)
            # clamping keeps the segment inside [a, b], hence monotone overall
            out[mid] = np.minimum(np.maximum(a + t * (b - a), a), b)
        # exact knot hits (j indexes the knot itself when x == ks[j])
        hit = (j >= 0) & (ks[np.clip(j, 0, ks.size - 1)] == x)
        out[hit] = kv[j[hit]]
        return out

    def to_json(self) -> dict:
        return {"interpolation": self.interpolation, "knots": [list(k) for k in self.knots]}

    @classmethod
    def from_json(cls, obj: dict) -> "LinkFunction":
        link = cls.from_knots(obj["knots"])
        if obj.get("interpolation", "linear-clamped") != "linear-clamped":
            raise InvalidArguments(f"unknown interpolation {obj['interpolation']!r}")
        return link

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def loads(cls, text: str) -> "LinkFunction":
        return cls.from_json(json.loads(text))


def build_link(fit: IsotonicFit, dataset: ScoredDataset) -> LinkFunction:
    if fit.n != dataset.n:
        raise FitDatasetMismatch(f"fit has {fit.n} values, dataset has {dataset.n} samples")
    sorted_scores = dataset.scores[fit.order]
    starts = np.flatnonzero(np.concatenate(([True], sorted_scores[1:] != sorted_scores[:-1])))
    return LinkFunction(sorted_scores[starts].copy(), fit.z[starts].copy())


def apply_link(link: LinkFunction, scores) -> np.ndarray:
    return link(validate_scores(scores))


def calibrate(dataset: ScoredDataset) -> LinkFunction:
    """Fit PAV on ``dataset`` and return its link function."""
    return build_link(fit_pav(dataset), dataset)


def calibration_objective(z, labels) -> float:
    """``(1/n) max_{a<b} |sum_{a<i<=b} (label_i - z_i)|`` over contiguous runs."""
    z = np.asarray(z, dtype=float)
    y = np.asarray(labels, dtype=float)
    if z.shape != y.shape:
        raise LengthMismatch(f"{z.size} values but {y.size} labels")
    if z.size == 0:
        raise LengthMismatch("empty input")
    prefix = np.concatenate(([0.0], np.cumsum(y - z)))
    return float(prefix.max() - prefix.min()) / z.size


@dataclass(frozen=True, eq=False)
class ConvergenceDiagnostics:
    grid: np.ndarray
    F: np.ndarray
    G: np.ndarray
    G_e: np.ndarray
    cvF: np.ndarray

    @property
    def sup_gap_to_G(self) -> float:
        return float(np.max(np.abs(self.G_e - self.G)))

    @property
    def sup_gap_to_minorant(self) -> float:
        return float(np.max(np.abs(self.G_e - self.cvF)))


def _minorant_at(px: np.ndarray, py: np.ndarray, at: np.ndarray) -> np.ndarray:
    """Greatest convex minorant of points ``(px, py)`` evaluated at ``at``."""
    order = np.lexsort((py, px))
    px, py = px[order], py[order]
    keep = np.concatenate(([True], px[1:] != px[:-1]))  # lowest y per x
    px, py = px[keep], py[keep]
    v = lower_hull(px.tolist(), py.tolist())
    return np.interp(at, px[v], py[v])


def convergence_diagnostics(
    dist: DiscreteDistribution, link: LinkFunction, grid
) -> ConvergenceDiagnostics:
    """Population curves comparing a fitted link against the true law.

    ``F(t) = P(f <= t)``, ``G(t) = P(f <= t, Y = 1)``,
    ``G_e(t) = E[1{f <= t} g(f)]`` and ``cvF(t)`` is the greatest convex
    minorant of ``(0, 0)`` and the points ``(F(t_j), G(t_j))``, read at
    ``F(t)``.
    """
    dist.validate()
    t = np.asarray(grid, dtype=float)
    if t.size == 0:
        raise EmptyGrid("grid is empty")
    if np.any(np.diff(t) < 0) or np.any((t < 0) | (t > 1)):
        raise InvalidArguments("grid must be ascending within [0, 1]")
    inside = dist.f_values[None, :] <= t[:, None]
    F = inside @ dist.masses
    G = inside @ (dist.masses * dist.positive_rates)
    G_e = inside @ (dist.masses * link(dist.f_values))
    cv = _minorant_at(np.append(F, 0.0), np.append(G, 0.0), F)
    return ConvergenceDiagnostics(t, F, G, G_e, cv)
