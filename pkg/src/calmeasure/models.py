"""Small trainable scorers: logistic regression and multinomial naive Bayes.

Both work on sparse bag-of-words features. Inputs may be a list of
:class:`SparseExample` or, for speed, a ``scipy.sparse`` matrix plus labels.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.special import expit, logsumexp

from .errors import (
    ConstantScores,
    DimensionMismatch,
    EmptyInput,
    EmptyTrainingSet,
    InvalidArguments,
    InvalidConfig,
    IoFailure,
    ParseError,
)

__all__ = [
    "SparseExample",
    "TrainConfig",
    "LogisticModel",
    "NaiveBayesModel",
    "examples_to_matrix",
    "read_sparse_examples",
    "logistic_loss",
    "logistic_gradient",
    "train_logistic",
    "predict_logistic",
    "train_naive_bayes",
    "predict_naive_bayes",
    "rescale_scores",
    "save_model",
    "load_model",
]


@dataclass(frozen=True)
class SparseExample:
    features: dict[int, float]
    label: int


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 30
    l2: float = 1e-4
    seed: int = 0xC0FFEE
    batch_size: int | None = None  # None: full batch

    def validate(self) -> None:
        if not (math.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise InvalidConfig("learning_rate must be positive")
        if self.epochs < 1:
            raise InvalidConfig("epochs must be at least 1")
        if not self.l2 >= 0:
            raise InvalidConfig("l2 must be nonnegative")
        if self.batch_size is not None and self.batch_size < 1:
            raise InvalidConfig("batch_size must be positive")


def examples_to_matrix(
    examples: Sequence[SparseExample], dimensionality: int | None = None
) -> tuple[sparse.csr_matrix, np.ndarray]:
    if len(examples) == 0:
        raise EmptyTrainingSet("no examples")
    max_index = max((max(e.features, default=-1) for e in examples), default=-1)
    dim = max_index + 1 if dimensionality is None else dimensionality
    if max_index >= dim:
        raise DimensionMismatch(f"feature index {max_index} >= dimensionality {dim}")
    rows, cols, vals = [], [], []
    for i, e in enumerate(examples):
        for j, v in e.features.items():
            if j < 0 or not math.isfinite(v):
                raise InvalidArguments(f"bad feature {j}:{v} in example {i}")
            rows.append(i)
            cols.append(j)
            vals.append(float(v))
    X = sparse.csr_matrix((vals, (rows, cols)), shape=(len(examples), dim))
    y = np.array([e.label for e in examples], dtype=float)
    if not np.all((y == 0) | (y == 1)):
        raise InvalidArguments("labels must be 0 or 1")
    return X, y


def read_sparse_examples(path: str | os.PathLike) -> list[SparseExample]:
    """Parse ``label idx:val idx:val ...`` lines; ``#`` starts a comment line."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split()
        try:
            label = int(float(parts[0]))
            feats = {}
            for tok in parts[1:]:
                k, v = tok.split(":")
                feats[int(k)] = float(v)
        except ValueError as exc:
            raise ParseError(f"malformed example: {exc}", lineno) from exc
        if label == -1:
            label = 0
        if label not in (0, 1):
            raise ParseError(f"label {parts[0]!r} not in {{-1, 0, 1}}", lineno)
        out.append(SparseExample(feats, label))
    return out


def _as_matrix(examples, labels=None, dimensionality=None):
    if sparse.issparse(examples) or isinstance(examples, np.ndarray):
        X = sparse.csr_matrix(examples, dtype=float)
        if labels is None:
            raise InvalidArguments("labels are required with a feature matrix")
        y = np.asarray(labels, dtype=float)
        if X.shape[0] == 0:
            raise EmptyTrainingSet("no examples")
        if y.shape != (X.shape[0],):
            raise DimensionMismatch("one label per row is required")
        if dimensionality is not None and X.shape[1] != dimensionality:
            raise DimensionMismatch("matrix width differs from dimensionality")
        return X, y
    return examples_to_matrix(list(examples), dimensionality)


@dataclass(eq=False)
class LogisticModel:
    weights: np.ndarray
    bias: float
    loss_history: list[float] = field(default_factory=list)

    @property
    def dimensionality(self) -> int:
        return int(self.weights.shape[0])

    def to_json(self) -> dict:
        nz = np.flatnonzero(self.weights)
        return {
            "model": "logistic",
            "dimensionality": self.dimensionality,
            "bias": float(self.bias),
            "weights": [[int(i), float(self.weights[i])] for i in nz],
        }


def logistic_loss(w: np.ndarray, b: float, X, y: np.ndarray, l2: float) -> float:
    """Mean negative log-likelihood plus ``l2/2 * ||w||^2``."""
    m = X @ w + b
    # log(1 + e^m) - y m, written stably
    nll = np.logaddexp(0.0, m) - y * m
    return float(nll.mean() + 0.5 * l2 * np.dot(w, w))


def logistic_gradient(w: np.ndarray, b: float, X, y: np.ndarray, l2: float):
    r = expit(X @ w + b) - y
    return X.T @ r / X.shape[0] + l2 * w, float(r.mean())


def train_logistic(examples, config: TrainConfig | None = None, labels=None, dimensionality=None) -> LogisticModel:
    """Gradient descent on the L2-regularized logistic NLL.

    Full batch by default. With ``batch_size`` set, each epoch visits the
    data in an order shuffled by a generator keyed on ``(seed, epoch)``.
    ``loss_history`` holds the full training objective after every epoch.
    """
    config = config or TrainConfig()
    config.validate()
    X, y = _as_matrix(examples, labels, dimensionality)
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    lr, l2 = config.learning_rate, config.l2
    history = []
    for epoch in range(config.epochs):
        if config.batch_size is None or config.batch_size >= n:
            gw, gb = logistic_gradient(w, b, X, y, l2)
            w -= lr * gw
            b -= lr * gb
        else:
            order = np.random.default_rng([config.seed, epoch]).permutation(n)
            for start in range(0, n, config.batch_size):
                idx = order[start:start + config.batch_size]
                gw, gb = logistic_gradient(w, b, X[idx], y[idx], l2)
                w -= lr * gw
                b -= lr * gb
        history.append(logistic_loss(w, b, X, y, l2))
    return LogisticModel(w, b, history)


_P_LO = np.finfo(float).tiny
_P_HI = np.nextafter(1.0, 0.0)


def _prob(margin):
    # expit saturates to exactly 0 or 1 for |margin| >~ 37 / 745
    return np.clip(expit(margin), _P_LO, _P_HI)


def predict_logistic(model: LogisticModel, features) -> np.ndarray | float:
    """Probability of label 1 for one example (dict) or many (matrix / list)."""
    if isinstance(features, dict):
        margin = model.bias
        for j, v in features.items():
            if not 0 <= j < model.dimensionality:
                raise DimensionMismatch(f"feature index {j} outside model dimensionality")
            margin += model.weights[j] * v
        return float(_prob(margin))
    if isinstance(features, (list, tuple)):
        features = examples_to_matrix(
            [f if isinstance(f, SparseExample) else SparseExample(f, 0) for f in features],
            model.dimensionality,
        )[0]
    if features.shape[1] != model.dimensionality:
        raise DimensionMismatch("feature width differs from model dimensionality")
    return _prob(features @ model.weights + model.bias)


@dataclass(eq=False)
class NaiveBayesModel:
    log_prior: np.ndarray  # shape (2,), index = class
    log_likelihood: np.ndarray  # shape (2, V)
    smoothing: float

    @property
    def dimensionality(self) -> int:
        return int(self.log_likelihood.shape[1])

    def to_json(self) -> dict:
        return {
            "model": "naive_bayes",
            "smoothing": self.smoothing,
            "log_prior": self.log_prior.tolist(),
            "log_likelihood": self.log_likelihood.tolist(),
        }


def train_naive_bayes(examples, smoothing: float = 1.0, labels=None, dimensionality=None) -> NaiveBayesModel:
    """Multinomial naive Bayes with additive smoothing on priors and words."""
    if not (math.isfinite(smoothing) and smoothing > 0):
        raise InvalidArguments("smoothing must be positive")
    X, y = _as_matrix(examples, labels, dimensionality)
    n, V = X.shape
    class_counts = np.array([np.sum(y == 0), np.sum(y == 1)], dtype=float)
    log_prior = np.log((class_counts + smoothing) / (n + 2 * smoothing))
    word_counts = np.vstack([
        np.asarray(X[y == c].sum(axis=0)).ravel() for c in (0, 1)
    ])
    totals = word_counts.sum(axis=1, keepdims=True)
    log_lik = np.log(word_counts + smoothing) - np.log(totals + smoothing * V)
    return NaiveBayesModel(log_prior, log_lik, float(smoothing))


def predict_naive_bayes(model: NaiveBayesModel, features) -> np.ndarray | float:
    single = isinstance(features, dict)
    if single:
        features = [features]
    if isinstance(features, (list, tuple)):
        features = examples_to_matrix(
            [f if isinstance(f, SparseExample) else SparseExample(f, 0) for f in features],
            model.dimensionality,
        )[0]
    if features.shape[1] != model.dimensionality:
        raise DimensionMismatch("feature width differs from model dimensionality")
    joint = features @ model.log_likelihood.T + model.log_prior[None, :]
    joint = np.asarray(joint)
    post = np.exp(joint[:, 1] - logsumexp(joint, axis=1))
    return float(post[0]) if single else post


def rescale_scores(raw) -> np.ndarray:
    """Affine map of raw margins onto [0, 1]: ``(x - min) / (max - min)``."""
    x = np.asarray(raw, dtype=float)
    if x.size == 0:
        raise EmptyInput("no scores")
    if not np.all(np.isfinite(x)):
        raise InvalidArguments("scores must be finite")
    lo, hi = x.min(), x.max()
    if lo == hi:
        raise ConstantScores("all scores are equal; cannot rescale")
    return np.clip((x - lo) / (hi - lo), 0.0, 1.0)


def save_model(model, path) -> None:
    from .ioutil import atomic_write_text

    atomic_write_text(path, json.dumps(model.to_json()) + "\n")


def load_model(path):
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise ParseError(f"model file is not JSON: {exc}") from exc
    kind = obj.get("model")
    if kind == "logistic":
        w = np.zeros(int(obj["dimensionality"]))
        for i, v in obj["weights"]:
            w[int(i)] = float(v)
        return LogisticModel(w, float(obj["bias"]))
    if kind == "naive_bayes":
        return NaiveBayesModel(
            np.array(obj["log_prior"], dtype=float),
            np.array(obj["log_likelihood"], dtype=float),
            float(obj["smoothing"]),
        )
    raise ParseError(f"unknown model kind {kind!r}")
