"""End-to-end pipelines on the synthetic LDA corpus."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .core import ScoredDataset
from .decision import default_p_grid, loss_ratio_experiment
from .measure import empirical_calibration, l1_empirical
from .models import TrainConfig, predict_logistic, train_logistic
from .synthlda import LdaConfig, LdaCorpus, corpus_baselines, generate_corpus

__all__ = [
    "TABLE1_REFERENCE",
    "TABLE1_TRAIN",
    "Table1Report",
    "reproduce_table1",
    "LdaLossRatioReport",
    "lda_loss_ratio",
]

# Reference values for this simulation: mean +- std over five runs.
TABLE1_REFERENCE = {
    "logistic_l1": (0.1270, 0.0008),
    "logistic_c_emp": (0.0083, 0.0003),
    "trivial_l1": (0.2022, 0.0001),
    "label_frequency": (0.3448, 0.0001),
}

# Full-batch GD run to convergence on raw counts. The step stays below 1/L
# for the default corpus (L ~ 23.7, the logistic-loss smoothness constant).
TABLE1_TRAIN = TrainConfig(learning_rate=0.04, epochs=3000, l2=1e-4)


@dataclass(frozen=True)
class Table1Report:
    logistic_l1: float
    logistic_c_emp: float
    trivial_l1: float
    label_frequency: float
    num_docs: int
    seed: int
    final_train_loss: float

    def to_json(self) -> dict:
        out = asdict(self)
        out["reference"] = {k: {"mean": m, "std": s} for k, (m, s) in TABLE1_REFERENCE.items()}
        return out


def _train_scores(corpus: LdaCorpus, rows: slice, config: TrainConfig):
    X = corpus.count_matrix()
    y = corpus.labels
    model = train_logistic(X[rows], config, labels=y[rows])
    return model, predict_logistic(model, X)


def reproduce_table1(
    seed: int = 0xC0FFEE,
    lda: LdaConfig | None = None,
    train: TrainConfig = TABLE1_TRAIN,
) -> Table1Report:
    """Generate the corpus, fit logistic regression on all of it, and measure
    l1 error and ``c_emp`` on that same training data."""
    lda = lda or LdaConfig(seed=seed)
    corpus = generate_corpus(lda)
    model, scores = _train_scores(corpus, slice(None), train)
    freq, trivial = corpus_baselines(corpus)
    report = empirical_calibration(ScoredDataset.from_arrays(scores, corpus.labels))
    return Table1Report(
        logistic_l1=l1_empirical(scores, corpus.true_probs),
        logistic_c_emp=report.c_emp,
        trivial_l1=trivial,
        label_frequency=freq,
        num_docs=len(corpus),
        seed=lda.seed,
        final_train_loss=model.loss_history[-1],
    )


@dataclass(frozen=True)
class LdaLossRatioReport:
    logistic: list[tuple[float, float]]
    squared: list[tuple[float, float]]
    n_train: int
    n_validation: int
    n_test: int

    def to_json(self) -> dict:
        return {
            "logistic": [{"p": p, "ratio": r} for p, r in self.logistic],
            "squared": [{"p": p, "ratio": r} for p, r in self.squared],
            "n_train": self.n_train,
            "n_validation": self.n_validation,
            "n_test": self.n_test,
        }


def lda_loss_ratio(
    seed: int = 0xC0FFEE,
    n_validation: int = 2000,
    train_fraction: float = 0.5,
    lda: LdaConfig | None = None,
    train: TrainConfig = TABLE1_TRAIN,
    p_grid=None,
) -> LdaLossRatioReport:
    """Loss ratio of isotonic recalibration for logistic scores and for a
    deliberately distorted copy (scores squared).

    Documents are split in order: a training block, ``n_validation`` documents
    for fitting the link, and the rest as test set.
    """
    lda = lda or LdaConfig(seed=seed)
    corpus = generate_corpus(lda)
    n = len(corpus)
    n_train = int(round(train_fraction * n))
    if not (0 < n_train and n_train + n_validation < n):
        raise ValueError("corpus too small for the requested split")
    _, scores = _train_scores(corpus, slice(0, n_train), train)
    y = corpus.labels
    va = slice(n_train, n_train + n_validation)
    te = slice(n_train + n_validation, n)
    grid = default_p_grid() if p_grid is None else p_grid

    def run(s: np.ndarray):
        return loss_ratio_experiment(
            ScoredDataset.from_arrays(s[:n_train], y[:n_train]),
            ScoredDataset.from_arrays(s[va], y[va]),
            ScoredDataset.from_arrays(s[te], y[te]),
            grid,
        )

    return LdaLossRatioReport(
        logistic=run(scores),
        squared=run(scores**2),
        n_train=n_train,
        n_validation=n_validation,
        n_test=n - n_train - n_validation,
    )
