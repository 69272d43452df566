"""Interval-based calibration measures, isotonic recalibration and the
supporting learning-theory quantities for binary probability estimates."""

__version__ = "0.1.0"

from .core import (
    DiscreteDistribution,
    LabeledScore,
    ScoredDataset,
    canonicalize_labels,
    group_by_score,
    sample_dataset,
)
from .measure import (
    empirical_calibration,
    empirical_calibration_bruteforce,
    l1_empirical,
    true_calibration,
)
from .pav import apply_link, build_link, calibrate, calibration_objective, fit_pav
from .decision import CostPair, bayes_threshold, empirical_loss, loss_ratio_experiment
from .complexity import (
    estimate_interval_rademacher,
    finite_output_bound,
    svm_witness,
    theorem2_epsilon,
)
