import itertools
import math

import numpy as np
import pytest

from calmeasure.core import ScoredDataset
from calmeasure.complexity import (
    estimate_interval_rademacher,
    finite_output_bound,
    interval_sup,
    svm_witness,
    theorem2_epsilon,
)
from calmeasure.errors import (
    DimensionMismatch,
    EmptyDataset,
    InvalidArguments,
    InvalidDelta,
    RankDeficient,
)

from conftest import random_dataset


def rademacher_by_intervals(ds, variant):
    """Enumerate every sign vector and every threshold pair explicitly."""
    s, y = ds.scores, ds.labels
    base = {"H": np.ones(ds.n), "H1": y.astype(float), "H2": s}[variant]
    cuts = np.concatenate(([-1.0], np.unique(s)))
    total = 0.0
    for sig in itertools.product((1, -1), repeat=ds.n):
        w = np.array(sig) * base
        best = 0.0
        for p1 in cuts:
            for p2 in cuts:
                if p1 < p2:
                    best = max(best, float(w[(s > p1) & (s <= p2)].sum()))
        total += best
    return total / 2**ds.n / ds.n


def test_examples():
    one = ScoredDataset.from_arrays([0.3], [1])
    est = estimate_interval_rademacher(one, "H", num_sigma=2)
    assert est.mean == 0.5 and est.exact and est.std_error == 0.0
    zeros = ScoredDataset.from_arrays([0.1, 0.5, 0.9], [0, 0, 0])
    assert estimate_interval_rademacher(zeros, "H1", num_sigma=8).mean == 0.0
    two = ScoredDataset.from_arrays([0.2, 0.7], [0, 1])
    assert estimate_interval_rademacher(two, "H", num_sigma=4).mean == 0.5
    three = ScoredDataset.from_arrays([0.1, 0.2, 0.3], [0, 1, 0])
    assert estimate_interval_rademacher(three, "H", num_sigma=8).mean == pytest.approx(11 / 24, abs=1e-15)


@pytest.mark.parametrize("variant", ["H", "H1", "H2"])
def test_exact_matches_interval_enumeration(rng, variant):
    for _ in range(15):
        ds = random_dataset(rng, int(rng.integers(1, 8)), grid=int(rng.choice([3, 0])))
        est = estimate_interval_rademacher(ds, variant, num_sigma=2**ds.n)
        assert est.exact
        assert est.mean == pytest.approx(rademacher_by_intervals(ds, variant), abs=1e-12)


def test_interval_sup_matches_double_loop(rng):
    for _ in range(200):
        w = rng.normal(size=int(rng.integers(1, 12)))
        best = max(
            [0.0] + [w[i:j].sum() for i in range(len(w)) for j in range(i + 1, len(w) + 1)]
        )
        assert interval_sup(w)[0] == pytest.approx(best, abs=1e-12)


def test_subclass_ordering(rng):
    for _ in range(10):
        ds = random_dataset(rng, int(rng.integers(1, 15)), grid=int(rng.choice([4, 0])))
        k = 2**ds.n
        h = estimate_interval_rademacher(ds, "H", k).mean
        assert estimate_interval_rademacher(ds, "H1", k).mean <= h + 1e-12
        assert estimate_interval_rademacher(ds, "H2", k).mean <= h + 1e-12


def test_exact_at_twenty():
    ds = random_dataset(np.random.default_rng(5), 20)
    est = estimate_interval_rademacher(ds, "H", num_sigma=2**20)
    assert est.exact and 0 < est.mean < 1


def test_singleton_rate_bounded():
    ratios = []
    for n in (16, 64, 256, 1024):
        ds = random_dataset(np.random.default_rng(n), n)
        est = estimate_interval_rademacher(ds, "H", num_sigma=2000, seed=1)
        ratios.append(est.mean / math.sqrt(math.log(n) / n))
    assert max(ratios) < 2.0
    assert ratios[-1] <= ratios[0] * 1.5


def test_mc_determinism():
    ds = random_dataset(np.random.default_rng(3), 300)
    a = estimate_interval_rademacher(ds, "H2", num_sigma=9000, seed=42)
    b = estimate_interval_rademacher(ds, "H2", num_sigma=9000, seed=42)
    c = estimate_interval_rademacher(ds, "H2", num_sigma=9000, seed=43)
    assert a == b
    assert not a.exact and a.std_error > 0
    assert a.mean != c.mean


def test_rademacher_errors():
    with pytest.raises(EmptyDataset):
        estimate_interval_rademacher(ScoredDataset.from_arrays([], []))
    ds = ScoredDataset.from_arrays([0.5], [1])
    with pytest.raises(InvalidArguments):
        estimate_interval_rademacher(ds, "H3")
    with pytest.raises(InvalidArguments):
        estimate_interval_rademacher(ds, num_sigma=0)


def test_svm_witness_examples():
    assert svm_witness([[1.0, 0.0]], [1]).achieved == pytest.approx(1.0, abs=1e-9)
    X = np.eye(3, 4)
    w = svm_witness(X, [-1, -1, -1])
    assert w.achieved == pytest.approx(0.0, abs=1e-9)
    assert w.lam == -50.0 and w.target == 0
    assert np.linalg.norm(w.weights) == pytest.approx(1.0)


def test_svm_witness_mean_over_all_sigma():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(4, 5))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    vals = []
    for sig in itertools.product((1, -1), repeat=4):
        w = svm_witness(X, sig)
        assert abs(w.achieved - w.target) <= w.tolerance
        vals.append(w.achieved / 4)
    m = float(np.mean(vals))
    assert 0.5 - 1e-6 <= m <= 0.5


def test_svm_witness_errors():
    with pytest.raises(DimensionMismatch):
        svm_witness(np.eye(2), [1, 1])
    with pytest.raises(RankDeficient):
        svm_witness([[1, 0, 0], [1, 0, 0]], [1, -1])
    with pytest.raises(InvalidArguments):
        svm_witness([[2.0, 0.0]], [1])
    with pytest.raises(InvalidArguments):
        svm_witness([[1.0, 0.0]], [0])


def test_theorem2_epsilon():
    # closed form evaluated independently at 50 digits
    assert theorem2_epsilon(0.05, 10000, 0.05) == pytest.approx(0.163719220429844, abs=1e-12)
    assert theorem2_epsilon(0.1, 500, 0.1) - theorem2_epsilon(0.05, 500, 0.1) == pytest.approx(0.1)
    eps = [theorem2_epsilon(0.0, n, 0.05) for n in (10, 10**3, 10**6, 10**9)]
    assert all(a > b for a, b in zip(eps, eps[1:])) and eps[-1] < 1e-3
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(InvalidDelta):
            theorem2_epsilon(0.1, 100, bad)


def test_finite_output_bound():
    assert finite_output_bound(2, 100, 10) == pytest.approx(0.540737210786405, abs=1e-12)
    by_n = [finite_output_bound(3, n, 5) for n in (10, 100, 1000, 10**5)]
    assert all(a > b for a, b in zip(by_n, by_n[1:]))
    by_p = [finite_output_bound(3, 100, p) for p in (1, 10, 100)]
    assert all(a < b for a, b in zip(by_p, by_p[1:]))
    with pytest.raises(InvalidArguments):
        finite_output_bound(2, 3, 10)
