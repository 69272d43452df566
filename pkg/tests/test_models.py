import numpy as np
import pytest
from scipy import sparse

from calmeasure.errors import ConstantScores, DimensionMismatch, EmptyTrainingSet, InvalidArguments, ParseError
from calmeasure.models import (
    LogisticModel,
    SparseExample,
    TrainConfig,
    examples_to_matrix,
    load_model,
    logistic_gradient,
    logistic_loss,
    predict_logistic,
    predict_naive_bayes,
    read_sparse_examples,
    rescale_scores,
    save_model,
    train_logistic,
    train_naive_bayes,
)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    for _ in range(5):
        X = rng.normal(size=(10, 5))
        y = rng.integers(0, 2, 10).astype(float)
        w, b, l2 = rng.normal(size=5), float(rng.normal()), 0.01
        gw, gb = logistic_gradient(w, b, X, y, l2)
        h = 1e-5
        num = np.array([
            (logistic_loss(w + h * e, b, X, y, l2) - logistic_loss(w - h * e, b, X, y, l2)) / (2 * h)
            for e in np.eye(5)
        ])
        num_b = (logistic_loss(w, b + h, X, y, l2) - logistic_loss(w, b - h, X, y, l2)) / (2 * h)
        assert np.linalg.norm(gw - num) <= 1e-4 * np.linalg.norm(num)
        assert abs(gb - num_b) <= 1e-4 * max(abs(num_b), 1e-8)


def test_full_batch_loss_non_increasing():
    rng = np.random.default_rng(2)
    X = rng.random((50, 8))
    y = (rng.random(50) < 0.4).astype(float)
    # smoothness constant of the mean logistic loss: ||[X 1]||^2 / (4 n) + l2
    A = np.hstack((X, np.ones((50, 1))))
    L = np.linalg.norm(A, 2) ** 2 / (4 * 50) + 1e-3
    m = train_logistic(sparse.csr_matrix(X), TrainConfig(learning_rate=0.9 / L, epochs=100, l2=1e-3), labels=y)
    h = np.array(m.loss_history)
    assert np.all(np.diff(h) <= 1e-15)
    assert h[-1] <= h[0]


def test_minibatch_is_seeded():
    rng = np.random.default_rng(3)
    X = rng.random((40, 4))
    y = (rng.random(40) < 0.5).astype(float)
    cfg = TrainConfig(learning_rate=0.2, epochs=5, batch_size=8, seed=9)
    a = train_logistic(X, cfg, labels=y)
    b = train_logistic(X, cfg, labels=y)
    assert np.array_equal(a.weights, b.weights) and a.bias == b.bias
    assert a.loss_history[-1] <= a.loss_history[0] + 1e-3


def test_separable_single_feature():
    ex = [SparseExample({0: 1.0}, 1)] * 5 + [SparseExample({0: -1.0}, 0)] * 5
    m = train_logistic(ex, TrainConfig(learning_rate=0.5, epochs=200, l2=0.0))
    preds = predict_logistic(m, [e.features for e in ex])
    assert np.array_equal(preds >= 0.5, np.array([e.label == 1 for e in ex]))


def test_all_positive_labels():
    ex = [SparseExample({0: 1.0, 1: 2.0}, 1), SparseExample({1: 1.0}, 1)]
    m = train_logistic(ex)
    assert np.all(predict_logistic(m, [e.features for e in ex]) > 0.5)


def test_bias_only_fit():
    y = np.array([1] * 30 + [0] * 70)
    X = sparse.csr_matrix((100, 3))
    m = train_logistic(X, TrainConfig(learning_rate=1.0, epochs=2000, l2=0.0), labels=y)
    assert m.bias == pytest.approx(np.log(0.3 / 0.7), abs=1e-6)
    assert abs(predict_logistic(m, {}) - 0.3) <= 1e-3


def test_predict_examples():
    m = LogisticModel(np.zeros(2), 0.0)
    assert predict_logistic(m, {0: 3.0}) == 0.5
    hi = predict_logistic(LogisticModel(np.zeros(1), 1e4), {})
    assert np.nextafter(1.0, 0.0) <= hi < 1.0
    lo = predict_logistic(LogisticModel(np.zeros(1), -1e4), {})
    assert 0.0 < lo
    m = LogisticModel(np.array([2.0]), -1.0)
    assert predict_logistic(m, {0: 1.0}) == pytest.approx(0.731058578630005, abs=1e-12)
    with pytest.raises(DimensionMismatch):
        predict_logistic(m, {3: 1.0})
    with pytest.raises(DimensionMismatch):
        predict_logistic(m, np.zeros((2, 4)))


def test_training_errors():
    with pytest.raises(EmptyTrainingSet):
        train_logistic([])
    with pytest.raises(DimensionMismatch):
        train_logistic([SparseExample({5: 1.0}, 1)], dimensionality=3)
    with pytest.raises(EmptyTrainingSet):
        train_naive_bayes([])


def test_naive_bayes_examples():
    ex = [SparseExample({0: 1.0}, 1), SparseExample({1: 1.0}, 1), SparseExample({0: 2.0}, 1)]
    m = train_naive_bayes(ex, dimensionality=2)
    assert np.exp(m.log_prior[0]) == pytest.approx(1 / 5, abs=1e-15)
    assert 0 < predict_naive_bayes(m, {0: 1.0}) < 1
    assert np.allclose(np.exp(m.log_likelihood).sum(axis=1), 1.0, atol=1e-9)

    m = train_naive_bayes([SparseExample({0: 1.0}, 1), SparseExample({1: 1.0}, 0)])
    assert np.exp(m.log_likelihood[1, 0]) == pytest.approx(2 / 3, abs=1e-15)
    p = predict_naive_bayes(m, {0: 3.0, 1: 1.0})
    q = predict_naive_bayes(m, {1: 3.0, 0: 1.0})
    assert p == pytest.approx(1 - q, abs=1e-12)
    assert p > 0.5
    batch = predict_naive_bayes(m, [{0: 3.0, 1: 1.0}, {1: 3.0, 0: 1.0}])
    assert batch.tolist() == pytest.approx([p, q], abs=1e-15)
    with pytest.raises(InvalidArguments):
        train_naive_bayes([SparseExample({0: 1.0}, 1)], smoothing=0.0)


def test_rescale():
    assert rescale_scores([-2, 0, 2]).tolist() == [0.0, 0.5, 1.0]
    x = [0.0, 0.3, 1.0]
    assert rescale_scores(x).tolist() == x
    with pytest.raises(ConstantScores):
        rescale_scores([5, 5, 5])


def test_examples_file(tmp_path):
    p = tmp_path / "ex.txt"
    p.write_text("# comment\n1 0:1 3:2.5\n-1 2:1\n\n0\n")
    ex = read_sparse_examples(p)
    assert [e.label for e in ex] == [1, 0, 0]
    assert ex[0].features == {0: 1.0, 3: 2.5}
    X, y = examples_to_matrix(ex)
    assert X.shape == (3, 4) and y.tolist() == [1, 0, 0]
    p.write_text("1 0:1\n2 1:1\n")
    with pytest.raises(ParseError, match="line 2"):
        read_sparse_examples(p)
    p.write_text("1 0:x\n")
    with pytest.raises(ParseError, match="line 1"):
        read_sparse_examples(p)


def test_model_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    X = sparse.csr_matrix(rng.integers(0, 3, (30, 6)).astype(float))
    y = rng.integers(0, 2, 30)
    lr = train_logistic(X, labels=y)
    save_model(lr, tmp_path / "lr.json")
    back = load_model(tmp_path / "lr.json")
    assert np.array_equal(back.weights, lr.weights) and back.bias == lr.bias
    assert np.array_equal(predict_logistic(back, X), predict_logistic(lr, X))
    nb = train_naive_bayes(X, labels=y)
    save_model(nb, tmp_path / "nb.json")
    nb2 = load_model(tmp_path / "nb.json")
    assert np.array_equal(predict_naive_bayes(nb2, X), predict_naive_bayes(nb, X))
    (tmp_path / "bad.json").write_text('{"model": "svm"}')
    with pytest.raises(ParseError):
        load_model(tmp_path / "bad.json")
