import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from metric_oracle import brute_force_metrics

from phishvis.corpus import FeatureTable
from phishvis.evaluation import (
    ConfusionMatrix,
    confusion_matrix,
    cross_validate,
    holdout_evaluate,
    model_evaluate,
    weighted_metrics,
)
from phishvis.ml import RandomForestParams, SvmParams, train


def separable(rng, n_per=40, labels=("a", "b", "c"), config="1"):
    centers = rng.uniform(-50, 50, (len(labels), 4))
    X = np.vstack([rng.normal(c, 1.0, (n_per, 4)) for c in centers])
    y = [l for l in labels for _ in range(n_per)]
    return FeatureTable("SCD", config, X, y, [f"p{i}" for i in range(len(y))])


class TestConfusion:
    def test_diagonal(self):
        cm = confusion_matrix(["A", "B", "A"], ["A", "B", "A"], ["A", "B"])
        assert cm.counts.tolist() == [[2, 0], [0, 1]]

    def test_off_diagonal(self):
        cm = confusion_matrix(["A", "A"], ["B", "B"], ["A", "B"])
        assert cm.counts.tolist() == [[0, 2], [0, 0]]

    def test_conservation(self, rng):
        labels = list("abcdefg")
        truth = rng.choice(labels, 1000).tolist()
        pred = rng.choice(labels, 1000).tolist()
        cm = confusion_matrix(truth, pred, labels)
        assert cm.total == 1000
        assert cm.support.tolist() == [truth.count(l) for l in labels]

    def test_errors(self):
        with pytest.raises(ValueError, match="labels but pred has"):
            confusion_matrix(["a"], ["a", "b"], ["a", "b"])
        with pytest.raises(ValueError, match="not in class list"):
            confusion_matrix(["a"], ["z"], ["a"])


class TestMetrics:
    def test_perfect(self):
        m = weighted_metrics(ConfusionMatrix(["a", "b", "c"], np.diag([3, 5, 7])))
        assert (m.tpr, m.fpr, m.f1) == (1.0, 0.0, 1.0)

    def test_two_class_example(self):
        m = weighted_metrics(ConfusionMatrix(["a", "b"], np.array([[8, 2], [1, 9]])))
        assert m.tpr == pytest.approx(0.85)
        assert m.fpr == pytest.approx(0.15)
        assert m.f1 == pytest.approx(0.8497, abs=5e-4)

    def test_all_one_class(self):
        m = weighted_metrics(ConfusionMatrix(["a", "b"], np.array([[10, 0], [10, 0]])))
        a, b = m.per_class["a"], m.per_class["b"]
        assert (a.tpr, a.fpr, b.tpr, b.fpr) == (1.0, 1.0, 0.0, 0.0)
        assert m.tpr == 0.5
        assert b.precision == 0.0 and b.f1 == 0.0

    def test_empty(self):
        with pytest.raises(ValueError):
            weighted_metrics(ConfusionMatrix(["a"], np.zeros((1, 1), int)))

    @given(st.integers(1, 15).flatmap(
        lambda k: st.lists(st.lists(st.integers(0, 6), min_size=k, max_size=k), min_size=k, max_size=k)))
    def test_matches_brute_force(self, counts):
        if sum(map(sum, counts)) == 0:
            return
        m = weighted_metrics(ConfusionMatrix([str(i) for i in range(len(counts))], np.array(counts)))
        tpr, fpr, f1 = brute_force_metrics(counts)
        assert abs(m.tpr - tpr) <= 1e-12 and abs(m.fpr - fpr) <= 1e-12 and abs(m.f1 - f1) <= 1e-12


class TestProtocols:
    def test_cross_validation_separable(self, rng):
        rep = cross_validate(separable(rng), 5, RandomForestParams(n_trees=25), seed=0)
        assert rep.metrics.f1 >= 0.99 and rep.confusion.total == 120
        assert not rep.degenerate

    def test_cross_validation_reproducible(self, rng):
        t = separable(rng, n_per=15)
        t.X[:, :] += rng.normal(0, 40, t.X.shape)  # make it noisy so folds matter
        a = cross_validate(t, 5, RandomForestParams(n_trees=10, seed=3), seed=9)
        b = cross_validate(t, 5, RandomForestParams(n_trees=10, seed=3), seed=9)
        assert a.to_json() == b.to_json() and a.to_text() == b.to_text()

    def test_constant_labels_flagged(self, rng):
        t = FeatureTable("SCD", "1", rng.normal(size=(12, 3)), ["x"] * 12, [str(i) for i in range(12)])
        rep = cross_validate(t, 3, SvmParams(), seed=0)
        assert rep.degenerate and rep.metrics.tpr == 1.0
        assert json.loads(rep.to_json())["degenerate_single_class"] is True

    def test_too_few_rows(self, rng):
        with pytest.raises(ValueError, match="fewer than"):
            cross_validate(separable(rng, n_per=1), 5, RandomForestParams(), seed=0)

    def test_holdout_memorization(self, rng):
        t = separable(rng)
        for params in (RandomForestParams(n_trees=20), SvmParams()):
            assert holdout_evaluate(t, t, params).metrics.f1 >= 0.99

    def test_holdout_disjoint_labels(self, rng):
        train_t = separable(rng, labels=("a", "b"))
        test_t = separable(rng, labels=("c", "d"))
        rep = holdout_evaluate(train_t, test_t, RandomForestParams(n_trees=5))
        assert rep.metrics.tpr == 0.0
        assert rep.confusion.classes == ["a", "b", "c", "d"]

    def test_schema_mismatch(self, rng):
        with pytest.raises(ValueError, match="schema"):
            holdout_evaluate(separable(rng), separable(rng, config="4"), SvmParams())

    def test_model_evaluate(self, rng):
        t = separable(rng)
        m = train(t, RandomForestParams(n_trees=10))
        rep = model_evaluate(m, t)
        assert rep.metrics.f1 == 1.0
        with pytest.raises(ValueError, match="schema"):
            model_evaluate(m, separable(rng, config="4"))


class TestReport:
    def test_json_records(self, rng):
        rep = cross_validate(separable(rng, n_per=10), 2, SvmParams(cost=5), seed=4)
        doc = json.loads(rep.to_json())
        assert [r["class"] for r in doc["per_class"]] == ["a", "b", "c"]
        assert set(doc["summary"]) == {"tpr", "fpr", "precision", "f1", "n"}
        meta = doc["metadata"]
        assert meta["seed"] == 4 and meta["descriptor"] == "SCD" and meta["config"] == "1"
        assert meta["classifier"] == {"family": "svm_rbf", "cost": 5.0, "gamma": 0.25, "tol": 0.001, "seed": 0}

    def test_text(self, rng):
        rep = cross_validate(separable(rng, n_per=10), 2, RandomForestParams(n_trees=3), seed=1)
        text = rep.to_text()
        assert '# seed: 1' in text and "weighted" in text and "confusion" in text
