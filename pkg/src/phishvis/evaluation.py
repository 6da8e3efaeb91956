"""Confusion matrices, support-weighted TPR/FPR/F1, cross-validation and hold-out runs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .corpus import FeatureTable, stratified_folds
from .ml import RandomForestParams, SvmParams, train

REPORT_VERSION = 1


@dataclass
class ConfusionMatrix:
    """Counts with rows = truth and columns = prediction."""

    classes: list[str]
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def support(self) -> np.ndarray:
        return self.counts.sum(axis=1)


def confusion_matrix(truth: Sequence[str], pred: Sequence[str], classes: Sequence[str]) -> ConfusionMatrix:
    truth, pred, classes = list(truth), list(pred), list(classes)
    if len(truth) != len(pred):
        raise ValueError(f"truth has {len(truth)} labels but pred has {len(pred)}")
    index = {c: i for i, c in enumerate(classes)}
    unknown = sorted({l for l in truth + pred if l not in index})
    if unknown:
        raise ValueError(f"labels not in class list: {unknown}")
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    np.add.at(counts, ([index[l] for l in truth], [index[l] for l in pred]), 1)
    return ConfusionMatrix(classes, counts)


@dataclass
class ClassMetrics:
    support: int
    tpr: float
    fpr: float
    precision: float
    f1: float


@dataclass
class Metrics:
    tpr: float
    fpr: float
    f1: float
    precision: float
    per_class: dict[str, ClassMetrics]


def _ratio(num, den):
    return np.divide(num, den, out=np.zeros_like(num, dtype=np.float64), where=den > 0)


def weighted_metrics(cm: ConfusionMatrix) -> Metrics:
    """Per-class rates and their support-weighted averages."""
    c = np.asarray(cm.counts, dtype=np.float64)
    n = c.sum()
    if n <= 0:
        raise ValueError("confusion matrix is empty")
    tp = np.diag(c)
    support = c.sum(axis=1)
    predicted = c.sum(axis=0)
    fn = support - tp
    fp = predicted - tp
    tn = n - tp - fn - fp

    tpr = _ratio(tp, tp + fn)
    fpr = _ratio(fp, fp + tn)
    precision = _ratio(tp, tp + fp)
    f1 = _ratio(2 * precision * tpr, precision + tpr)
    w = support / n

    per_class = {
        label: ClassMetrics(int(support[i]), float(tpr[i]), float(fpr[i]), float(precision[i]), float(f1[i]))
        for i, label in enumerate(cm.classes)
    }
    return Metrics(
        tpr=float(w @ tpr),
        fpr=float(w @ fpr),
        f1=float(w @ f1),
        precision=float(w @ precision),
        per_class=per_class,
    )


def learner_info(params, dim: int) -> dict:
    """Learner parameters with data-dependent defaults resolved for ``dim``."""
    if isinstance(params, RandomForestParams):
        return {"family": "random_forest", **params.to_dict(), "features_per_split": params.mtry(dim)}
    if isinstance(params, SvmParams):
        return {"family": "svm_rbf", **params.to_dict(), "gamma": params.gamma_for(dim)}
    raise TypeError(f"unsupported learner parameters {type(params).__name__}")


@dataclass
class EvalReport:
    confusion: ConfusionMatrix
    metrics: Metrics
    metadata: dict = field(default_factory=dict)
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "metadata": self.metadata,
            "degenerate_single_class": self.degenerate,
            "classes": list(self.confusion.classes),
            "confusion": self.confusion.counts.tolist(),
            "per_class": [
                {"class": label, **vars(m)} for label, m in self.metrics.per_class.items()
            ],
            "summary": {
                "tpr": self.metrics.tpr,
                "fpr": self.metrics.fpr,
                "precision": self.metrics.precision,
                "f1": self.metrics.f1,
                "n": self.confusion.total,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        meta = self.metadata
        lines = [f"# {k}: {json.dumps(meta[k], sort_keys=True)}" for k in sorted(meta)]
        if self.degenerate:
            lines.append("# WARNING: single-class data, metrics are trivial")
        width = max(8, *(len(c) for c in self.confusion.classes))
        lines.append(f"{'class':<{width}} {'support':>7} {'TPR':>6} {'FPR':>6} {'prec':>6} {'F1':>6}")
        for label, m in self.metrics.per_class.items():
            lines.append(
                f"{label:<{width}} {m.support:>7d} {m.tpr:6.3f} {m.fpr:6.3f} {m.precision:6.3f} {m.f1:6.3f}"
            )
        m = self.metrics
        lines.append(
            f"{'weighted':<{width}} {self.confusion.total:>7d} {m.tpr:6.3f} {m.fpr:6.3f} {m.precision:6.3f} {m.f1:6.3f}"
        )
        lines.append("")
        lines.append("confusion (rows = truth, columns = prediction)")
        cw = max(5, *(len(c) for c in self.confusion.classes))
        lines.append(" " * width + " " + " ".join(f"{c:>{cw}}" for c in self.confusion.classes))
        for label, row in zip(self.confusion.classes, self.confusion.counts):
            lines.append(f"{label:<{width}} " + " ".join(f"{v:>{cw}d}" for v in row))
        return "\n".join(lines) + "\n"


def _table_meta(t: FeatureTable) -> dict:
    return {"descriptor": t.kind.value, "config": t.config, "dim": t.dim}


def cross_validate(t: FeatureTable, k: int, params, seed: int = 0) -> EvalReport:
    """Stratified k-fold CV with all held-out predictions pooled into one matrix."""
    if k < 2:
        raise ValueError(f"need at least 2 folds, got {k}")
    if len(t) < k:
        raise ValueError(f"table has {len(t)} rows, fewer than {k} folds")
    classes = t.classes
    meta = {**_table_meta(t), "classifier": learner_info(params, t.dim), "folds": k, "seed": seed,
            "protocol": "cross-validation"}
    if len(classes) == 1:
        cm = confusion_matrix(t.labels, t.labels, classes)
        return EvalReport(cm, weighted_metrics(cm), meta, degenerate=True)

    folds = stratified_folds(t.labels, k, seed)
    pred: list[str | None] = [None] * len(t)
    for f in range(k):
        test_rows = np.flatnonzero(folds == f)
        if test_rows.size == 0:
            continue
        train_t = t.subset(np.flatnonzero(folds != f))
        test_t = t.subset(test_rows)
        for row, label in zip(test_rows, _fit_predict(train_t, test_t, params)):
            pred[row] = label
    cm = confusion_matrix(t.labels, pred, classes)
    return EvalReport(cm, weighted_metrics(cm), meta)


def _fit_predict(train_t: FeatureTable, test_t: FeatureTable, params) -> list[str]:
    if len(train_t.classes) == 1:
        return [train_t.classes[0]] * len(test_t)
    return train(train_t, params).predict_labels(test_t.X)


def holdout_evaluate(train_t: FeatureTable, test_t: FeatureTable, params, seed: int = 0) -> EvalReport:
    """Train once on ``train_t`` and score every row of ``test_t``."""
    if not train_t.same_schema(test_t):
        raise ValueError(
            f"schema mismatch: train is {train_t.kind.value}/{train_t.config}/{train_t.dim}, "
            f"test is {test_t.kind.value}/{test_t.config}/{test_t.dim}"
        )
    classes = sorted(set(train_t.labels) | set(test_t.labels))
    pred = _fit_predict(train_t, test_t, params)
    cm = confusion_matrix(test_t.labels, pred, classes)
    meta = {**_table_meta(train_t), "classifier": learner_info(params, train_t.dim), "seed": seed,
            "protocol": "hold-out"}
    return EvalReport(cm, weighted_metrics(cm), meta, degenerate=len(train_t.classes) == 1)


def model_evaluate(model, test_t: FeatureTable) -> EvalReport:
    """Score a saved model against a test table."""
    if (model.kind, model.config, model.dim) != (test_t.kind.value, test_t.config, test_t.dim):
        raise ValueError(
            f"schema mismatch: model is {model.kind}/{model.config}/{model.dim}, "
            f"test is {test_t.kind.value}/{test_t.config}/{test_t.dim}"
        )
    classes = sorted(set(model.classes) | set(test_t.labels))
    cm = confusion_matrix(test_t.labels, model.predict_labels(test_t.X), classes)
    meta = {**_table_meta(test_t), "classifier": {"family": model.family, **model.params},
            "seed": model.params.get("seed"), "protocol": "hold-out"}
    return EvalReport(cm, weighted_metrics(cm), meta, degenerate=len(model.classes) == 1)
