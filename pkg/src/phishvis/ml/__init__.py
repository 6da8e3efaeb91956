"""Random forest and RBF-SVM classifiers over feature tables."""

from __future__ import annotations

import numpy as np

from ..corpus import FeatureTable
from ..errors import TrainingError
from .forest import RandomForestParams, Tree, fit_forest, pack_trees
from .model import TrainedModel, model_roundtrip
from .svm import SvmParams, fit_svm

__all__ = [
    "RandomForestParams",
    "SvmParams",
    "TrainedModel",
    "Tree",
    "forest_model",
    "model_roundtrip",
    "predict",
    "train",
    "train_random_forest",
    "train_svm_rbf",
]


def _encode(t: FeatureTable) -> tuple[list[str], np.ndarray]:
    classes = t.classes
    index = {c: i for i, c in enumerate(classes)}
    return classes, np.array([index[l] for l in t.labels], dtype=np.int64)


def forest_model(trees, classes, kind="SCD", config="1", dim=None, params=None) -> TrainedModel:
    """Wrap explicit trees in a model (handy for hand-built forests)."""
    trees = list(trees)
    if dim is None:
        dim = int(max(t.feature.max() for t in trees)) + 1
    return TrainedModel(
        "random_forest", str(kind), config, dim, list(classes),
        params or {"n_trees": len(trees)}, pack_trees(trees),
    )


def train_random_forest(t: FeatureTable, p: RandomForestParams = RandomForestParams()) -> TrainedModel:
    if len(t) == 0:
        raise TrainingError("cannot train on an empty feature table")
    classes, y = _encode(t)
    trees = fit_forest(t.X, y, len(classes), p)
    params = dict(p.to_dict(), features_per_split=p.mtry(t.dim))
    return TrainedModel(
        "random_forest", t.kind.value, t.config, t.dim, classes, params, pack_trees(trees)
    )


def train_svm_rbf(t: FeatureTable, p: SvmParams = SvmParams()) -> TrainedModel:
    if len(t) == 0:
        raise TrainingError("cannot train on an empty feature table")
    classes, y = _encode(t)
    arrays = fit_svm(t.X, y, len(classes), p)
    params = dict(p.to_dict(), gamma=p.gamma_for(t.dim))
    return TrainedModel("svm_rbf", t.kind.value, t.config, t.dim, classes, params, arrays)


def train(t: FeatureTable, params) -> TrainedModel:
    if isinstance(params, RandomForestParams):
        return train_random_forest(t, params)
    if isinstance(params, SvmParams):
        return train_svm_rbf(t, params)
    raise TypeError(f"unsupported learner parameters {type(params).__name__}")


def predict(m: TrainedModel, v) -> tuple[str, dict[str, float]]:
    return m.predict(v)
