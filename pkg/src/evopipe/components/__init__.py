"""Component registry: named classifiers and transformers with discrete
hyperparameter grids, plus fit/predict/transform over Dataset values.

The registry contents and grids are part of the public config vocabulary;
changing a name or a grid value is a breaking change.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from ..data import Dataset
from . import classifiers as _cls
from . import transformers as _tf

CLASSIFIER = "classifier"
TRANSFORMER = "transformer"


class ComponentError(ValueError):
    """Invalid spec, grid violation, or arity mismatch."""


@dataclass(frozen=True)
class ComponentSpec:
    kind: str
    name: str
    hyperparameters: tuple[tuple[str, Any], ...] = ()

    def __post_init__(self):
        if self.name not in _REGISTRY:
            raise ComponentError(f"unknown component {self.name!r}")
        kind, grid, _ = _REGISTRY[self.name]
        if self.kind != kind:
            raise ComponentError(f"{self.name!r} is a {kind}, not a {self.kind}")
        params = dict(self.hyperparameters)
        if set(params) != set(grid):
            raise ComponentError(
                f"{self.name!r} expects hyperparameters {sorted(grid)}, got {sorted(params)}"
            )
        for pname, value in params.items():
            if value not in grid[pname]:
                raise ComponentError(
                    f"{self.name!r}.{pname}={value!r} not in grid {list(grid[pname])}"
                )

    @property
    def params(self) -> dict[str, Any]:
        return dict(self.hyperparameters)

    @staticmethod
    def make(name: str, **params) -> "ComponentSpec":
        kind, grid, _ = _registry_entry(name)
        filled = {p: params.get(p, grid[p][0]) for p in grid}
        return ComponentSpec(kind, name, tuple(sorted(filled.items())))


@dataclass(frozen=True)
class FittedComponent:
    spec: ComponentSpec
    model: Any
    input_arity: int
    class_set: tuple[str, ...]  # training class order; empty for transformers


# name -> (kind, grid, implementation class). Ordering here is the public,
# documented registry order.
_REGISTRY: dict[str, tuple[str, dict[str, tuple], type]] = {
    "decision_tree": (
        CLASSIFIER,
        {"max_depth": (2, 4, 8, 16), "min_leaf": (1, 5, 20)},
        _cls.DecisionTree,
    ),
    "k_nearest_neighbors": (
        CLASSIFIER,
        {"k": (1, 3, 5, 7), "weights": ("uniform", "distance")},
        _cls.KNearestNeighbors,
    ),
    "gaussian_naive_bayes": (CLASSIFIER, {}, _cls.GaussianNaiveBayes),
    "logistic_regression": (CLASSIFIER, {"l2": (0.01, 0.1, 1, 10)}, _cls.LogisticRegression),
    "majority_class": (CLASSIFIER, {}, _cls.MajorityClass),
    "standard_scaler": (TRANSFORMER, {}, _tf.StandardScaler),
    "min_max_scaler": (TRANSFORMER, {}, _tf.MinMaxScaler),
    "variance_threshold": (TRANSFORMER, {"threshold": (0, 0.05, 0.1)}, _tf.VarianceThreshold),
    "pca": (TRANSFORMER, {"n_components": (2, 5, 10)}, _tf.PCA),
    "select_k_best": (TRANSFORMER, {"k": (2, 5, 10)}, _tf.SelectKBest),
}

def _registry_entry(name: str):
    if name not in _REGISTRY:
        raise ComponentError(f"unknown component {name!r}")
    return _REGISTRY[name]


def registry_list() -> list[tuple[str, str, dict[str, tuple]]]:
    """(name, kind, grid) triples in the fixed registry order."""
    return [(name, kind, dict(grid)) for name, (kind, grid, _) in _REGISTRY.items()]


def classifier_names() -> list[str]:
    return [n for n, (kind, _, _) in _REGISTRY.items() if kind == CLASSIFIER]


def transformer_names() -> list[str]:
    return [n for n, (kind, _, _) in _REGISTRY.items() if kind == TRANSFORMER]


def fit(spec: ComponentSpec, train: Dataset, component_seed: int) -> FittedComponent:
    """Fit a component on a dataset. Deterministic given (spec, data, seed)."""
    if train.n_rows == 0:
        raise ComponentError("cannot fit on an empty dataset")
    _, _, impl = _registry_entry(spec.name)
    model = impl(**spec.params)
    model.fit(
        train.features, train.label_indices(), len(train.class_set), component_seed
    )
    classes = train.class_set if spec.kind == CLASSIFIER else ()
    return FittedComponent(spec, model, train.n_features, classes)


def _check_arity(m: FittedComponent, features: np.ndarray):
    if features.ndim != 2 or features.shape[1] != m.input_arity:
        got = features.shape[1] if features.ndim == 2 else "non-matrix"
        raise ComponentError(
            f"{m.spec.name}: expected {m.input_arity} feature columns, got {got}"
        )


def predict(m: FittedComponent, features: np.ndarray) -> np.ndarray:
    """Predicted labels (strings from the training class_set)."""
    if m.spec.kind != CLASSIFIER:
        raise ComponentError(f"{m.spec.name} is not a classifier")
    _check_arity(m, features)
    idx = m.model.predict(np.asarray(features, dtype=np.float64))
    classes = np.asarray(m.class_set, dtype=object)
    return classes[idx]


def transform(m: FittedComponent, features: np.ndarray) -> np.ndarray:
    if m.spec.kind != TRANSFORMER:
        raise ComponentError(f"{m.spec.name} is not a transformer")
    _check_arity(m, features)
    return m.model.transform(np.asarray(features, dtype=np.float64))
