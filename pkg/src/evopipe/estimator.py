"""Estimator-style facade over the evolution engine (fit/predict/get_params),
so the searcher drops into code that expects the scikit-learn protocol."""

from __future__ import annotations

import inspect

import numpy as np

from .data import Dataset
from .evolution import EvolutionConfig, evolve
from .fitness import weighted_f1
from .pipeline import fit_pipeline
from .validation import check_feature_matrix, check_X_y


class PipelineSearchClassifier:
    """Searches preprocessing+classifier pipelines and behaves as the best one.

    Parameters mirror EvolutionConfig; ``mode`` picks the fitness regime
    ("dynamic" lifetime mean or "static" single k-fold).
    """

    def __init__(self, population_size=24, offspring_size=None, k=5,
                 generations=20, time_budget_seconds=None, mode="dynamic",
                 seed=0, max_depth=6, workers=1):
        self.population_size = population_size
        self.offspring_size = offspring_size
        self.k = k
        self.generations = generations
        self.time_budget_seconds = time_budget_seconds
        self.mode = mode
        self.seed = seed
        self.max_depth = max_depth
        self.workers = workers

    # -- scikit-learn parameter protocol -------------------------------------

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [p for p in sig.parameters if p != "self"]

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(f"invalid parameter {name!r} for {type(self).__name__}")
            setattr(self, name, value)
        return self

    # -- fitting --------------------------------------------------------------

    def _config(self) -> EvolutionConfig:
        return EvolutionConfig(
            population_size=self.population_size,
            offspring_size=self.offspring_size,
            k=self.k,
            max_generations=self.generations,
            time_budget_seconds=self.time_budget_seconds,
            mode=self.mode,
            master_seed=self.seed,
            max_depth=self.max_depth,
        )

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        train = Dataset.from_arrays(X, y)
        result = evolve(self._config(), train, workers=self.workers)
        self.classes_ = np.asarray(train.class_set, dtype=object)
        self.best_pipeline_ = result.final_tree
        self.best_individual_ = result.final_individual
        self.internal_score_ = result.final_individual.ledger.mean
        self.generation_logs_ = result.logs
        self.evaluations_ = result.evaluations_total
        self.fitted_pipeline_ = fit_pipeline(result.final_tree, train, component_seed=self.seed)
        return self

    def predict(self, X):
        self._check_fitted()
        X = check_feature_matrix(X)
        return self.fitted_pipeline_.predict(X)

    def score(self, X, y):
        """Weighted F1 of predictions, on the same [0, 100] scale the search uses."""
        self._check_fitted()
        X, y = check_X_y(X, y)
        return weighted_f1(y, self.fitted_pipeline_.predict(X), list(self.classes_))

    def _check_fitted(self):
        if not hasattr(self, "fitted_pipeline_"):
            raise RuntimeError("estimator is not fitted; call fit(X, y) first")
