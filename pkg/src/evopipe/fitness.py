"""Scoring: support-weighted F1 on a 0-100 scale, seeded k-fold evaluation,
and the lifetime score ledger backing the dynamic fitness regime."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, fold_views, stratified_kfold
from .pipeline import Individual, PipelineTree, execute


class PipelineFailure(RuntimeError):
    """A pipeline could not be trained/scored on some fold."""


class LedgerError(ValueError):
    """Non-contiguous generation recorded into a score ledger."""


@dataclass(frozen=True)
class ScoreLedger:
    """Per-generation k-fold scores over an individual's lifetime.

    Entries are (generation, score) with generations consecutive from the
    individual's birth. The lifetime mean of the scores is the dynamic
    objective-1 value.
    """

    entries: tuple[tuple[int, float], ...] = ()
    failed: bool = False

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def mean(self) -> float:
        if not self.entries:
            return 0.0
        return float(np.mean([s for _, s in self.entries]))

    def append(self, generation: int, score: float) -> "ScoreLedger":
        if self.entries and generation != self.entries[-1][0] + 1:
            raise LedgerError(
                f"generation {generation} breaks ledger continuity "
                f"(last entry at {self.entries[-1][0]})"
            )
        return ScoreLedger(self.entries + ((generation, float(score)),), self.failed)


@dataclass(frozen=True)
class Fitness:
    objective1: float  # score in [0, 100], maximized
    objective2: int  # component count, minimized

    def dominates(self, other: "Fitness") -> bool:
        return (
            self.objective1 >= other.objective1
            and self.objective2 <= other.objective2
            and (self.objective1 > other.objective1 or self.objective2 < other.objective2)
        )


def failure_fitness(max_depth: int) -> Fitness:
    """Sentinel assigned to pipelines that failed on any fold."""
    return Fitness(0.0, max_depth + 1)


def weighted_f1(y_true, y_pred, class_set) -> float:
    """Support-weighted F1, scaled to [0, 100].

    Per class: f1 = 2pr/(p+r), with f1 := 0 whenever the class has no
    predicted positives, no true positives, or p + r = 0.
    """
    y_true = np.asarray(y_true, dtype=object)
    y_pred = np.asarray(y_pred, dtype=object)
    if len(y_true) == 0:
        raise ValueError("empty label vectors")
    if len(y_true) != len(y_pred):
        raise ValueError(f"length mismatch: {len(y_true)} vs {len(y_pred)}")
    known = set(class_set)
    for v in np.concatenate([y_true, y_pred]):
        if v not in known:
            raise ValueError(f"label {v!r} not in class_set")

    total = 0.0
    for c in class_set:
        support = int(np.sum(y_true == c))
        if support == 0:
            continue
        tp = int(np.sum((y_true == c) & (y_pred == c)))
        pred_pos = int(np.sum(y_pred == c))
        if tp == 0:
            continue  # f1 is 0 with zero weight contribution
        precision = tp / pred_pos
        recall = tp / support
        total += support * (2.0 * precision * recall / (precision + recall))
    return 100.0 * total / len(y_true)


def kfold_score(t: PipelineTree, train: Dataset, k: int, fold_seed: int) -> float:
    """Mean weighted F1 over the k internal folds of a seeded stratified plan.

    Raises PipelineFailure if the pipeline fails on any fold.
    """
    plan = stratified_kfold(train, k, fold_seed)
    scores = []
    for i in range(k):
        inner_train, inner_test = fold_views(train, plan, i)
        try:
            preds = execute(t, inner_train, inner_test, component_seed=fold_seed)
        except PipelineFailure:
            raise
        except Exception as e:
            raise PipelineFailure(f"pipeline {t} failed on fold {i}: {e}") from e
        scores.append(weighted_f1(inner_test.labels, preds, train.class_set))
    return float(np.mean(scores))


def record_generation(ind: Individual, score: float, generation: int) -> Individual:
    """Append a generation score; the ledger must stay contiguous from birth."""
    if not ind.ledger.entries and generation != ind.birth_generation:
        raise LedgerError(
            f"first entry must be at birth generation {ind.birth_generation}, got {generation}"
        )
    return Individual(ind.tree, ind.birth_generation, ind.id, ind.ledger.append(generation, score))


def individual_fitness(ind: Individual, max_depth: int) -> Fitness:
    if ind.ledger.failed:
        return failure_fitness(max_depth)
    return Fitness(ind.ledger.mean, ind.tree.complexity)


def static_fitness(t: PipelineTree, train: Dataset, k: int, fold_seed: int = 0) -> Fitness:
    """Single fixed-seed k-fold fitness (the static baseline regime)."""
    try:
        score = kfold_score(t, train, k, fold_seed)
    except PipelineFailure:
        return failure_fitness(t.max_depth)
    return Fitness(score, t.complexity)
