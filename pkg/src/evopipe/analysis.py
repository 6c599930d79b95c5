"""Comparison protocol: paired 5x2-cv runs of both fitness regimes, Wilcoxon
signed-rank with Bonferroni correction, and the diagnostic summaries (age,
|internal - external| difference, complexity, dominance)."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .data import Dataset, train_test_split
from .evolution import EvolutionConfig, InsufficientBudgetError, evolve
from .fitness import weighted_f1
from .pipeline import PipelineTree, fit_pipeline
from .fitness import kfold_score, PipelineFailure

BONFERRONI_MULTIPLIER = 3  # the protocol's three time budgets
ALPHA = 0.05
MIN_GENERATIONS = 2  # runs below this are excluded from aggregation


class InsufficientPairsError(ValueError):
    """Fewer than 5 nonzero paired differences."""


@dataclass(frozen=True)
class RunReport:
    dataset_name: str
    mode: str
    repeat: int  # 1..5
    half: int  # 1..2
    final_pipeline: str
    internal_score: float  # x-bar: lifetime/static CV mean of the final pick
    external_score: float  # mu: weighted F1 on the held-out test half
    age: int
    birth_generation: int
    generations_completed: int
    complexity: int
    evaluations: int
    wall_seconds: float
    failed: bool = False

    @property
    def difference(self) -> float:
        return difference(self.internal_score, self.external_score)

    def to_dict(self) -> dict:
        return {
            "dataset_name": self.dataset_name,
            "mode": self.mode,
            "repeat": self.repeat,
            "half": self.half,
            "final_pipeline": self.final_pipeline,
            "internal_score": self.internal_score,
            "external_score": self.external_score,
            "age": self.age,
            "birth_generation": self.birth_generation,
            "generations_completed": self.generations_completed,
            "complexity": self.complexity,
            "evaluations": self.evaluations,
            "wall_seconds": self.wall_seconds,
            "failed": self.failed,
        }

    @staticmethod
    def from_dict(d: dict) -> "RunReport":
        return RunReport(**d)


def difference(internal: float, external: float) -> float:
    """Absolute gap between the internal CV estimate and the test score."""
    return abs(internal - external)


def dominance_classify(a: tuple[float, float], b: tuple[float, float]) -> str:
    """'a_dominates' / 'b_dominates' / 'none' for (score up, complexity down)."""

    def dom(x, y):
        return x[0] >= y[0] and x[1] <= y[1] and (x[0] > y[0] or x[1] < y[1])

    if dom(a, b):
        return "a_dominates"
    if dom(b, a):
        return "b_dominates"
    return "none"


# ------------------------------------------------------------------ Wilcoxon


def _midranks(values: np.ndarray) -> np.ndarray:
    n = len(values)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(n)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j + 2) / 2.0
        i = j + 1
    return ranks


def wilcoxon_signed_rank(paired_diffs) -> tuple[float, float]:
    """(W, two-sided p) for the signed-rank test, zeros dropped.

    Exact p (distribution of the rank sum over all sign assignments, mid-rank
    ties included) for n <= 25; normal approximation with tie correction
    above. W is min(W+, W-).
    """
    d = np.asarray([x for x in paired_diffs if x != 0], dtype=float)
    n = len(d)
    if n < 5:
        raise InsufficientPairsError(f"need at least 5 nonzero pairs, got {n}")
    ranks = _midranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)

    if n <= 25:
        # DP over doubled ranks (mid-ranks are multiples of 0.5)
        r2 = np.rint(2 * ranks).astype(int)
        counts = np.zeros(int(r2.sum()) + 1, dtype=float)
        counts[0] = 1.0
        for r in r2:
            counts[r:] = counts[r:] + counts[:-r]
        w2 = int(round(2 * w))
        p = 2.0 * counts[: w2 + 1].sum() / counts.sum()
        return w, min(1.0, p)

    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    var -= float(((tie_counts**3 - tie_counts)).sum()) / 48.0
    z = (w - mean) / math.sqrt(var)
    p = 2.0 * 0.5 * math.erfc(-z / math.sqrt(2.0))
    return w, min(1.0, p)


def bonferroni(p: float, multiplier: int = BONFERRONI_MULTIPLIER) -> float:
    return min(1.0, multiplier * p)


# --------------------------------------------------------------- 5x2 harness


def _replicate_seeds(master_seed: int, repeat: int, half: int) -> tuple[int, int]:
    """(outer split seed, run master seed). Mode-independent, so the two
    regimes see identical splits and fold-seed sequences (paired design)."""
    split_seed = master_seed + 1_000_003 * repeat
    run_seed = master_seed + 7_919 * (2 * repeat + half)
    return split_seed, run_seed


def run_once(train: Dataset, test: Dataset, cfg: EvolutionConfig, *,
             dataset_name: str, repeat: int, half: int, workers: int = 1) -> RunReport:
    """One evolution run plus external scoring of its final pick."""
    try:
        result = evolve(cfg, train, workers=workers)
    except InsufficientBudgetError:
        return RunReport(dataset_name, cfg.mode, repeat, half, "", 0.0, 0.0, 0, 0, 0,
                         0, 0, 0.0, failed=True)
    fitted = fit_pipeline(result.final_tree, train, component_seed=cfg.master_seed)
    mu = weighted_f1(test.labels, fitted.predict(test.features), train.class_set)
    best = result.final_individual
    return RunReport(
        dataset_name=dataset_name,
        mode=cfg.mode,
        repeat=repeat,
        half=half,
        final_pipeline=result.final_tree.to_text(),
        internal_score=best.ledger.mean,
        external_score=mu,
        age=result.generations_completed - best.birth_generation,
        birth_generation=best.birth_generation,
        generations_completed=result.generations_completed,
        complexity=best.complexity,
        evaluations=result.evaluations_total,
        wall_seconds=result.wall_seconds,
        failed=result.generations_completed < MIN_GENERATIONS,
    )


def run_5x2(dataset: Dataset, cfg: EvolutionConfig, mode: str, *, workers: int = 1) -> list[RunReport]:
    """Five stratified halvings; each half serves once as training set."""
    reports = []
    for repeat in range(1, 6):
        split_seed, _ = _replicate_seeds(cfg.master_seed, repeat, 1)
        pair = train_test_split(dataset, 0.5, split_seed)
        for half, (train, test) in enumerate(
            [(pair.train, pair.test), (pair.test, pair.train)], start=1
        ):
            _, run_seed = _replicate_seeds(cfg.master_seed, repeat, half)
            run_cfg = replace(cfg, mode=mode, master_seed=run_seed)
            reports.append(
                run_once(train, test, run_cfg, dataset_name=dataset.name,
                         repeat=repeat, half=half, workers=workers)
            )
    return reports


def seed_sensitivity(a: PipelineTree, b: PipelineTree, train: Dataset, k: int = 5,
                     n_seeds: int = 30, base_seed: int = 0) -> list[dict]:
    """Per-seed k-fold scores for two pipelines (seed-sensitivity plot data)."""
    rows = []
    for s in range(n_seeds):
        seed = base_seed + s
        scores = {}
        for label, tree in (("score_a", a), ("score_b", b)):
            try:
                scores[label] = kfold_score(tree, train, k, seed)
            except PipelineFailure:
                scores[label] = 0.0
        rows.append({"seed": seed, **scores})
    return rows


# ------------------------------------------------------------ report builder


def _mode_summary(reports: list[RunReport]) -> dict:
    included = [r for r in reports if not r.failed]
    excluded = len(reports) - len(included)
    if not included:
        return {"n_included": 0, "n_excluded": excluded}
    mu = np.array([r.external_score for r in included])
    return {
        "n_included": len(included),
        "n_excluded": excluded,
        "mean_external": float(mu.mean()),
        "std_external": float(mu.std()),
        "mean_internal": float(np.mean([r.internal_score for r in included])),
        "mean_difference": float(np.mean([r.difference for r in included])),
        "mean_age": float(np.mean([r.age for r in included])),
        "mean_complexity": float(np.mean([r.complexity for r in included])),
        "mean_generations": float(np.mean([r.generations_completed for r in included])),
    }


def build_report(reports: list[RunReport], *, alpha: float = ALPHA,
                 bonferroni_multiplier: int = BONFERRONI_MULTIPLIER) -> dict:
    """Aggregate paired dynamic/static RunReports into a comparison document.

    Emits per-dataset mean/std of the external score for both modes,
    wins/losses/draws, the Wilcoxon test over per-dataset paired means with
    Bonferroni correction, diagnostic means, and the dominance tally.
    """
    by_dataset: dict[str, dict[str, list[RunReport]]] = {}
    for r in reports:
        by_dataset.setdefault(r.dataset_name, {}).setdefault(r.mode, []).append(r)

    datasets = {}
    paired_diffs = []
    wins = {"dynamic": 0, "static": 0, "draws": 0}
    dominance_tally = {"dynamic_dominates": 0, "static_dominates": 0, "none": 0}
    complete = 0
    for name in sorted(by_dataset):
        modes = by_dataset[name]
        entry = {m: _mode_summary(rs) for m, rs in modes.items()}
        if {"dynamic", "static"} <= set(modes) and all(
            entry[m]["n_included"] > 0 for m in ("dynamic", "static")
        ):
            complete += 1
            dyn, sta = entry["dynamic"], entry["static"]
            diff = dyn["mean_external"] - sta["mean_external"]
            paired_diffs.append(diff)
            if diff > 0:
                wins["dynamic"] += 1
            elif diff < 0:
                wins["static"] += 1
            else:
                wins["draws"] += 1
            dom = dominance_classify(
                (dyn["mean_external"], dyn["mean_complexity"]),
                (sta["mean_external"], sta["mean_complexity"]),
            )
            dom_name = {"a_dominates": "dynamic_dominates",
                        "b_dominates": "static_dominates",
                        "none": "none"}[dom]
            dominance_tally[dom_name] += 1
            entry["dominance"] = dom_name
        datasets[name] = entry

    if complete == 0:
        raise ValueError("no dataset with complete paired results for both modes")

    try:
        w, p = wilcoxon_signed_rank(paired_diffs)
        wilcoxon = {
            "W": w,
            "p_value": p,
            "corrected_p": bonferroni(p, bonferroni_multiplier),
            "significant": bonferroni(p, bonferroni_multiplier) < alpha,
        }
    except InsufficientPairsError as e:
        wilcoxon = {"error": str(e)}

    return {
        "alpha": alpha,
        "bonferroni_multiplier": bonferroni_multiplier,
        "n_datasets": len(datasets),
        "n_complete_datasets": complete,
        "datasets": datasets,
        "wins": wins,
        "wilcoxon": wilcoxon,
        "dominance_tally": dominance_tally,
        "runs": [r.to_dict() for r in reports],
    }
