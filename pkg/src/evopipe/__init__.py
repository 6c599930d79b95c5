"""Evolutionary search over preprocessing+classifier pipelines.

Two fitness regimes are supported: a static single k-fold score fixed for an
individual's whole life, and a dynamic regime where every generation re-scores
the population under a fresh fold seed and fitness is the mean over the
individual's lifetime ledger.
"""

from .data import Dataset, FoldPlan, SplitPair, fold_views, load_csv, stratified_kfold, train_test_split
from .pipeline import Individual, PipelineTree, crossover, execute, fit_pipeline, mutate, parse_pipeline, random_pipeline
from .fitness import Fitness, PipelineFailure, ScoreLedger, kfold_score, record_generation, static_fitness, weighted_f1
from .evolution import (
    EvolutionConfig,
    EvolveResult,
    GenerationLog,
    InsufficientBudgetError,
    crowding_distance,
    evaluation_count,
    evolve,
    fast_nondominated_sort,
    nsga2_select,
)
from .analysis import RunReport, build_report, difference, dominance_classify, run_5x2, seed_sensitivity, wilcoxon_signed_rank
from .estimator import PipelineSearchClassifier

__all__ = [
    "Dataset",
    "SplitPair",
    "FoldPlan",
    "load_csv",
    "train_test_split",
    "stratified_kfold",
    "fold_views",
    "PipelineTree",
    "Individual",
    "random_pipeline",
    "mutate",
    "crossover",
    "execute",
    "fit_pipeline",
    "parse_pipeline",
    "ScoreLedger",
    "Fitness",
    "PipelineFailure",
    "weighted_f1",
    "kfold_score",
    "record_generation",
    "static_fitness",
    "EvolutionConfig",
    "GenerationLog",
    "EvolveResult",
    "InsufficientBudgetError",
    "fast_nondominated_sort",
    "crowding_distance",
    "nsga2_select",
    "evolve",
    "evaluation_count",
    "RunReport",
    "run_5x2",
    "difference",
    "wilcoxon_signed_rank",
    "dominance_classify",
    "build_report",
    "seed_sensitivity",
    "PipelineSearchClassifier",
]

__version__ = "0.1.0"
