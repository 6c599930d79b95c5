import numpy as np
import pytest

from evopipe import components as comp
from evopipe.data import Dataset, stratified_kfold, fold_views
from evopipe.pipeline import (
    PipelineError,
    PipelineTree,
    crossover,
    execute,
    fit_pipeline,
    mutate,
    parse_pipeline,
    random_pipeline,
)
from conftest import make_gaussian_dataset


def bare(name, **params):
    return PipelineTree(comp.ComponentSpec.make(name, **params))


def chained(root_name, *chain_names):
    return PipelineTree(
        comp.ComponentSpec.make(root_name),
        tuple(comp.ComponentSpec.make(n) for n in chain_names),
    )


class TestTree:
    def test_complexity_is_component_count(self):
        t = chained("decision_tree", "standard_scaler", "pca")
        assert t.complexity == 3

    def test_transformer_root_rejected(self):
        with pytest.raises(PipelineError):
            PipelineTree(comp.ComponentSpec.make("standard_scaler"))

    def test_classifier_in_chain_rejected(self):
        with pytest.raises(PipelineError):
            PipelineTree(
                comp.ComponentSpec.make("decision_tree"),
                (comp.ComponentSpec.make("majority_class"),),
            )

    def test_depth_bound_enforced(self):
        chain = tuple(comp.ComponentSpec.make("standard_scaler") for _ in range(6))
        with pytest.raises(PipelineError):
            PipelineTree(comp.ComponentSpec.make("majority_class"), chain)

    def test_text_roundtrip(self):
        for seed in range(25):
            t = random_pipeline(seed)
            back = parse_pipeline(t.to_text())
            assert back == t, t.to_text()


class TestRandomPipeline:
    def test_complexity_bounds(self):
        for seed in range(50):
            assert 1 <= random_pipeline(seed).complexity <= 6

    def test_deterministic(self):
        assert random_pipeline(42) == random_pipeline(42)

    def test_classifier_diversity(self):
        roots = {random_pipeline(s).root.name for s in range(1000)}
        assert len(roots) >= 2


class TestMutate:
    def test_bare_parameterless_root(self):
        t = bare("gaussian_naive_bayes")
        for seed in range(30):
            child = mutate(t, seed)
            assert child != t
            assert child.complexity in (1, 2)

    def test_full_tree_never_exceeds_bound(self):
        t = chained("decision_tree", *["standard_scaler"] * 5)
        assert t.complexity == 6
        for seed in range(30):
            assert mutate(t, seed).complexity <= 6

    def test_deterministic(self):
        t = random_pipeline(9)
        assert mutate(t, 123) == mutate(t, 123)

    def test_always_differs_and_valid(self):
        for seed in range(60):
            t = random_pipeline(seed)
            child = mutate(t, seed * 31 + 1)
            assert child != t
            assert 1 <= child.complexity <= 6
            assert child.root.kind == comp.CLASSIFIER


class TestCrossover:
    def test_identical_parents_give_identical_child(self):
        t = chained("decision_tree", "standard_scaler", "pca")
        for seed in range(20):
            assert crossover(t, t, seed) == t

    def test_empty_chains(self):
        a, b = bare("decision_tree"), bare("majority_class")
        for seed in range(10):
            child = crossover(a, b, seed)
            assert child.chain == ()
            assert child.root in (a.root, b.root)

    def test_length_clamp(self):
        a = chained("decision_tree", *["standard_scaler"] * 3)
        b = chained("majority_class", *["min_max_scaler"] * 4)
        for seed in range(30):
            assert len(crossover(a, b, seed).chain) <= 5

    def test_deterministic(self):
        a, b = random_pipeline(1), random_pipeline(2)
        assert crossover(a, b, 7) == crossover(a, b, 7)


class TestExecute:
    def test_majority_modal_label(self, two_class_10):
        preds = execute(bare("majority_class"), two_class_10, two_class_10)
        assert set(preds) == {"A"}

    def test_scaled_knn_recovers_subset(self, small_dataset):
        t = chained("k_nearest_neighbors", "standard_scaler")
        t = PipelineTree(
            comp.ComponentSpec.make("k_nearest_neighbors", k=1, weights="uniform"),
            t.chain,
        )
        sub = small_dataset.subset(np.arange(10))
        preds = execute(t, small_dataset, sub)
        assert np.array_equal(preds, sub.labels)

    def test_constant_column_removal_matches_manual_removal(self):
        d = make_gaussian_dataset(n_rows=50, n_features=3, seed=8)
        with_const = Dataset.from_arrays(
            np.column_stack([d.features, np.full(50, 7.0)]), d.labels
        )
        t_clean = PipelineTree(
            comp.ComponentSpec.make("decision_tree", max_depth=4, min_leaf=1)
        )
        t_vt = PipelineTree(
            t_clean.root, (comp.ComponentSpec.make("variance_threshold", threshold=0),)
        )
        assert np.array_equal(
            execute(t_vt, with_const, with_const), execute(t_clean, d, d)
        )

    def test_arity_mismatch(self, small_dataset):
        other = make_gaussian_dataset(n_rows=20, n_features=7, seed=1)
        with pytest.raises(PipelineError):
            execute(bare("majority_class"), small_dataset, other)

    def test_row_order_invariance_up_to_permutation(self, small_dataset):
        t = chained("gaussian_naive_bayes", "standard_scaler")
        perm = np.random.default_rng(0).permutation(small_dataset.n_rows)
        shuffled = small_dataset.subset(perm)
        a = execute(t, small_dataset, small_dataset)
        b = execute(t, small_dataset, shuffled)
        assert np.array_equal(a[perm], b)

    def test_fit_pipeline_predict_matches_execute(self, small_dataset):
        t = chained("logistic_regression", "min_max_scaler")
        fitted = fit_pipeline(t, small_dataset, component_seed=0)
        assert np.array_equal(
            fitted.predict(small_dataset.features),
            execute(t, small_dataset, small_dataset, component_seed=0),
        )
