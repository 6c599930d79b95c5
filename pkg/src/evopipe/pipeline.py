"""Pipelines as estimator-rooted trees: a transformer chain feeding one
classifier root. Complexity (objective 2) is the total component count."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from . import components as comp
from ._rng import spawn_rng
from .data import Dataset

DEFAULT_MAX_DEPTH = 6


class PipelineError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineTree:
    root: comp.ComponentSpec
    chain: tuple[comp.ComponentSpec, ...] = ()  # applied first-to-last before root
    max_depth: int = DEFAULT_MAX_DEPTH

    def __post_init__(self):
        if self.root.kind != comp.CLASSIFIER:
            raise PipelineError("pipeline root must be a classifier")
        for c in self.chain:
            if c.kind != comp.TRANSFORMER:
                raise PipelineError("chain components must be transformers")
        if not 1 <= self.complexity <= self.max_depth:
            raise PipelineError(
                f"complexity {self.complexity} outside [1, {self.max_depth}]"
            )

    @property
    def complexity(self) -> int:
        return 1 + len(self.chain)

    def to_text(self) -> str:
        parts = [_spec_text(self.root)] + [_spec_text(c) for c in self.chain]
        return " <- ".join(parts)

    def __str__(self) -> str:
        return self.to_text()


def _spec_text(spec: comp.ComponentSpec) -> str:
    inner = ",".join(f"{k}={v}" for k, v in sorted(spec.params.items()))
    return f"{spec.name}({inner})"


_SPEC_RE = re.compile(r"^\s*([a-z_0-9]+)\(([^)]*)\)\s*$")


def _parse_spec(text: str) -> comp.ComponentSpec:
    m = _SPEC_RE.match(text)
    if not m:
        raise PipelineError(f"cannot parse component {text!r}")
    name, inner = m.group(1), m.group(2)
    kind, grid, _ = comp._registry_entry(name)
    params = {}
    for pair in filter(None, (p.strip() for p in inner.split(","))):
        if "=" not in pair:
            raise PipelineError(f"bad hyperparameter syntax {pair!r} in {text!r}")
        k, v = pair.split("=", 1)
        if k not in grid:
            raise PipelineError(f"{name!r} has no hyperparameter {k!r}")
        # recover the typed grid value from its text form
        matches = [g for g in grid[k] if str(g) == v]
        if not matches:
            raise PipelineError(f"{name}.{k}={v!r} not in grid {list(grid[k])}")
        params[k] = matches[0]
    return comp.ComponentSpec(kind, name, tuple(sorted(params.items())))


def parse_pipeline(text: str, max_depth: int = DEFAULT_MAX_DEPTH) -> PipelineTree:
    """Inverse of PipelineTree.to_text()."""
    parts = text.split("<-")
    specs = [_parse_spec(p) for p in parts]
    return PipelineTree(specs[0], tuple(specs[1:]), max_depth)


@dataclass(frozen=True)
class Individual:
    """A pipeline plus its birth generation and lifetime score ledger."""

    tree: PipelineTree
    birth_generation: int
    id: int
    ledger: "ScoreLedger" = field(default_factory=lambda: _empty_ledger())

    @property
    def complexity(self) -> int:
        return self.tree.complexity


def _empty_ledger():
    from .fitness import ScoreLedger

    return ScoreLedger()


# ---------------------------------------------------------------- generation


def _random_spec(name: str, rng: np.random.Generator) -> comp.ComponentSpec:
    kind, grid, _ = comp._registry_entry(name)
    params = {p: grid[p][int(rng.integers(len(grid[p])))] for p in sorted(grid)}
    return comp.ComponentSpec(kind, name, tuple(sorted(params.items())))


def random_pipeline(rng_seed: int, max_depth: int = DEFAULT_MAX_DEPTH) -> PipelineTree:
    """Uniform random tree: chain length in [0, max_depth-1], components and
    hyperparameters uniform over the registry grids."""
    rng = spawn_rng(rng_seed, 0x9E4E)
    classifiers = comp.classifier_names()
    transformers = comp.transformer_names()
    root = _random_spec(classifiers[int(rng.integers(len(classifiers)))], rng)
    chain_len = int(rng.integers(max_depth))
    chain = tuple(
        _random_spec(transformers[int(rng.integers(len(transformers)))], rng)
        for _ in range(chain_len)
    )
    return PipelineTree(root, chain, max_depth)


def _resample_param(spec: comp.ComponentSpec, rng) -> comp.ComponentSpec | None:
    """New spec with one hyperparameter changed to a different grid value."""
    _, grid, _ = comp._registry_entry(spec.name)
    mutable = [p for p in sorted(grid) if len(grid[p]) > 1]
    if not mutable:
        return None
    p = mutable[int(rng.integers(len(mutable)))]
    current = spec.params[p]
    choices = [v for v in grid[p] if v != current]
    value = choices[int(rng.integers(len(choices)))]
    params = spec.params
    params[p] = value
    return comp.ComponentSpec(spec.kind, spec.name, tuple(sorted(params.items())))


def mutate(t: PipelineTree, rng_seed: int, max_depth: int | None = None) -> PipelineTree:
    """One uniform edit: hyperparameter resample, same-kind component swap,
    chain insertion, or chain deletion. Always returns a tree != t."""
    max_depth = max_depth if max_depth is not None else t.max_depth
    rng = spawn_rng(rng_seed, 0x3017)
    all_specs = [t.root, *t.chain]

    edits = []
    if any(_has_mutable_param(s) for s in all_specs):
        edits.append("param")
    if len(comp.classifier_names()) > 1 or (t.chain and len(comp.transformer_names()) > 1):
        edits.append("swap")
    if t.complexity < max_depth:
        edits.append("insert")
    if t.chain:
        edits.append("delete")

    edit = edits[int(rng.integers(len(edits)))]
    chain = list(t.chain)
    if edit == "param":
        candidates = [i for i, s in enumerate(all_specs) if _has_mutable_param(s)]
        i = candidates[int(rng.integers(len(candidates)))]
        new_spec = _resample_param(all_specs[i], rng)
        if i == 0:
            return PipelineTree(new_spec, t.chain, max_depth)
        chain[i - 1] = new_spec
        return PipelineTree(t.root, tuple(chain), max_depth)
    if edit == "swap":
        positions = [0] if len(comp.classifier_names()) > 1 else []
        if len(comp.transformer_names()) > 1:
            positions += [i + 1 for i in range(len(chain))]
        i = positions[int(rng.integers(len(positions)))]
        if i == 0:
            names = [n for n in comp.classifier_names() if n != t.root.name]
            return PipelineTree(_random_spec(names[int(rng.integers(len(names)))], rng), t.chain, max_depth)
        names = [n for n in comp.transformer_names() if n != chain[i - 1].name]
        chain[i - 1] = _random_spec(names[int(rng.integers(len(names)))], rng)
        return PipelineTree(t.root, tuple(chain), max_depth)
    if edit == "insert":
        pos = int(rng.integers(len(chain) + 1))
        names = comp.transformer_names()
        chain.insert(pos, _random_spec(names[int(rng.integers(len(names)))], rng))
        return PipelineTree(t.root, tuple(chain), max_depth)
    # delete
    pos = int(rng.integers(len(chain)))
    del chain[pos]
    return PipelineTree(t.root, tuple(chain), max_depth)


def _has_mutable_param(spec: comp.ComponentSpec) -> bool:
    _, grid, _ = comp._registry_entry(spec.name)
    return any(len(v) > 1 for v in grid.values())


def crossover(a: PipelineTree, b: PipelineTree, rng_seed: int, max_depth: int | None = None) -> PipelineTree:
    """One-point chain splice: child chain = a.chain[:cut] + b.chain[cut:],
    root from a uniformly chosen parent; tail truncated to fit max_depth."""
    max_depth = max_depth if max_depth is not None else a.max_depth
    rng = spawn_rng(rng_seed, 0xC505)
    root = a.root if rng.integers(2) == 0 else b.root
    cut = int(rng.integers(max(len(a.chain), len(b.chain)) + 1))
    chain = (a.chain[:cut] + b.chain[cut:])[: max_depth - 1]
    return PipelineTree(root, chain, max_depth)


# ----------------------------------------------------------------- execution


@dataclass(frozen=True)
class FittedPipeline:
    tree: PipelineTree
    stages: tuple[comp.FittedComponent, ...]  # chain transformers, fitted
    head: comp.FittedComponent  # fitted root classifier

    def predict(self, features: np.ndarray) -> np.ndarray:
        X = np.asarray(features, dtype=np.float64)
        for stage in self.stages:
            X = comp.transform(stage, X)
        return comp.predict(self.head, X)


def fit_pipeline(t: PipelineTree, train: Dataset, component_seed: int = 0) -> FittedPipeline:
    """Fit chain transformers sequentially on progressively transformed
    training data, then the root classifier on the final representation."""
    X = train.features
    stages = []
    current = train
    for i, spec in enumerate(t.chain):
        fitted = comp.fit(spec, current, component_seed + i)
        X = comp.transform(fitted, current.features)
        current = Dataset(X, current.labels, current.class_set, dict(current.class_counts), current.name)
        stages.append(fitted)
    head = comp.fit(t.root, current, component_seed + len(t.chain))
    return FittedPipeline(t, tuple(stages), head)


def execute(t: PipelineTree, internal_train: Dataset, internal_test: Dataset, component_seed: int = 0) -> np.ndarray:
    """Train the pipeline on internal_train and predict internal_test labels."""
    if internal_train.n_features != internal_test.n_features:
        raise PipelineError("train and test feature arity differ")
    return fit_pipeline(t, internal_train, component_seed).predict(internal_test.features)
