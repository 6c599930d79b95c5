import numpy as np
import pytest

from evopipe.data import Dataset


def make_gaussian_dataset(n_rows=100, n_features=4, n_classes=2, seed=0,
                          label_noise=0.0, separation=2.0, name="synthetic"):
    """Gaussian cluster per class, optional fraction of flipped labels."""
    rng = np.random.default_rng(seed)
    per_class = [n_rows // n_classes] * n_classes
    for i in range(n_rows - sum(per_class)):
        per_class[i] += 1
    rows, labels = [], []
    for c, count in enumerate(per_class):
        center = rng.normal(scale=separation, size=n_features)
        rows.append(center + rng.normal(size=(count, n_features)))
        labels.extend([f"c{c}"] * count)
    X = np.vstack(rows)
    y = np.asarray(labels, dtype=object)
    if label_noise > 0:
        n_flip = int(round(label_noise * n_rows))
        flip_idx = rng.choice(n_rows, size=n_flip, replace=False)
        for i in flip_idx:
            others = [f"c{c}" for c in range(n_classes) if f"c{c}" != y[i]]
            y[i] = others[rng.integers(len(others))]
    order = rng.permutation(n_rows)
    return Dataset.from_arrays(X[order], y[order], name=name)


@pytest.fixture
def small_dataset():
    return make_gaussian_dataset(n_rows=60, n_features=4, seed=7)


@pytest.fixture
def two_class_10():
    """10 rows, 6 of class A, 4 of class B (the worked split example)."""
    X = np.arange(20, dtype=float).reshape(10, 2)
    y = ["A"] * 6 + ["B"] * 4
    return Dataset.from_arrays(X, y)
