"""Native feature transformers. Each keeps at least one output column."""

from __future__ import annotations

import numpy as np


class StandardScaler:
    def fit(self, X, y, n_classes, seed):
        self.mean_ = X.mean(axis=0)
        sd = X.std(axis=0)
        self.scale_ = np.where(sd > 0, sd, 1.0)  # zero-variance guard
        return self

    def transform(self, X):
        return (X - self.mean_) / self.scale_


class MinMaxScaler:
    def fit(self, X, y, n_classes, seed):
        self.min_ = X.min(axis=0)
        span = X.max(axis=0) - self.min_
        self.span_ = np.where(span > 0, span, 1.0)
        return self

    def transform(self, X):
        return (X - self.min_) / self.span_


class VarianceThreshold:
    def __init__(self, threshold=0.0):
        self.threshold = float(threshold)

    def fit(self, X, y, n_classes, seed):
        var = X.var(axis=0)
        keep = np.flatnonzero(var > self.threshold)
        if len(keep) == 0:
            keep = np.array([int(np.argmax(var))])  # keep the best column
        self.keep_ = keep
        return self

    def transform(self, X):
        return X[:, self.keep_]


class PCA:
    """Projection onto the top principal components (SVD on centered data).

    n_components is clamped to what the training data supports; component
    signs are fixed so the largest-magnitude loading is positive.
    """

    def __init__(self, n_components=2):
        self.n_components = int(n_components)

    def fit(self, X, y, n_classes, seed):
        self.mean_ = X.mean(axis=0)
        Xc = X - self.mean_
        _, _, vt = np.linalg.svd(Xc, full_matrices=False)
        n_comp = max(1, min(self.n_components, vt.shape[0]))
        comps = vt[:n_comp]
        for i in range(n_comp):
            j = int(np.argmax(np.abs(comps[i])))
            if comps[i, j] < 0:
                comps[i] = -comps[i]
        self.components_ = comps
        return self

    def transform(self, X):
        return (X - self.mean_) @ self.components_.T


class SelectKBest:
    """Top-k features by one-way ANOVA F-score between classes."""

    def __init__(self, k=2):
        self.k = int(k)

    def fit(self, X, y, n_classes, seed):
        n, f = X.shape
        grand = X.mean(axis=0)
        between = np.zeros(f)
        within = np.zeros(f)
        groups = 0
        for c in range(n_classes):
            rows = X[y == c]
            if len(rows) == 0:
                continue
            groups += 1
            between += len(rows) * (rows.mean(axis=0) - grand) ** 2
            within += ((rows - rows.mean(axis=0)) ** 2).sum(axis=0)
        if groups < 2 or n - groups < 1:
            scores = np.zeros(f)
        else:
            msb = between / (groups - 1)
            msw = within / (n - groups)
            with np.errstate(divide="ignore", invalid="ignore"):
                scores = np.where(msw > 0, msb / np.where(msw > 0, msw, 1.0),
                                  np.where(msb > 0, np.inf, 0.0))
        k = max(1, min(self.k, f))
        # stable top-k: sort by (-score, index)
        order = np.lexsort((np.arange(f), -scores))
        self.keep_ = np.sort(order[:k])
        return self

    def transform(self, X):
        return X[:, self.keep_]
