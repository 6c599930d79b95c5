"""Native classifiers. All operate on float matrices and integer-encoded
labels (positions in the training class_set); ties always resolve to the
lowest class index so results are order- and platform-stable."""

from __future__ import annotations

import numpy as np


def _argmax_lowest(scores: np.ndarray) -> int:
    # np.argmax already returns the first (lowest) index on ties
    return int(np.argmax(scores))


class MajorityClass:
    def fit(self, X, y, n_classes, seed):
        counts = np.bincount(y, minlength=n_classes)
        self.modal_ = _argmax_lowest(counts)
        return self

    def predict(self, X):
        return np.full(X.shape[0], self.modal_, dtype=np.intp)


class KNearestNeighbors:
    def __init__(self, k=3, weights="uniform"):
        self.k = int(k)
        self.weights = weights

    def fit(self, X, y, n_classes, seed):
        self.X_ = X
        self.y_ = y
        self.n_classes_ = n_classes
        return self

    def predict(self, X):
        d2 = ((X[:, None, :] - self.X_[None, :, :]) ** 2).sum(axis=2)
        k = min(self.k, self.X_.shape[0])
        out = np.empty(X.shape[0], dtype=np.intp)
        for i in range(X.shape[0]):
            # stable sort keeps the lowest training index among equal distances
            nn = np.argsort(d2[i], kind="stable")[:k]
            dist = np.sqrt(d2[i, nn])
            if self.weights == "distance":
                zero = dist <= 1e-12
                if zero.any():
                    votes = np.bincount(self.y_[nn[zero]], minlength=self.n_classes_).astype(float)
                else:
                    votes = np.bincount(
                        self.y_[nn], weights=1.0 / dist, minlength=self.n_classes_
                    )
            else:
                votes = np.bincount(self.y_[nn], minlength=self.n_classes_).astype(float)
            out[i] = _argmax_lowest(votes)
        return out


class GaussianNaiveBayes:
    """Per-class diagonal Gaussians with a relative variance floor."""

    def fit(self, X, y, n_classes, seed):
        n, f = X.shape
        self.n_classes_ = n_classes
        self.theta_ = np.zeros((n_classes, f))
        self.var_ = np.ones((n_classes, f))
        self.log_prior_ = np.full(n_classes, -np.inf)
        eps = 1e-9 * max(float(X.var(axis=0).max()), 1e-12)
        for c in range(n_classes):
            rows = X[y == c]
            if len(rows) == 0:
                continue
            self.theta_[c] = rows.mean(axis=0)
            self.var_[c] = rows.var(axis=0) + eps
            self.log_prior_[c] = np.log(len(rows) / n)
        return self

    def predict(self, X):
        ll = self.log_prior_[None, :] - 0.5 * (
            np.log(2 * np.pi * self.var_).sum(axis=1)[None, :]
            + (((X[:, None, :] - self.theta_[None, :, :]) ** 2) / self.var_[None, :, :]).sum(axis=2)
        )
        return np.argmax(ll, axis=1).astype(np.intp)


class LogisticRegression:
    """Multinomial softmax regression, plain gradient descent.

    l2 is the penalty strength (higher = stronger shrinkage); the bias term is
    unpenalized. The fixed iteration cap keeps fitting total on singular or
    separable systems.
    """

    MAX_ITER = 200
    LEARNING_RATE = 0.5

    def __init__(self, l2=1.0):
        self.l2 = float(l2)

    def fit(self, X, y, n_classes, seed):
        n, f = X.shape
        # scale-normalize internally so a fixed learning rate behaves sanely
        self.mu_ = X.mean(axis=0)
        sd = X.std(axis=0)
        self.sd_ = np.where(sd > 0, sd, 1.0)
        Xs = (X - self.mu_) / self.sd_
        Y = np.zeros((n, n_classes))
        Y[np.arange(n), y] = 1.0
        W = np.zeros((f, n_classes))
        b = np.zeros(n_classes)
        for _ in range(self.MAX_ITER):
            z = Xs @ W + b
            z -= z.max(axis=1, keepdims=True)
            p = np.exp(z)
            p /= p.sum(axis=1, keepdims=True)
            g = p - Y
            W -= self.LEARNING_RATE * ((Xs.T @ g) / n + self.l2 * W / n)
            b -= self.LEARNING_RATE * g.mean(axis=0)
        self.W_, self.b_ = W, b
        return self

    def predict(self, X):
        z = ((X - self.mu_) / self.sd_) @ self.W_ + self.b_
        return np.argmax(z, axis=1).astype(np.intp)


class DecisionTree:
    """CART with Gini impurity.

    Split search is vectorized per node: each feature column is sorted once
    and all candidate thresholds scored via cumulative class counts. Ties in
    gain prefer the lowest feature index (features scanned in order, strictly
    better gain required to replace the incumbent); leaf ties prefer the
    lowest class index.
    """

    def __init__(self, max_depth=8, min_leaf=1):
        self.max_depth = int(max_depth)
        self.min_leaf = int(min_leaf)

    def fit(self, X, y, n_classes, seed):
        self.n_classes_ = n_classes
        # nodes: (feature, threshold, left, right, label); leaf iff feature < 0
        self.nodes_ = []
        self._build(X, y, 0)
        return self

    def _leaf(self, y):
        counts = np.bincount(y, minlength=self.n_classes_)
        self.nodes_.append((-1, 0.0, -1, -1, _argmax_lowest(counts)))
        return len(self.nodes_) - 1

    def _build(self, X, y, depth) -> int:
        n = len(y)
        if depth >= self.max_depth or n < 2 * self.min_leaf or len(np.unique(y)) == 1:
            return self._leaf(y)
        best = None  # (impurity, feature, threshold, mask)
        counts_total = np.bincount(y, minlength=self.n_classes_).astype(float)
        for f in range(X.shape[1]):
            col = X[:, f]
            order = np.argsort(col, kind="stable")
            cs, ys = col[order], y[order]
            onehot = np.zeros((n, self.n_classes_))
            onehot[np.arange(n), ys] = 1.0
            left_counts = np.cumsum(onehot, axis=0)  # after i+1 rows
            valid = np.flatnonzero(cs[:-1] < cs[1:])  # split between i and i+1
            if len(valid) == 0:
                continue
            nl = (valid + 1).astype(float)
            nr = n - nl
            ok = (nl >= self.min_leaf) & (nr >= self.min_leaf)
            valid, nl, nr = valid[ok], nl[ok], nr[ok]
            if len(valid) == 0:
                continue
            lc = left_counts[valid]
            rc = counts_total[None, :] - lc
            gini_l = 1.0 - ((lc / nl[:, None]) ** 2).sum(axis=1)
            gini_r = 1.0 - ((rc / nr[:, None]) ** 2).sum(axis=1)
            imp = (nl * gini_l + nr * gini_r) / n
            j = int(np.argmin(imp))
            if best is None or imp[j] < best[0] - 1e-15:
                thr = 0.5 * (cs[valid[j]] + cs[valid[j] + 1])
                best = (imp[j], f, thr, col <= thr)
        if best is None:
            return self._leaf(y)
        _, f, thr, mask = best
        self.nodes_.append(None)  # placeholder, fill after children exist
        me = len(self.nodes_) - 1
        left = self._build(X[mask], y[mask], depth + 1)
        right = self._build(X[~mask], y[~mask], depth + 1)
        self.nodes_[me] = (f, thr, left, right, -1)
        return me

    def predict(self, X):
        out = np.empty(X.shape[0], dtype=np.intp)
        for i, row in enumerate(X):
            node = 0
            while True:
                f, thr, left, right, label = self.nodes_[node]
                if f < 0:
                    out[i] = label
                    break
                node = left if row[f] <= thr else right
        return out
