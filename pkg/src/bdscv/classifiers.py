"""Softmax logistic regression, CART and Gaussian naive Bayes in plain numpy.

All three share ``fit(X, y) -> self`` / ``predict(X)``.  Labels are mapped to
a dense catalogue in first-appearance order, and every argmax tie resolves
to the earliest catalogue entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidInputError, InvalidSpecError


class ClassifierKind(str, Enum):
    LOGISTIC = "logistic"
    DECISION_TREE = "decision-tree"
    NAIVE_BAYES = "naive-bayes"


@dataclass(frozen=True)
class ClassifierSpec:
    kind: ClassifierKind = ClassifierKind.LOGISTIC
    learning_rate: float = 0.1
    epochs: int = 500
    l2_penalty: float = 1e-4
    max_depth: int | None = None
    min_split: int = 2
    variance_smoothing_fraction: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "kind", ClassifierKind(self.kind))
        if self.epochs < 1 or not self.learning_rate > 0:
            raise InvalidSpecError("epochs must be >= 1 and learning_rate > 0")
        if self.l2_penalty < 0:
            raise InvalidSpecError("l2_penalty must be >= 0")
        if self.min_split < 2:
            raise InvalidSpecError("min_split must be >= 2")
        if self.max_depth is not None and self.max_depth < 0:
            raise InvalidSpecError("max_depth must be >= 0")
        if not self.variance_smoothing_fraction > 0:
            raise InvalidSpecError("variance_smoothing_fraction must be > 0")

    def build(self) -> "Classifier":
        if self.kind is ClassifierKind.LOGISTIC:
            return SoftmaxRegression(self.learning_rate, self.epochs, self.l2_penalty)
        if self.kind is ClassifierKind.DECISION_TREE:
            return DecisionTree(self.max_depth, self.min_split)
        return GaussianNaiveBayes(self.variance_smoothing_fraction)


def encode_labels(y) -> tuple[np.ndarray, np.ndarray]:
    """Return (catalogue, codes) with the catalogue in first-appearance order."""
    y = np.asarray(y)
    uniq, first, inverse = np.unique(y, return_index=True, return_inverse=True)
    order = np.argsort(first)
    catalogue = uniq[order]
    remap = np.empty_like(order)
    remap[order] = np.arange(order.size)
    return catalogue, remap[inverse.ravel()]


class Classifier:
    classes_: np.ndarray
    n_features_: int

    def _prepare_fit(self, X, y):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] == 0:
            raise InvalidInputError("training set must be a non-empty n x m matrix")
        if len(y) != X.shape[0]:
            raise InvalidInputError("labels and features differ in length")
        self.classes_, codes = encode_labels(y)
        self.n_features_ = X.shape[1]
        return X, codes

    def _check_predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_features_:
            raise InvalidInputError(
                f"model was trained on {self.n_features_} features, got {X.shape[1]}"
            )
        return X

    def fit(self, X, y) -> "Classifier":
        raise NotImplementedError

    def predict_codes(self, X) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        X = self._check_predict(X)
        if self.classes_.size == 1:
            return np.repeat(self.classes_, X.shape[0])
        return self.classes_[self.predict_codes(X)]


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _standardizer(X: np.ndarray):
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    return mean, np.where(std > 0, std, 1.0)


def softmax_gradient_descent(X, means, scales, onehot, row_weight, allowed, learning_rate, epochs, l2_penalty):
    """Fit F softmax models that share the raw rows ``X`` (n, m).

    Model f sees z = (X - means[f]) / scales[f] and has weights (m, C) and a
    bias (C,) in those standardized coordinates.  ``row_weight`` (n, F)
    holds 1/n_train on the training rows of model f and 0 elsewhere;
    ``allowed`` (F, C) marks the classes present in each training set (the
    others get probability 0).  The standardization is folded into the
    weights, and arrays are laid out class-major as (C, ., F) so the softmax
    reductions run over the leading axis.

    Returns (weights (F, m, C), biases (F, C)).
    """
    n, m = X.shape
    f = means.shape[0]
    c = onehot.shape[1]
    inv_scale = (1.0 / scales).T  # (m, F)
    shift = (means / scales).T
    mu = means.T
    w = np.zeros((c, m, f))
    b = np.zeros((c, f))
    mask = np.where(allowed, 0.0, -np.inf).T[:, None, :]  # (C, 1, F)
    decay = 1.0 - learning_rate * l2_penalty
    weight = row_weight[None]  # (1, n, F)
    target = onehot.T[:, :, None] * weight  # (C, n, F)
    xt = np.ascontiguousarray(X.T)
    ones = np.ones(n)
    for _ in range(epochs):
        s = X @ (w * inv_scale)  # (C, n, F)
        s += (b - (shift * w).sum(axis=1))[:, None, :] + mask
        s -= s.max(axis=0)
        np.exp(s, out=s)
        s /= s.sum(axis=0)
        s *= weight
        s -= target
        col = ones @ s  # (C, F)
        grad_w = xt @ s
        grad_w -= mu * col[:, None, :]
        grad_w *= inv_scale
        w *= decay
        w -= learning_rate * grad_w
        b -= learning_rate * col
    return w.transpose(2, 1, 0), b.T


def _argmax_by_rank(scores: np.ndarray, rank: np.ndarray) -> np.ndarray:
    """Row-wise argmax; exact ties go to the column with the smallest rank."""
    best = scores.max(axis=-1, keepdims=True)
    tied = scores == best
    return np.argmin(np.where(tied, rank, np.iinfo(np.int64).max), axis=-1)


class SoftmaxRegression(Classifier):
    """Multinomial logistic regression fitted by full-batch gradient descent.

    Features are z-scored with statistics of the training set only.
    Loss: mean cross-entropy + (l2/2) * ||W||^2 (bias unpenalised).
    """

    def __init__(self, learning_rate=0.1, epochs=500, l2_penalty=1e-4):
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.l2_penalty = l2_penalty

    def fit(self, X, y):
        X, codes = self._prepare_fit(X, y)
        n = X.shape[0]
        c = self.classes_.size
        self.mean_, self.scale_ = _standardizer(X)
        if c == 1:
            self.weights_, self.bias_ = np.zeros((X.shape[1], 1)), np.zeros(1)
            return self
        w, b = softmax_gradient_descent(
            X, self.mean_[None], self.scale_[None], np.eye(c)[codes],
            np.full((n, 1), 1.0 / n), np.ones((1, c), bool),
            self.learning_rate, self.epochs, self.l2_penalty,
        )
        self.weights_, self.bias_ = w[0], b[0]
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = self._check_predict(X)
        return softmax(((X - self.mean_) / self.scale_) @ self.weights_ + self.bias_)

    def predict_codes(self, X):
        return np.argmax(self.predict_proba(X), axis=1)


# Upper bound on F * n * C floats held by one batched logistic fit.
_BATCH_ELEMENTS = 4_000_000


def _logistic_tasks(spec, X, y, tasks, out):
    n, m = X.shape
    catalogue, codes = encode_labels(y)
    c = catalogue.size
    onehot = np.eye(c)[codes]
    per_batch = max(1, _BATCH_ELEMENTS // (n * c))
    for start in range(0, len(tasks), per_batch):
        chunk = tasks[start : start + per_batch]
        f = len(chunk)
        means, scales = np.empty((f, m)), np.empty((f, m))
        row_weight = np.zeros((n, f))
        first = np.full((f, c), n, dtype=np.int64)
        for i, (_, train, _) in enumerate(chunk):
            means[i], scales[i] = _standardizer(X[train])
            row_weight[train, i] = 1.0 / train.sum()
            train_idx = np.flatnonzero(train)
            np.minimum.at(first[i], codes[train_idx], train_idx)
        allowed = first < n
        w, b = softmax_gradient_descent(
            X, means, scales, onehot, row_weight, allowed,
            spec.learning_rate, spec.epochs, spec.l2_penalty,
        )
        for i, (r, _, test) in enumerate(chunk):
            if allowed[i].sum() == 1:
                out[r, test] = catalogue[np.flatnonzero(allowed[i])[0]]
                continue
            z = (X[test] - means[i]) / scales[i]
            proba = softmax(z @ w[i] + b[i] + np.where(allowed[i], 0.0, -np.inf))
            # per-task catalogue order = first appearance in that training set
            rank = np.argsort(np.argsort(first[i], kind="stable"), kind="stable")
            out[r, test] = catalogue[_argmax_by_rank(proba, rank)]


def cross_predict_many(spec: "ClassifierSpec", X, y, fold_ofs) -> np.ndarray:
    """Out-of-fold predictions for several fold assignments of the same rows.

    Entry (r, p) is predicted by a model trained on every row whose fold in
    assignment r differs from ``fold_ofs[r][p]``.  Logistic models for all
    (assignment, fold) pairs are fitted together in batched gradient descent;
    the other classifiers are fitted one by one.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    fold_ofs = [np.asarray(f) for f in fold_ofs]
    tasks = []
    for r, fold_of in enumerate(fold_ofs):
        for j in np.unique(fold_of):
            test = fold_of == j
            tasks.append((r, ~test, test))
    out = np.empty((len(fold_ofs), y.size), dtype=y.dtype)
    if spec.kind is ClassifierKind.LOGISTIC:
        _logistic_tasks(spec, X, y, tasks, out)
    else:
        for r, train, test in tasks:
            out[r, test] = spec.build().fit(X[train], y[train]).predict(X[test])
    return out


def cross_predict(spec: "ClassifierSpec", X, y, fold_of) -> np.ndarray:
    """Out-of-fold predictions for one fold assignment."""
    return cross_predict_many(spec, X, y, [fold_of])[0]


@dataclass
class _Node:
    prediction: int
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None
    counts: np.ndarray = field(default=None, repr=False)

    @property
    def is_leaf(self) -> bool:
        return self.left is None


_TIE_EPS = 1e-12


def best_split(X: np.ndarray, codes: np.ndarray, n_classes: int):
    """Best Gini split of a node: (feature, threshold, weighted impurity) or None.

    Candidate thresholds are midpoints of consecutive distinct values; the
    left child is ``x <= threshold``.  Ties go to the lowest feature index,
    then the lowest threshold.
    """
    n, m = X.shape
    order = np.argsort(X, axis=0, kind="stable")
    xs = np.take_along_axis(X, order, axis=0)
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), codes] = 1.0
    left = np.cumsum(onehot[order], axis=0)[:-1]  # (n-1, m, C)
    total = onehot.sum(axis=0)
    right = total - left
    nl = np.arange(1, n)[:, None]
    nr = n - nl
    gini_l = 1.0 - np.sum(left**2, axis=2) / nl**2
    gini_r = 1.0 - np.sum(right**2, axis=2) / nr**2
    score = (nl * gini_l + nr * gini_r) / n
    valid = xs[1:] > xs[:-1]
    if not valid.any():
        return None
    score = np.where(valid, score, np.inf)
    per_feature = score.min(axis=0)
    best = per_feature.min()
    feat = int(np.flatnonzero(per_feature <= best + _TIE_EPS)[0])
    col = score[:, feat]
    pos = int(np.flatnonzero(col <= col.min() + _TIE_EPS)[0])
    lo, hi = xs[pos, feat], xs[pos + 1, feat]
    threshold = 0.5 * (lo + hi)
    if not threshold < hi:  # adjacent floats: the midpoint rounds up to hi
        threshold = lo
    return feat, float(threshold), float(col[pos])


class DecisionTree(Classifier):
    """CART classifier with Gini impurity and no pruning.

    A node becomes a leaf when it is pure, has fewer than ``min_split``
    instances, reaches ``max_depth``, or no feature varies within it.
    """

    def __init__(self, max_depth=None, min_split=2):
        self.max_depth = max_depth
        self.min_split = min_split

    def fit(self, X, y):
        X, codes = self._prepare_fit(X, y)
        self.root_ = self._grow(X, codes, 0)
        return self

    def _grow(self, X, codes, depth) -> _Node:
        c = self.classes_.size
        counts = np.bincount(codes, minlength=c)
        node = _Node(prediction=int(np.argmax(counts)), counts=counts)
        if (
            np.count_nonzero(counts) <= 1
            or codes.size < self.min_split
            or (self.max_depth is not None and depth >= self.max_depth)
        ):
            return node
        split = best_split(X, codes, c)
        if split is None:
            return node
        feat, thr, _ = split
        go_left = X[:, feat] <= thr
        node.feature, node.threshold = feat, thr
        node.left = self._grow(X[go_left], codes[go_left], depth + 1)
        node.right = self._grow(X[~go_left], codes[~go_left], depth + 1)
        return node

    def predict_codes(self, X):
        out = np.empty(X.shape[0], dtype=np.int64)
        stack = [(self.root_, np.arange(X.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if node.is_leaf or idx.size == 0:
                out[idx] = node.prediction
                continue
            v = X[idx, node.feature]
            mask = v <= node.threshold
            stack.append((node.left, idx[mask]))
            stack.append((node.right, idx[~mask]))
        return out

    def depth(self) -> int:
        def _d(node):
            return 0 if node.is_leaf else 1 + max(_d(node.left), _d(node.right))

        return _d(self.root_)


class GaussianNaiveBayes(Classifier):
    """Per-class independent Gaussians with a variance floor.

    The floor is ``variance_smoothing_fraction`` times the largest feature
    variance of the training set (or the fraction itself when every feature
    is constant), which keeps all log-likelihoods finite.
    """

    def __init__(self, variance_smoothing_fraction=1e-9):
        self.variance_smoothing_fraction = variance_smoothing_fraction

    def fit(self, X, y):
        X, codes = self._prepare_fit(X, y)
        c = self.classes_.size
        max_var = float(X.var(axis=0).max())
        self.epsilon_ = self.variance_smoothing_fraction * (max_var if max_var > 0 else 1.0)
        counts = np.bincount(codes, minlength=c)
        self.log_prior_ = np.log(counts / counts.sum())
        self.theta_ = np.stack([X[codes == j].mean(axis=0) for j in range(c)])
        self.var_ = np.stack([X[codes == j].var(axis=0) for j in range(c)]) + self.epsilon_
        return self

    def joint_log_likelihood(self, X) -> np.ndarray:
        X = self._check_predict(X)
        ll = -0.5 * np.sum(np.log(2 * np.pi * self.var_), axis=1)[None, :]
        ll = ll - 0.5 * np.sum((X[:, None, :] - self.theta_[None]) ** 2 / self.var_[None], axis=2)
        return ll + self.log_prior_

    def predict_codes(self, X):
        return np.argmax(self.joint_log_likelihood(X), axis=1)


def train(X, y, spec: ClassifierSpec = ClassifierSpec()) -> Classifier:
    return spec.build().fit(X, y)


def predict(model: Classifier, X) -> np.ndarray:
    return model.predict(X)
