"""Slow, obviously-correct reference implementations used by the test suite.

None of these share code with the package.
"""

from __future__ import annotations

import itertools
from decimal import Decimal, getcontext

import numpy as np


# --- sequences -----------------------------------------------------------------


def e_fractions(n: int, digits: int = 80) -> list[float]:
    """frac(i e) for i = 1..n, with e summed from its factorial series in Decimal."""
    getcontext().prec = digits + 10
    e = Decimal(0)
    term = Decimal(1)
    for k in range(1, 200):
        e += term
        term /= k
    return [float((i * e) % 1) for i in range(1, n + 1)]


def star_discrepancy_supscan(x) -> float:
    """sup over b in [0, 1] of |#{x < b}/N - b|, scanning every breakpoint.

    The counting function jumps at each point; both one-sided limits at
    every point are checked, plus b = 0 and b = 1.
    """
    x = [float(v) for v in x]
    n = len(x)
    best = 0.0
    for b in x + [0.0, 1.0]:
        below = sum(1 for v in x if v < b)
        at_or_below = sum(1 for v in x if v <= b)
        best = max(best, abs(below / n - b))
        if b < 1.0:
            best = max(best, abs(at_or_below / n - b))
    return best


def extreme_discrepancy_exact(x) -> float:
    """sup over 0 <= a < b <= 1 of |#{a <= x < b}/N - (b - a)|, O(N^2) endpoints.

    With a, b at points, 0 or 1, moving either endpoint by an infinitesimal
    amount changes the count but not the length: the count ranges from
    #{a < x < b} to #{a <= x <= b}.
    """
    x = [float(v) for v in x]
    n = len(x)
    cands = sorted(set(x) | {0.0, 1.0})
    best = 0.0
    for a in cands:
        for b in cands:
            if b < a:
                continue
            most = sum(1 for v in x if a <= v <= b)
            least = sum(1 for v in x if a < v < b)
            best = max(best, most / n - (b - a), (b - a) - least / n)
    return best


# --- partitions and ANOVA ---------------------------------------------------------


def set_partitions(n: int):
    """Every partition of range(n), as restricted-growth label vectors."""
    labels = [0] * n

    def rec(i, k):
        if i == n:
            yield list(labels)
            return
        for j in range(k + 1):
            labels[i] = j
            yield from rec(i + 1, max(k, j + 1))

    if n == 0:
        yield []
        return
    labels[0] = 0
    yield from rec(1, 1)


def anova_naive(values, fold_of):
    """SSW, SSB (size-weighted), SSTO with explicit loops."""
    values = [float(v) for v in values]
    folds = sorted(set(int(f) for f in fold_of))
    total = sum(values) / len(values)
    ssw = 0.0
    ssb = 0.0
    for f in folds:
        members = [v for v, g in zip(values, fold_of) if g == f]
        mean = sum(members) / len(members)
        for v in members:
            ssw += (v - mean) ** 2
        ssb += len(members) * (mean - total) ** 2
    ssto = 0.0
    for v in values:
        ssto += (v - total) ** 2
    return ssw, ssb, ssto


def icc_naive(values, fold_of):
    ssw, _, ssto = anova_naive(values, fold_of)
    m = len(values) // len(set(fold_of))
    return 1 - (m / (m - 1)) * ssw / ssto


def pairings_of_six() -> list[frozenset]:
    """The 15 possible member sets of one fold when 6 positions form 3 pairs."""
    return [frozenset(p) for p in itertools.combinations(range(6), 2)]


# --- projection ---------------------------------------------------------------


def dominant_eigvec_2x2(c) -> np.ndarray:
    """Closed-form unit eigenvector of the largest eigenvalue of a symmetric 2x2."""
    a, b, d = float(c[0][0]), float(c[0][1]), float(c[1][1])
    lam = (a + d) / 2 + np.sqrt(((a - d) / 2) ** 2 + b * b)
    v = np.array([b, lam - a]) if abs(b) > 1e-15 else (np.array([1.0, 0.0]) if a >= d else np.array([0.0, 1.0]))
    v = v / np.linalg.norm(v)
    return v if v[np.argmax(np.abs(v))] > 0 else -v


# --- classifiers and CV -------------------------------------------------------------


def softmax_gd_naive(x, codes, n_classes, lr, epochs, l2):
    """Per-sample-loop softmax regression on already-standardized features."""
    n, m = len(x), len(x[0])
    w = [[0.0] * n_classes for _ in range(m)]
    b = [0.0] * n_classes
    for _ in range(epochs):
        gw = [[0.0] * n_classes for _ in range(m)]
        gb = [0.0] * n_classes
        for i in range(n):
            z = [b[c] + sum(x[i][j] * w[j][c] for j in range(m)) for c in range(n_classes)]
            top = max(z)
            e = [np.exp(v - top) for v in z]
            s = sum(e)
            for c in range(n_classes):
                g = e[c] / s - (1.0 if codes[i] == c else 0.0)
                gb[c] += g / n
                for j in range(m):
                    gw[j][c] += g * x[i][j] / n
        for j in range(m):
            for c in range(n_classes):
                w[j][c] = w[j][c] * (1 - lr * l2) - lr * gw[j][c]
        for c in range(n_classes):
            b[c] -= lr * gb[c]
    return np.array(w), np.array(b)


def cv_fold_errors_naive(model_factory, x, y, fold_of):
    """Loop over folds: fit on the rest, count errors on the held-out fold."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    rates = []
    for f in sorted(set(int(v) for v in fold_of)):
        test = [i for i, g in enumerate(fold_of) if g == f]
        train = [i for i, g in enumerate(fold_of) if g != f]
        model = model_factory().fit(x[train], y[train])
        pred = model.predict(x[test])
        rates.append(sum(1 for p, t in zip(pred, y[test]) if p != t) / len(test))
    return rates


def linearly_separable_1d(x, y) -> bool:
    """Is there a threshold separating the two classes of 1-D data?"""
    pairs = sorted(zip(x, y))
    labels = [lab for _, lab in pairs]
    changes = sum(1 for a, b in zip(labels, labels[1:]) if a != b)
    return changes <= 1
