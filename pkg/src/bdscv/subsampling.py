"""Fold assignments over a sorted subsampling frame.

Positions and fold numbers are 0-based throughout the Python API: position
``p`` is the p-th instance of the (sorted) dataset and ``fold_of[p]`` is in
``range(k)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidKError
from .sequences import SequenceSpec, SequenceLike, UnitSequence, generate


class FoldMethod(str, Enum):
    BDS = "bds-systematic"
    SRS = "srs"
    STRATIFIED = "stratified-srs"
    ORDERED_SYSTEMATIC = "ordered-systematic-fixed-skip"
    LOO = "loo"


@dataclass(frozen=True)
class FoldAssignment:
    fold_of: np.ndarray
    k: int
    method: FoldMethod
    seed: int | None = None

    def __post_init__(self):
        f = np.asarray(self.fold_of, dtype=np.int64)
        f.setflags(write=False)
        object.__setattr__(self, "fold_of", f)
        object.__setattr__(self, "method", FoldMethod(self.method))

    @property
    def n(self) -> int:
        return self.fold_of.size

    def folds(self) -> list[np.ndarray]:
        """Sorted positions of each fold, in fold order."""
        return [np.flatnonzero(self.fold_of == j) for j in range(self.k)]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.fold_of, minlength=self.k)


def _check_k(n: int, k: int) -> None:
    if not 2 <= k <= n:
        raise InvalidKError(f"k must satisfy 2 <= k <= n (k={k}, n={n})")


def block_sizes(n: int, k: int) -> np.ndarray:
    """Near-equal consecutive block sizes; the first ``n % k`` are one larger."""
    sizes = np.full(k, n // k)
    sizes[: n % k] += 1
    return sizes


def _chunk(order: np.ndarray, k: int) -> np.ndarray:
    # order[j] is the position dealt j-th; blocks of it become folds
    n = order.size
    fold_of = np.empty(n, dtype=np.int64)
    fold_of[order] = np.repeat(np.arange(k), block_sizes(n, k))
    return fold_of


def ranking_vector(seq: SequenceLike) -> np.ndarray:
    """1-based ascending rank of every element; ties keep index order."""
    values = seq.values if isinstance(seq, UnitSequence) else np.asarray(seq, dtype=float)
    ranks = np.empty(values.size, dtype=np.int64)
    ranks[np.argsort(values, kind="stable")] = np.arange(1, values.size + 1)
    return ranks


def bds_partition(n: int, k: int) -> FoldAssignment:
    """Split the ranking vector of ``{i e}``, i = 1..n, into k consecutive blocks.

    Block j holds the sorted positions that make up fold j.
    """
    _check_k(n, k)
    ranks = ranking_vector(generate(SequenceSpec.e_multiples(n)))
    return FoldAssignment(_chunk(ranks - 1, k), k, FoldMethod.BDS)


def derived_seed(*key: int) -> int:
    """A 64-bit seed derived from an integer key path (e.g. campaign seed, repetition)."""
    return int(np.random.SeedSequence([int(k) for k in key]).generate_state(1, np.uint64)[0])


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def srs_partition(n: int, k: int, seed: int) -> FoldAssignment:
    _check_k(n, k)
    return FoldAssignment(_chunk(_rng(seed).permutation(n), k), k, FoldMethod.SRS, seed)


def stratified_partition(labels, k: int, seed: int) -> FoldAssignment:
    """Per-class shuffle, then deal each class round-robin over the folds.

    Classes are dealt largest first (ties by first appearance).  Each class
    starts at the currently smallest fold, so fold sizes never drift apart by
    more than one.
    """
    labels = np.asarray(labels).astype(str)
    n = labels.size
    _check_k(n, k)
    classes = list(dict.fromkeys(labels.tolist()))
    counts = {c: int(np.count_nonzero(labels == c)) for c in classes}
    if len(classes) > n - n / k:
        warnings.warn(
            f"{len(classes)} classes for n={n}, k={k}: many folds will miss classes",
            stacklevel=2,
        )
    rng = _rng(seed)
    fold_of = np.empty(n, dtype=np.int64)
    sizes = np.zeros(k, dtype=np.int64)
    for c in sorted(classes, key=lambda c: -counts[c]):
        members = rng.permutation(np.flatnonzero(labels == c))
        deal = np.argsort(sizes, kind="stable")
        targets = deal[np.arange(members.size) % k]
        fold_of[members] = targets
        sizes += np.bincount(targets, minlength=k)
    return FoldAssignment(fold_of, k, FoldMethod.STRATIFIED, seed)


def ordered_systematic_partition(n: int, k: int, seed: int | None = None, start: int | None = None) -> FoldAssignment:
    """Classic systematic sampling with skip k from a random start.

    ``start`` is 1-based in 1..k (drawn from ``seed`` when omitted).  Fold
    j takes every k-th position beginning at offset ``start + j`` (mod k).
    """
    _check_k(n, k)
    if start is None:
        if seed is None:
            raise InvalidKError("either seed or start is required")
        start = int(_rng(seed).integers(1, k + 1))
    if not 1 <= start <= k:
        raise InvalidKError(f"start must be in 1..{k}")
    offset = np.arange(n) % k  # 0-based offset of each position
    fold_of = (offset - (start - 1)) % k
    return FoldAssignment(fold_of, k, FoldMethod.ORDERED_SYSTEMATIC, seed)


def loo_partition(n: int) -> FoldAssignment:
    if n < 2:
        raise InvalidKError("leave-one-out needs n >= 2")
    return FoldAssignment(np.arange(n), n, FoldMethod.LOO)
