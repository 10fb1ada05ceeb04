"""One-dimensional projection of a feature matrix by power iteration.

The projection supplies the axis along which instances are sorted before
systematic subsampling.  Two reductions are available: the first principal
component (centred covariance) and the first right singular vector of the
uncentred matrix (truncated SVD with one component).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .datasets import Dataset
from .errors import DegenerateProjectionError, InvalidInputError, InvalidSpecError


class ProjectionMethod(str, Enum):
    PCA = "pca-first-component"
    TSVD = "tsvd-first-component"


@dataclass(frozen=True)
class ProjectionSpec:
    method: ProjectionMethod = ProjectionMethod.PCA
    standardize: bool = True
    max_iterations: int = 1000
    tolerance: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "method", ProjectionMethod(self.method))
        if self.max_iterations < 1:
            raise InvalidSpecError("max_iterations must be >= 1")
        if not self.tolerance > 0:
            raise InvalidSpecError("tolerance must be > 0")


DEFAULT_CANDIDATES = (
    ProjectionSpec(ProjectionMethod.PCA),
    ProjectionSpec(ProjectionMethod.TSVD),
)


@dataclass(frozen=True)
class ProjectionResult:
    loadings: np.ndarray
    scores: np.ndarray
    eigenvalue: float
    iterations: int
    spec: ProjectionSpec


def preprocess(features: np.ndarray, spec: ProjectionSpec) -> np.ndarray:
    """Centre (PCA only) and z-scale the columns; constant columns become 0."""
    x = np.asarray(features, dtype=float)
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    constant = std == 0
    if spec.method is ProjectionMethod.PCA:
        x = x - mean
        x[:, constant] = 0.0
    if spec.standardize:
        x = x / np.where(constant, 1.0, std)
        x[:, constant] = 0.0
    return x


def second_moment(x: np.ndarray) -> np.ndarray:
    return x.T @ x / x.shape[0]


def power_iteration(c: np.ndarray, start: np.ndarray, max_iterations: int, tolerance: float):
    """Return (eigenvalue, vector, iterations, converged) for symmetric PSD ``c``.

    Stops once ``||c v - lambda v|| <= tolerance * ||c||_F``.
    """
    norm_c = np.linalg.norm(c)
    v = start / np.linalg.norm(start)
    lam = float(v @ c @ v)
    for it in range(1, max_iterations + 1):
        w = c @ v
        wn = np.linalg.norm(w)
        if wn <= 1e-14 * norm_c:
            # start vector lies in the null space
            return 0.0, v, it, False
        v = w / wn
        cv = c @ v
        lam = float(v @ cv)
        if np.linalg.norm(cv - lam * v) <= tolerance * norm_c:
            return lam, v, it, True
    return lam, v, max_iterations, False


def _fix_sign(v: np.ndarray) -> np.ndarray:
    mags = np.abs(v)
    lead = int(np.flatnonzero(mags >= mags.max() - 1e-12)[0])
    return -v if v[lead] < 0 else v


def _generic_start(m: int) -> np.ndarray:
    # frac(i e) - 1/2: deterministic, with no exact relation to the axes or to all-ones
    return (np.arange(1, m + 1) * np.e) % 1.0 - 0.5


def dominant_eigenvector(c: np.ndarray, max_iterations: int = 1000, tolerance: float = 1e-9):
    """Dominant eigenpair of ``c`` from deterministic start vectors.

    Runs from the normalised all-ones vector and from a generic vector and
    keeps the larger eigenvalue (all-ones on ties).  The standard basis
    vectors are tried as well if neither reaches the largest diagonal entry,
    which bounds the dominant eigenvalue from below.
    """
    m = c.shape[0]
    floor = float(np.max(np.diag(c))) * (1 - 1e-9)
    best = None
    total = 0

    def attempt(start):
        nonlocal best, total
        lam, v, its, _ = power_iteration(c, start, max_iterations, tolerance)
        total += its
        if best is None or lam > best[0] * (1 + 1e-12) + 1e-300:
            best = (lam, v)

    attempt(np.ones(m))
    if m > 1:
        attempt(_generic_start(m))
    if best[0] < floor:
        for i in range(m):
            attempt(np.eye(m)[i])
            if best[0] >= floor:
                break
    lam, v = best
    return lam, _fix_sign(v), total


def project(features, spec: ProjectionSpec = ProjectionSpec()) -> ProjectionResult:
    x = np.asarray(features, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] < 1:
        raise InvalidInputError("project needs an n x m matrix with n >= 2, m >= 1")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("features contain missing or non-finite values")
    if np.all(x.max(axis=0) == x.min(axis=0)):
        raise DegenerateProjectionError("every feature column is constant")
    z = preprocess(x, spec)
    c = second_moment(z)
    if not np.any(c):
        raise DegenerateProjectionError("no variance direction after preprocessing")
    lam, v, its = dominant_eigenvector(c, spec.max_iterations, spec.tolerance)
    return ProjectionResult(loadings=v, scores=z @ v, eigenvalue=lam, iterations=its, spec=spec)


@dataclass(frozen=True)
class SortedDataset:
    """A dataset reordered along the projection axis.

    ``order[p]`` is the original (0-based) row index of sorted position ``p``.
    The projection itself is not carried along.
    """

    dataset: Dataset
    order: np.ndarray


def sort_by_projection(dataset: Dataset, result: ProjectionResult) -> SortedDataset:
    scores = np.asarray(result.scores, dtype=float)
    if scores.shape != (dataset.n,):
        raise InvalidInputError(
            f"score vector has length {scores.size}, dataset has {dataset.n} rows"
        )
    order = np.argsort(scores, kind="stable")
    return SortedDataset(dataset.take(order), order)
