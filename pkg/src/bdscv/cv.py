"""Cross-validation procedures and their comparison ratios.

Four procedures are available: best-discrepancy systematic CV (``bdscv``),
Monte-Carlo CV (``mccv``), stratified MCCV and leave-one-out.  The EPE of one
k-fold pass is the mean of the per-fold misclassification rates and its
variance is the population variance of those rates.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .classifiers import ClassifierSpec, cross_predict_many
from .datasets import Dataset
from .errors import DegenerateProjectionError, InvalidInputError, InvalidSpecError
from .projection import DEFAULT_CANDIDATES, ProjectionSpec, project
from .subsampling import (
    FoldAssignment,
    bds_partition,
    derived_seed,
    loo_partition,
    srs_partition,
    stratified_partition,
)

REPORT_SCHEMA = "bdscv.cv-report/1"


class Procedure(str, Enum):
    BDSCV = "bdscv"
    MCCV = "mccv"
    STRATIFIED_MCCV = "stratified-mccv"
    LOO = "loo"


@dataclass(frozen=True)
class CvProcedureSpec:
    procedure: Procedure = Procedure.BDSCV
    k: int = 10
    repetitions: int = 50
    seed: int = 0
    classifier: ClassifierSpec = ClassifierSpec()
    reduction_candidates: tuple[ProjectionSpec, ...] = DEFAULT_CANDIDATES

    def __post_init__(self):
        object.__setattr__(self, "procedure", Procedure(self.procedure))
        object.__setattr__(self, "reduction_candidates", tuple(self.reduction_candidates))
        if self.procedure is not Procedure.LOO and self.k < 2:
            raise InvalidSpecError("k must be >= 2")
        if self.repetitions < 1:
            raise InvalidSpecError("repetitions must be >= 1")
        if self.procedure is Procedure.BDSCV and not self.reduction_candidates:
            raise InvalidSpecError("bdscv needs at least one reduction candidate")

    def to_dict(self) -> dict:
        return {
            "procedure": self.procedure.value,
            "k": self.k,
            "repetitions": self.repetitions,
            "seed": self.seed,
            "classifier": {
                key: (val.value if isinstance(val, Enum) else val)
                for key, val in self.classifier.__dict__.items()
            },
            "reduction_candidates": [c.method.value for c in self.reduction_candidates],
        }


@dataclass
class CvReport:
    procedure: Procedure
    per_fold_epe: list[float]
    epe: float
    variance: float
    wall_time: float
    spec: CvProcedureSpec
    chosen_reduction: str | None = None
    fallback_sort: bool = False
    repetition_detail: list[tuple[float, float]] = field(default_factory=list)
    candidate_detail: dict[str, tuple[float, float]] = field(default_factory=dict)
    sorted_order: list[int] | None = None  # original row index of each sorted position

    def to_dict(self, strip_timing: bool = False, include_order: bool = True) -> dict:
        d = {
            "schema": REPORT_SCHEMA,
            "procedure": self.procedure.value,
            "epe": self.epe,
            "variance": self.variance,
            "per_fold_epe": list(self.per_fold_epe),
            "chosen_reduction": self.chosen_reduction,
            "fallback_sort": self.fallback_sort,
            "repetition_detail": [list(r) for r in self.repetition_detail],
            "candidate_detail": {k: list(v) for k, v in self.candidate_detail.items()},
            "spec": self.spec.to_dict(),
        }
        if include_order and self.sorted_order is not None:
            d["sorted_order"] = list(self.sorted_order)
        if not strip_timing:
            d["wall_time"] = self.wall_time
        return d


def epe_and_variance(per_fold_epe) -> tuple[float, float]:
    e = np.asarray(per_fold_epe, dtype=float)
    mean = float(e.mean())
    return mean, float(np.mean((e - mean) ** 2))


def fold_error_rates_many(dataset: Dataset, assignments, classifier: ClassifierSpec) -> list[np.ndarray]:
    """Per-fold misclassification rates for each assignment (row p = position p)."""
    for a in assignments:
        if a.n != dataset.n:
            raise InvalidInputError("fold assignment and dataset differ in size")
    preds = cross_predict_many(classifier, dataset.features, dataset.labels, [a.fold_of for a in assignments])
    rates = []
    for a, pred in zip(assignments, preds):
        wrong = pred != dataset.labels
        rates.append(np.bincount(a.fold_of, weights=wrong, minlength=a.k) / a.sizes())
    return rates


def fold_error_rates(dataset: Dataset, assignment: FoldAssignment, classifier: ClassifierSpec) -> np.ndarray:
    """Misclassification rate of each held-out fold (position p = dataset row p)."""
    return fold_error_rates_many(dataset, [assignment], classifier)[0]


def canonical_order(dataset: Dataset) -> np.ndarray:
    """Row order by (feature tuple, label), stable; independent of file order."""
    _, label_codes = np.unique(dataset.labels, return_inverse=True)
    keys = [label_codes.ravel()] + [dataset.features[:, j] for j in range(dataset.m - 1, -1, -1)]
    return np.lexsort(keys)


def _check(dataset: Dataset, k: int) -> None:
    dataset.validate_for_classification()
    if k > dataset.n:
        raise InvalidInputError(f"k={k} exceeds n={dataset.n}")


def run_bdscv(dataset: Dataset, spec: CvProcedureSpec) -> CvReport:
    """Sort along each candidate projection, partition with the BDS ranking
    vector, cross-validate, and keep the candidate with the lowest EPE
    (first candidate wins ties)."""
    _check(dataset, spec.k)
    t0 = time.perf_counter()
    canon = canonical_order(dataset)
    base = dataset.take(canon)
    assignment = bds_partition(base.n, spec.k)
    orders, names = [], []
    for cand in spec.reduction_candidates:
        try:
            result = project(base.features, cand)
        except DegenerateProjectionError:
            continue
        orders.append(np.argsort(result.scores, kind="stable"))
        names.append(cand.method.value)
    fallback = not orders
    if fallback:
        orders.append(np.argsort(base.features[:, 0], kind="stable"))
        names.append("first-feature")
    # sorted position p is canonical row orders[i][p]; carry the folds back to rows
    row_folds = []
    for order in orders:
        fold_of = np.empty(base.n, dtype=np.int64)
        fold_of[order] = assignment.fold_of
        row_folds.append(FoldAssignment(fold_of, spec.k, assignment.method))
    all_rates = fold_error_rates_many(base, row_folds, spec.classifier)
    best = None
    detail = {}
    for name, order, rates in zip(names, orders, all_rates):
        epe, var = epe_and_variance(rates)
        if not fallback:
            detail[name] = (epe, var)
        if best is None or epe < best[0]:
            best = (epe, var, rates, order, name)
    epe, var, rates, order, chosen = best
    return CvReport(
        Procedure.BDSCV,
        rates.tolist(),
        epe,
        var,
        time.perf_counter() - t0,
        spec,
        chosen_reduction=chosen,
        fallback_sort=fallback,
        candidate_detail=detail,
        sorted_order=canon[order].tolist(),
    )


def run_mccv(dataset: Dataset, spec: CvProcedureSpec) -> CvReport:
    """Repeated (optionally stratified) random k-fold CV.

    Repetition r partitions with seed ``derived_seed(spec.seed, r)``; the
    reported EPE and variance are means of the per-repetition values.
    """
    _check(dataset, spec.k)
    stratified = spec.procedure is Procedure.STRATIFIED_MCCV
    t0 = time.perf_counter()
    assignments = []
    for r in range(spec.repetitions):
        seed_r = derived_seed(spec.seed, r)
        if stratified:
            assignments.append(stratified_partition(dataset.labels, spec.k, seed_r))
        else:
            assignments.append(srs_partition(dataset.n, spec.k, seed_r))
    per_fold, detail = [], []
    for rates in fold_error_rates_many(dataset, assignments, spec.classifier):
        per_fold.extend(rates.tolist())
        detail.append(epe_and_variance(rates))
    epe = float(np.mean([d[0] for d in detail]))
    var = float(np.mean([d[1] for d in detail]))
    return CvReport(
        spec.procedure, per_fold, epe, var, time.perf_counter() - t0, spec, repetition_detail=detail
    )


def run_loo(dataset: Dataset, spec: CvProcedureSpec) -> CvReport:
    dataset.validate_for_classification()
    t0 = time.perf_counter()
    rates = fold_error_rates(dataset, loo_partition(dataset.n), spec.classifier)
    epe, var = epe_and_variance(rates)
    return CvReport(Procedure.LOO, rates.tolist(), epe, var, time.perf_counter() - t0, spec)


def run(dataset: Dataset, spec: CvProcedureSpec) -> CvReport:
    if spec.procedure is Procedure.BDSCV:
        return run_bdscv(dataset, spec)
    if spec.procedure is Procedure.LOO:
        return run_loo(dataset, spec)
    return run_mccv(dataset, spec)


@dataclass(frozen=True)
class Ratios:
    phi_epe: float | None
    phi_variance: float | None
    phi_time: float | None


def _ratio(num: float, den: float) -> float | None:
    return num / den if den > 0 else None


def compare(reports: dict, baseline: str | Procedure = Procedure.MCCV) -> dict[str, Ratios]:
    """EPE, variance and wall-time ratios of every report against the baseline.

    A ratio is ``None`` when the baseline denominator is zero.
    """
    reports = {Procedure(k).value: v for k, v in reports.items()}
    key = Procedure(baseline).value
    if key not in reports:
        raise InvalidInputError(f"baseline {key!r} missing from reports")
    base = reports[key]
    return {
        name: Ratios(
            _ratio(r.epe, base.epe),
            _ratio(r.variance, base.variance),
            _ratio(r.wall_time, base.wall_time),
        )
        for name, r in reports.items()
    }
