"""Partition quality: one-way ANOVA sums of squares and intraclass correlation.

``icc_form="subset"`` (the default) uses the multiplier m/(m-1) with m the
common subset size; ``icc_form="total"`` uses km/(km-1).  Only the subset
form reproduces the worked 21-instance example (see ``TABLE1_SORTED``).
"""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from .errors import InvalidInputError, InvalidSpecError
from .subsampling import FoldAssignment, bds_partition, derived_seed, srs_partition

# The 21 sorted one-dimensional values of the worked example.
TABLE1_SORTED = np.array([
    1.50, 1.53, 1.55, 1.60, 1.62, 1.63, 1.64, 1.65, 1.66, 1.67, 1.67,
    1.68, 1.68, 1.69, 1.70, 1.70, 1.76, 1.78, 1.80, 1.90, 1.92,
])

IccForm = Literal["subset", "total"]


@dataclass(frozen=True)
class AnovaSummary:
    ssw: float
    ssb: float
    ssto: float
    icc: float | None
    k: int
    subset_sizes: tuple[int, ...]
    icc_undefined: str | None = None  # reason when icc is None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["subset_sizes"] = list(self.subset_sizes)
        return d


def anova(values, assignment: FoldAssignment | np.ndarray, icc_form: IccForm = "subset") -> AnovaSummary:
    """Within/between decomposition of ``values`` under a fold assignment.

    ``values[p]`` belongs to fold ``fold_of[p]``.  SSB weights each fold by
    its size, which equals ``m * sum (mean_i - mean)^2`` for equal sizes.
    ICC needs equal fold sizes and a non-zero total sum of squares; otherwise
    it is ``None`` and ``icc_undefined`` says why.
    """
    if icc_form not in ("subset", "total"):
        raise InvalidSpecError(f"unknown icc_form {icc_form!r}")
    d = np.asarray(values, dtype=float)
    fold_of = assignment.fold_of if isinstance(assignment, FoldAssignment) else np.asarray(assignment)
    if d.ndim != 1 or d.shape != fold_of.shape or d.size == 0:
        raise InvalidInputError("values and fold assignment must be equal-length vectors")
    _, fold_idx = np.unique(fold_of, return_inverse=True)
    k = int(fold_idx.max()) + 1
    sizes = np.bincount(fold_idx, minlength=k)
    means = np.bincount(fold_idx, weights=d, minlength=k) / sizes
    grand = d.mean()
    ssw = float(np.sum((d - means[fold_idx]) ** 2))
    ssb = float(np.sum(sizes * (means - grand) ** 2))
    ssto = float(np.sum((d - grand) ** 2))
    icc, reason = None, None
    m = int(sizes[0])
    if np.any(sizes != m):
        reason = "unequal subset sizes"
    elif ssto == 0:
        reason = "zero total variance"
    elif m < 2:
        reason = "subsets of size 1"
    else:
        mult = m / (m - 1) if icc_form == "subset" else (k * m) / (k * m - 1)
        icc = 1.0 - mult * ssw / ssto
    return AnovaSummary(ssw, ssb, ssto, icc, k, tuple(int(s) for s in sizes), reason)


# --- SSB study -------------------------------------------------------------


@dataclass(frozen=True)
class SsbStudyConfig:
    dataset_count: int = 500
    size_range: tuple[int, int] = (54, 999)
    variance_range: tuple[float, float] = (0.0, 0.025)
    contamination_range: tuple[float, float] = (0.0, 0.3)
    tail_scale_range: tuple[float, float] = (1.0, 8.0)
    shift_range: tuple[float, float] = (0.0, 1.0)
    location: float = 1.0
    srs_repeats: int = 50
    k: int = 3
    seed: int = 2019

    def __post_init__(self):
        lo, hi = self.size_range
        if self.dataset_count < 1 or self.srs_repeats < 1:
            raise InvalidSpecError("dataset_count and srs_repeats must be >= 1")
        if not 2 <= lo <= hi:
            raise InvalidSpecError(f"bad size_range {self.size_range}")
        if self.k < 2 or self.k > lo:
            raise InvalidSpecError(f"k={self.k} incompatible with size_range {self.size_range}")
        for name in ("variance_range", "contamination_range", "tail_scale_range", "shift_range"):
            a, b = getattr(self, name)
            if a > b or a < 0:
                raise InvalidSpecError(f"bad {name} {(a, b)}")
        if self.contamination_range[1] > 1:
            raise InvalidSpecError("contamination is a probability")


GENERATOR_DOC = (
    "x = location + sqrt(variance) * standardize(z); z ~ (1-w) N(0,1) + w N(shift, tail_scale^2); "
    "n ~ U{size_range}, variance ~ U(variance_range), w ~ U(contamination_range), "
    "tail_scale ~ U(tail_scale_range), shift ~ U(shift_range); PCG64 streams from SeedSequence(seed, index)"
)


def _moments(x: np.ndarray) -> tuple[float, float, float]:
    var = float(x.var())
    if var == 0:
        return 0.0, 0.0, 0.0
    z = (x - x.mean()) / np.sqrt(var)
    return var, float(np.mean(z**3)), float(np.mean(z**4) - 3.0)


def synthetic_dataset(config: SsbStudyConfig, index: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([config.seed, index])))
    n = int(rng.integers(config.size_range[0], config.size_range[1] + 1))
    variance = rng.uniform(*config.variance_range)
    w = rng.uniform(*config.contamination_range)
    scale = rng.uniform(*config.tail_scale_range)
    shift = rng.uniform(*config.shift_range)
    heavy = rng.random(n) < w
    z = np.where(heavy, rng.normal(shift, scale, n), rng.normal(0.0, 1.0, n))
    sd = z.std()
    z = (z - z.mean()) / sd if sd > 0 else np.zeros(n)
    return config.location + np.sqrt(variance) * z


@dataclass(frozen=True)
class SsbComparison:
    n: int
    ssb_bds: float
    ssb_srs_mean: float
    ratio_mean: float | None  # mean over repeats of ssb_srs / ssb_bds
    variance: float = 0.0
    skewness: float = 0.0
    excess_kurtosis: float = 0.0


def compare_ssb(values, k: int, srs_seeds) -> SsbComparison:
    """SSB of the sorted data under the BDS partition vs repeated SRS partitions."""
    d = np.sort(np.asarray(values, dtype=float))
    n = d.size
    bds = anova(d, bds_partition(n, k)).ssb
    srs = np.array([anova(d, srs_partition(n, k, s)).ssb for s in srs_seeds])
    ratio = float(np.mean(srs / bds)) if bds > 0 else None
    var, skew, kurt = _moments(d)
    return SsbComparison(n, bds, float(srs.mean()), ratio, var, skew, kurt)


@dataclass
class SsbStudyReport:
    config: SsbStudyConfig
    rows: list[SsbComparison] = field(default_factory=list)

    @property
    def mean_ssb_bds(self) -> float:
        return float(np.mean([r.ssb_bds for r in self.rows]))

    @property
    def mean_ssb_srs(self) -> float:
        return float(np.mean([r.ssb_srs_mean for r in self.rows]))

    @property
    def mean_ratio(self) -> float | None:
        ratios = [r.ratio_mean for r in self.rows if r.ratio_mean is not None]
        return float(np.mean(ratios)) if ratios else None

    def summary(self) -> dict:
        return {
            "datasets": len(self.rows),
            "mean_ssb_bds": self.mean_ssb_bds,
            "mean_ssb_srs": self.mean_ssb_srs,
            "bds_over_srs": self.mean_ssb_bds / self.mean_ssb_srs if self.mean_ssb_srs > 0 else None,
            "mean_ratio_srs_over_bds": self.mean_ratio,
            "generator": GENERATOR_DOC,
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(f"# generator: {GENERATOR_DOC}\n")
            fh.write(f"# config: {asdict(self.config)}\n")
            w = csv.writer(fh, lineterminator="\n")
            cols = list(SsbComparison.__dataclass_fields__)
            w.writerow(["index"] + cols)
            for i, r in enumerate(self.rows):
                w.writerow([i] + ["" if getattr(r, c) is None else repr(getattr(r, c)) for c in cols])


def ssb_study(config: SsbStudyConfig = SsbStudyConfig()) -> SsbStudyReport:
    report = SsbStudyReport(config)
    for i in range(config.dataset_count):
        x = synthetic_dataset(config, i)
        seeds = [derived_seed(config.seed, i, r) for r in range(config.srs_repeats)]
        report.rows.append(compare_ssb(x, config.k, seeds))
    return report
