"""Unit-interval sequences and their one-dimensional discrepancy.

The best-discrepancy sequence used throughout the package is the sequence of
fractional parts ``{n e}``, n = 1, 2, ...  It is computed with exact integer
arithmetic on a long decimal expansion of ``e`` so that the ranking vector
derived from it never depends on floating-point rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence, Union

import numpy as np

from .errors import InvalidInputError, InvalidSpecError

# e to 110 decimal places (checked against mpmath at 120 digits).
_E_DIGITS = (
    "71828182845904523536028747135266249775724709369995957496696762772407"
    "663035354759457138217852516642742746639193"
)
_SCALE_DIGITS = len(_E_DIGITS)
_SCALE = 10**_SCALE_DIGITS
_E_FRAC_SCALED = int(_E_DIGITS)

PRNG_ALGORITHM = "numpy.random.PCG64 (Generator.random, 53-bit doubles)"


class SequenceKind(str, Enum):
    E_MULTIPLES = "e-multiples"
    SQRT_PRIME = "sqrt-prime"
    VAN_DER_CORPUT = "van-der-corput"
    PSEUDO_RANDOM = "pseudo-random"


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    return all(p % d for d in range(3, math.isqrt(p) + 1, 2))


@dataclass(frozen=True)
class SequenceSpec:
    """What to generate: the sequence family, its parameter and the length.

    ``param`` is the prime ``p`` for ``sqrt-prime``, the base for
    ``van-der-corput`` and the seed for ``pseudo-random``; it is ignored for
    ``e-multiples``.
    """

    kind: SequenceKind
    length: int
    param: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SequenceKind(self.kind))
        if not isinstance(self.length, (int, np.integer)) or self.length < 1:
            raise InvalidSpecError(f"length must be a positive integer, got {self.length!r}")
        if self.kind is SequenceKind.SQRT_PRIME:
            if self.param is None or not _is_prime(int(self.param)):
                raise InvalidSpecError(f"sqrt-prime needs a prime p, got {self.param!r}")
        elif self.kind is SequenceKind.VAN_DER_CORPUT:
            if self.param is None:
                object.__setattr__(self, "param", 2)
            if int(self.param) < 2:
                raise InvalidSpecError(f"van der Corput base must be >= 2, got {self.param!r}")
        elif self.kind is SequenceKind.PSEUDO_RANDOM:
            if self.param is None:
                raise InvalidSpecError("pseudo-random sequences need a seed")
            if not 0 <= int(self.param) < 2**64:
                raise InvalidSpecError("seed must fit in an unsigned 64-bit integer")

    @classmethod
    def e_multiples(cls, n: int) -> "SequenceSpec":
        return cls(SequenceKind.E_MULTIPLES, n)

    @classmethod
    def sqrt_prime(cls, n: int, p: int) -> "SequenceSpec":
        return cls(SequenceKind.SQRT_PRIME, n, p)

    @classmethod
    def van_der_corput(cls, n: int, base: int = 2) -> "SequenceSpec":
        return cls(SequenceKind.VAN_DER_CORPUT, n, base)

    @classmethod
    def pseudo_random(cls, n: int, seed: int) -> "SequenceSpec":
        return cls(SequenceKind.PSEUDO_RANDOM, n, seed)


@dataclass(frozen=True)
class UnitSequence:
    values: np.ndarray
    spec: SequenceSpec

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)


def _frac_multiples(alpha_frac_scaled: int, n: int) -> np.ndarray:
    # residues r_i = i * alpha mod 1, kept as exact integers scaled by 10**P
    out = np.empty(n, dtype=float)
    r = 0
    for i in range(n):
        r = (r + alpha_frac_scaled) % _SCALE
        out[i] = r / _SCALE  # int / int true division is correctly rounded
    return out


def _radical_inverse(n: int, base: int) -> np.ndarray:
    idx = np.arange(1, n + 1, dtype=np.int64)
    out = np.zeros(n, dtype=float)
    scale = 1.0 / base
    while np.any(idx):
        out += (idx % base) * scale
        idx //= base
        scale /= base
    return out


def generate(spec: SequenceSpec) -> UnitSequence:
    """Generate the first ``spec.length`` terms of the requested sequence."""
    n = int(spec.length)
    if spec.kind is SequenceKind.E_MULTIPLES:
        values = _frac_multiples(_E_FRAC_SCALED, n)
    elif spec.kind is SequenceKind.SQRT_PRIME:
        root_scaled = math.isqrt(int(spec.param) * _SCALE * _SCALE)
        values = _frac_multiples(root_scaled % _SCALE, n)
    elif spec.kind is SequenceKind.VAN_DER_CORPUT:
        values = _radical_inverse(n, int(spec.param))
    else:
        rng = np.random.Generator(np.random.PCG64(int(spec.param)))
        values = rng.random(n)
    return UnitSequence(values, spec)


SequenceLike = Union[UnitSequence, Sequence[float], np.ndarray]


def _as_values(seq: SequenceLike) -> np.ndarray:
    values = seq.values if isinstance(seq, UnitSequence) else np.asarray(seq, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise InvalidInputError("a non-empty one-dimensional sequence is required")
    return values


def star_discrepancy(seq: SequenceLike) -> float:
    """Exact star discrepancy ``sup_b |C([0,b))/N - b|`` in O(N log N)."""
    x = np.sort(_as_values(seq))
    n = x.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - x), np.max(x - (i - 1) / n)))


def interval_discrepancy(seq: SequenceLike, a: float, b: float) -> float:
    """``|C([a,b))/N - (b-a)|`` for a single interval."""
    x = _as_values(seq)
    count = np.count_nonzero((x >= a) & (x < b))
    return abs(count / x.size - (b - a))


@dataclass(frozen=True)
class ExtremeDiscrepancyEstimate:
    mean: float
    variance: float
    trials: int
    values: np.ndarray = field(repr=False)


def randomized_extreme_discrepancy(
    seq: SequenceLike, trials: int, seed: int
) -> ExtremeDiscrepancyEstimate:
    """Average interval discrepancy over ``trials`` random intervals.

    Endpoints are two independent uniforms on [0, 1), swapped into order.
    The variance is the population variance of the per-interval values.
    """
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    x = np.sort(_as_values(seq))
    rng = np.random.Generator(np.random.PCG64(seed))
    ends = np.sort(rng.random((trials, 2)), axis=1)
    a, b = ends[:, 0], ends[:, 1]
    counts = np.searchsorted(x, b, side="left") - np.searchsorted(x, a, side="left")
    vals = np.abs(counts / x.size - (b - a))
    return ExtremeDiscrepancyEstimate(float(vals.mean()), float(vals.var()), trials, vals)


@dataclass(frozen=True)
class DiscrepancyReport:
    star_discrepancy: float
    randomized_extreme: ExtremeDiscrepancyEstimate
    n: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "star_discrepancy": self.star_discrepancy,
            "randomized_extreme": {
                "mean": self.randomized_extreme.mean,
                "variance": self.randomized_extreme.variance,
                "trials": self.randomized_extreme.trials,
            },
            "interval_generator": PRNG_ALGORITHM,
        }


def discrepancy_report(seq: SequenceLike, trials: int = 50, seed: int = 0) -> DiscrepancyReport:
    values = _as_values(seq)
    return DiscrepancyReport(
        star_discrepancy(values),
        randomized_extreme_discrepancy(values, trials, seed),
        int(values.size),
    )


def write_sequence(seq: SequenceLike, path) -> None:
    with open(path, "w") as fh:
        for v in _as_values(seq):
            fh.write(f"{v:.17g}\n")


def read_sequence(path) -> np.ndarray:
    with open(path) as fh:
        values = [float(line) for line in fh if line.strip()]
    if not values:
        raise InvalidInputError(f"{path}: no values")
    arr = np.asarray(values)
    if np.any((arr < 0) | (arr >= 1)):
        raise InvalidInputError(f"{path}: values must lie in [0, 1)")
    return arr
