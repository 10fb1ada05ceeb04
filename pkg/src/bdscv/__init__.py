"""Best-discrepancy systematic cross-validation.

Folds are formed by sorting instances along a one-dimensional projection
and dealing sorted positions to folds through the ranking vector of the
sequence ``{n e}``.
"""

from .classifiers import ClassifierKind, ClassifierSpec
from .cv import CvProcedureSpec, CvReport, Procedure, compare, run, run_bdscv, run_loo, run_mccv
from .datasets import Dataset, fetch, ingest, make_artificial
from .diagnostics import anova, ssb_study
from .sequences import SequenceSpec, UnitSequence, generate, star_discrepancy
from .subsampling import FoldAssignment, bds_partition, ranking_vector

__version__ = "0.1.0"

__all__ = [
    "ClassifierKind", "ClassifierSpec", "CvProcedureSpec", "CvReport", "Dataset", "FoldAssignment",
    "Procedure", "SequenceSpec", "UnitSequence", "anova", "bds_partition", "compare", "fetch",
    "generate", "ingest", "make_artificial", "ranking_vector", "run", "run_bdscv", "run_loo",
    "run_mccv", "ssb_study", "star_discrepancy",
]
