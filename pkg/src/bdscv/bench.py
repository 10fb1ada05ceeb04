"""Multi-dataset benchmark campaigns, aspect-ratio grouping and report files.

A campaign runs every (dataset, classifier, procedure) cell, compares each
procedure against MCCV per (dataset, classifier), and aggregates the ratios
by aspect-ratio group.  Outputs are ``report.json``, ``report.csv``,
``wins.csv`` and ``table4.csv``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .classifiers import ClassifierKind, ClassifierSpec
from .cv import CvProcedureSpec, Procedure, compare, run
from .datasets import Dataset, fetch, ingest, make_artificial
from .errors import BdscvError, InvalidInputError, InvalidSpecError
from .subsampling import derived_seed

log = logging.getLogger(__name__)

CAMPAIGN_SCHEMA = "bdscv.campaign-report/1"

# (upper bound, label); the last group is unbounded
ASPECT_GROUPS = ((0.01, "Q1"), (0.02, "Q2"), (0.05, "Q3"), (float("inf"), "Q4"))
GROUP_LABELS = tuple(g for _, g in ASPECT_GROUPS)

# Panel D: (numerator, denominator) procedures of each time ratio
TIME_PAIRS = (
    (Procedure.BDSCV, Procedure.MCCV),
    (Procedure.STRATIFIED_MCCV, Procedure.MCCV),
    (Procedure.LOO, Procedure.MCCV),
    (Procedure.BDSCV, Procedure.STRATIFIED_MCCV),
    (Procedure.LOO, Procedure.STRATIFIED_MCCV),
    (Procedure.BDSCV, Procedure.LOO),
)
RATIO_PANELS = (
    ("A", Procedure.BDSCV),
    ("B", Procedure.STRATIFIED_MCCV),
    ("C", Procedure.LOO),
)


def aspect_group(aspect_ratio: float) -> str:
    """m/n <= 1% -> Q1, (1%, 2%] -> Q2, (2%, 5%] -> Q3, > 5% -> Q4."""
    for bound, label in ASPECT_GROUPS:
        if aspect_ratio <= bound:
            return label
    raise InvalidInputError(f"aspect ratio {aspect_ratio!r} is not a number")


# --- configuration -----------------------------------------------------------


def _split(value: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in value.split(",") if v.strip())


def _bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise InvalidSpecError(f"not a boolean: {value!r}")


@dataclass(frozen=True)
class CampaignConfig:
    """Campaign settings.

    ``datasets`` entries are file paths, names resolved as
    ``data_dir/<name>.tsv.gz`` (or ``.tsv``/``.csv``), or ``artificial`` /
    ``artificial:<copies>``.  With no entries every dataset file in
    ``data_dir`` is used.
    """

    datasets: tuple[str, ...] = ()
    data_dir: str | None = None
    label_column: str = "target"
    classifiers: tuple[str, ...] = tuple(k.value for k in ClassifierKind)
    procedures: tuple[str, ...] = tuple(p.value for p in Procedure)
    k: int = 10
    repetitions: int = 50
    seed: int = 0
    output_dir: str = "campaign-out"
    parallelism: int = 1
    fetch_missing: bool = False
    cache_dir: str | None = None
    classifier_options: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        for name in ("datasets", "classifiers", "procedures"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "classifier_options", tuple(sorted(self.classifier_options)))
        if not self.datasets and not self.data_dir:
            raise InvalidSpecError("campaign needs datasets or a data_dir")
        if not self.classifiers or not self.procedures:
            raise InvalidSpecError("campaign needs at least one classifier and one procedure")
        for c in self.classifiers:
            ClassifierKind(c)
        for p in self.procedures:
            Procedure(p)
        if self.k < 2 or self.repetitions < 1 or self.parallelism < 1:
            raise InvalidSpecError("need k >= 2, repetitions >= 1, parallelism >= 1")
        self.classifier_spec(self.classifiers[0])  # validates the options

    # flat ``key = value`` text; ``#`` starts a comment
    @classmethod
    def from_text(cls, text: str, base_dir: str | Path | None = None) -> "CampaignConfig":
        kw: dict = {}
        options = []
        scalar = {f.name: f.type for f in fields(cls)}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidSpecError(f"line {lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key.startswith("classifier."):
                options.append((key.split(".", 1)[1], value))
            elif key in ("datasets", "classifiers", "procedures"):
                kw[key] = _split(value)
            elif key in ("k", "repetitions", "seed", "parallelism"):
                try:
                    kw[key] = int(value)
                except ValueError:
                    raise InvalidSpecError(f"line {lineno}: {key} must be an integer") from None
            elif key == "fetch_missing":
                kw[key] = _bool(value)
            elif key in scalar and key != "classifier_options":
                kw[key] = value
            else:
                raise InvalidSpecError(f"line {lineno}: unknown key {key!r}")
        if base_dir is not None:
            base = Path(base_dir)
            for key in ("data_dir", "output_dir", "cache_dir"):
                if kw.get(key) and not Path(kw[key]).is_absolute():
                    kw[key] = str(base / kw[key])
        kw["classifier_options"] = tuple(options)
        try:
            return cls(**kw)
        except ValueError as exc:
            raise InvalidSpecError(str(exc)) from exc

    @classmethod
    def from_file(cls, path) -> "CampaignConfig":
        path = Path(path)
        return cls.from_text(path.read_text(), base_dir=path.parent)

    def to_text(self) -> str:
        lines = [
            f"datasets = {', '.join(self.datasets)}",
            f"classifiers = {', '.join(self.classifiers)}",
            f"procedures = {', '.join(self.procedures)}",
        ]
        for key in ("data_dir", "label_column", "k", "repetitions", "seed", "output_dir", "parallelism", "cache_dir"):
            value = getattr(self, key)
            if value is not None:
                lines.append(f"{key} = {value}")
        lines.append(f"fetch_missing = {str(self.fetch_missing).lower()}")
        lines.extend(f"classifier.{k} = {v}" for k, v in self.classifier_options)
        return "\n".join(lines) + "\n"

    def classifier_spec(self, kind: str) -> ClassifierSpec:
        spec = ClassifierSpec(kind=kind)
        changes = {}
        for key, value in self.classifier_options:
            if key not in ClassifierSpec.__dataclass_fields__ or key == "kind":
                raise InvalidSpecError(f"unknown classifier option {key!r}")
            current = getattr(spec, key)
            if value.lower() == "none":
                changes[key] = None
            elif key in ("epochs", "min_split", "max_depth"):
                changes[key] = int(value)
            else:
                changes[key] = type(current)(value) if current is not None else float(value)
        return replace(spec, **changes)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        for key in ("datasets", "classifiers", "procedures"):
            d[key] = list(d[key])
        d["classifier_options"] = {k: v for k, v in self.classifier_options}
        # paths are machine specific and do not affect results
        for key in ("data_dir", "output_dir", "cache_dir"):
            d.pop(key)
        d.pop("parallelism")
        return d


_DATA_SUFFIXES = (".tsv.gz", ".tsv", ".csv.gz", ".csv")


def _dataset_files(data_dir: Path) -> list[str]:
    names = set()
    for p in data_dir.iterdir():
        for suffix in _DATA_SUFFIXES:
            if p.name.endswith(suffix):
                names.add(p.name[: -len(suffix)])
    return sorted(names)


def resolve_datasets(config: CampaignConfig) -> list[str]:
    if config.datasets:
        return list(config.datasets)
    data_dir = Path(config.data_dir)
    if not data_dir.is_dir():
        raise InvalidSpecError(f"data_dir {data_dir} is not a directory")
    return _dataset_files(data_dir)


def load_dataset(entry: str, config: CampaignConfig) -> Dataset:
    if entry == "artificial" or entry.startswith("artificial:"):
        copies = int(entry.split(":", 1)[1]) if ":" in entry else 5
        return replace(make_artificial(copies), name=entry)
    path = Path(entry)
    if not path.exists() and config.data_dir:
        for suffix in _DATA_SUFFIXES:
            candidate = Path(config.data_dir) / f"{entry}{suffix}"
            if candidate.exists():
                path = candidate
                break
    if not path.exists() and config.fetch_missing:
        path = fetch(entry, cache_dir=config.cache_dir)
    if not path.exists():
        raise InvalidInputError(f"dataset {entry!r} not found")
    ds = ingest(path, label_column=config.label_column)
    return replace(ds, name=entry)


# --- campaign ----------------------------------------------------------------


def _tag(text: str) -> int:
    return zlib.crc32(text.encode("utf-8"))


def cell_seed(seed: int, dataset: str, classifier: str, procedure: str) -> int:
    """Independent seed of one campaign cell."""
    return derived_seed(seed, _tag(dataset), _tag(classifier), _tag(procedure))


@dataclass(frozen=True)
class DatasetInfo:
    name: str
    n: int | None = None
    m: int | None = None
    classes: int | None = None
    aspect_ratio: float | None = None
    group: str | None = None
    error: str | None = None


@dataclass(frozen=True)
class CellResult:
    dataset: str
    classifier: str
    procedure: str
    seed: int
    epe: float | None = None
    variance: float | None = None
    wall_time: float | None = None
    chosen_reduction: str | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class RatioRow:
    dataset: str
    classifier: str
    procedure: str
    phi_epe: float | None
    phi_variance: float | None
    phi_time: float | None


@dataclass
class CampaignReport:
    config: CampaignConfig
    datasets: list[DatasetInfo] = field(default_factory=list)
    cells: list[CellResult] = field(default_factory=list)
    ratios: list[RatioRow] = field(default_factory=list)

    @property
    def failures(self) -> list[str]:
        out = [f"{d.name}: {d.error}" for d in self.datasets if d.error]
        out += [f"{c.dataset}/{c.classifier}/{c.procedure}: {c.error}" for c in self.cells if not c.ok]
        return out

    def cell(self, dataset: str, classifier: str, procedure: str) -> CellResult | None:
        for c in self.cells:
            if (c.dataset, c.classifier, c.procedure) == (dataset, classifier, procedure):
                return c
        return None

    def table4(self) -> list[dict]:
        return table4(self)

    def wins(self) -> list[dict]:
        return win_counts(self)


def _run_cell(args) -> CellResult:
    dataset, spec, classifier, procedure = args
    try:
        report = run(dataset, spec)
    except (BdscvError, ValueError) as exc:
        return CellResult(dataset.name, classifier, procedure, spec.seed, error=f"{type(exc).__name__}: {exc}")
    return CellResult(
        dataset.name, classifier, procedure, spec.seed,
        report.epe, report.variance, report.wall_time, report.chosen_reduction,
    )


def run_campaign(config: CampaignConfig) -> CampaignReport:
    """Run every cell; failures are recorded and the campaign carries on."""
    report = CampaignReport(config)
    jobs = []
    for entry in resolve_datasets(config):
        try:
            ds = load_dataset(entry, config)
            ds.validate_for_classification()
        except (BdscvError, OSError, ValueError) as exc:
            log.warning("dataset %s skipped: %s", entry, exc)
            report.datasets.append(DatasetInfo(entry, error=f"{type(exc).__name__}: {exc}"))
            continue
        report.datasets.append(
            DatasetInfo(ds.name, ds.n, ds.m, len(ds.classes), ds.aspect_ratio, aspect_group(ds.aspect_ratio))
        )
        for classifier in config.classifiers:
            cspec = config.classifier_spec(classifier)
            for procedure in config.procedures:
                spec = CvProcedureSpec(
                    procedure, config.k, config.repetitions,
                    cell_seed(config.seed, ds.name, classifier, procedure), cspec,
                )
                jobs.append((ds, spec, classifier, procedure))
    log.info("campaign: %d datasets, %d cells", len(report.datasets), len(jobs))
    if config.parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.parallelism) as pool:
            cells = list(pool.map(_run_cell, jobs))
    else:
        cells = []
        for job in jobs:
            cells.append(_run_cell(job))
            c = cells[-1]
            log.info("%s/%s/%s epe=%s t=%s", c.dataset, c.classifier, c.procedure, c.epe, c.wall_time)
    report.datasets.sort(key=lambda d: d.name)
    report.cells = sorted(cells, key=lambda c: (c.dataset, c.classifier, c.procedure))
    report.ratios = _ratios(report)
    return report


def _ratios(report: CampaignReport) -> list[RatioRow]:
    rows = []
    if Procedure.MCCV.value not in report.config.procedures:
        return rows
    groups: dict[tuple[str, str], dict] = {}
    for c in report.cells:
        if c.ok:
            groups.setdefault((c.dataset, c.classifier), {})[c.procedure] = c
    for (dataset, classifier), by_proc in sorted(groups.items()):
        if Procedure.MCCV.value not in by_proc:
            continue
        for proc, r in sorted(compare(by_proc).items()):
            if proc == Procedure.MCCV.value:
                continue  # the baseline against itself is 1 by definition
            rows.append(RatioRow(dataset, classifier, proc, r.phi_epe, r.phi_variance, r.phi_time))
    return rows


# --- aggregation ---------------------------------------------------------------


def _mean(values) -> float | None:
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else None


def _grouped(values_by_group: dict[str, list]) -> list[tuple[str, float | None, int]]:
    """Group means plus an ``Average`` row equal to the mean of the group means."""
    rows = []
    means = []
    for g in GROUP_LABELS:
        vals = [v for v in values_by_group.get(g, []) if v is not None]
        mean = _mean(vals)
        rows.append((g, mean, len(vals)))
        if mean is not None:
            means.append(mean)
    rows.append(("Average", _mean(means), sum(r[2] for r in rows)))
    return rows


def table4(report: CampaignReport) -> list[dict]:
    """Long-format rows in the shape of the four-panel comparison table.

    Panels A to C hold, per classifier, group means of phi_epe and
    phi_variance of one procedure against MCCV.  Panel D holds per-cell
    wall-time ratios averaged over every classifier.
    """
    group_of = {d.name: d.group for d in report.datasets if d.group}
    rows = []
    for panel, proc in RATIO_PANELS:
        for classifier in report.config.classifiers:
            for metric in ("phi_epe", "phi_variance"):
                by_group: dict[str, list] = {}
                for r in report.ratios:
                    if r.procedure == proc.value and r.classifier == classifier:
                        by_group.setdefault(group_of[r.dataset], []).append(getattr(r, metric))
                if not by_group:
                    continue
                for g, mean, count in _grouped(by_group):
                    rows.append({
                        "panel": panel, "comparison": f"{proc.value}/mccv", "classifier": classifier,
                        "metric": metric, "group": g, "value": mean, "cells": count,
                    })
    times = {(c.dataset, c.classifier, c.procedure): c.wall_time for c in report.cells if c.ok}
    for num, den in TIME_PAIRS:
        by_group = {}
        for (dataset, classifier, proc), t in times.items():
            if proc != num.value:
                continue
            base = times.get((dataset, classifier, den.value))
            if base:
                by_group.setdefault(group_of[dataset], []).append(t / base)
        if not by_group:
            continue
        for g, mean, count in _grouped(by_group):
            rows.append({
                "panel": "D", "comparison": f"{num.value}/{den.value}", "classifier": "all",
                "metric": "phi_time", "group": g, "value": mean, "cells": count,
            })
    return rows


def _lowest(values: dict[str, float]) -> list[str]:
    best = min(values.values())
    tol = 1e-12 * max(1.0, abs(best))
    return [p for p, v in values.items() if v <= best + tol]


def win_counts(report: CampaignReport) -> list[dict]:
    """Per classifier and procedure: datasets where it reaches the lowest EPE / variance.

    Ties award a win to every tied procedure.
    """
    rows = []
    for classifier in report.config.classifiers:
        epe_wins = {p: 0 for p in report.config.procedures}
        var_wins = {p: 0 for p in report.config.procedures}
        for d in report.datasets:
            cells = [c for c in report.cells if c.ok and c.dataset == d.name and c.classifier == classifier]
            if not cells:
                continue
            for p in _lowest({c.procedure: c.epe for c in cells}):
                epe_wins[p] += 1
            for p in _lowest({c.procedure: c.variance for c in cells}):
                var_wins[p] += 1
        for p in report.config.procedures:
            rows.append({"classifier": classifier, "procedure": p, "epe_wins": epe_wins[p], "variance_wins": var_wins[p]})
    return rows


# --- emission ----------------------------------------------------------------

CELL_COLUMNS = (
    "dataset", "classifier", "procedure", "seed", "n", "m", "aspect_ratio", "group",
    "epe", "variance", "wall_time", "phi_epe", "phi_variance", "phi_time", "chosen_reduction", "error",
)
TIMING_COLUMNS = frozenset({"wall_time", "phi_time"})
TABLE4_COLUMNS = ("panel", "comparison", "classifier", "metric", "group", "value", "cells")
WINS_COLUMNS = ("classifier", "procedure", "epe_wins", "variance_wins")


def _cell_rows(report: CampaignReport) -> list[dict]:
    info = {d.name: d for d in report.datasets}
    ratio = {(r.dataset, r.classifier, r.procedure): r for r in report.ratios}
    rows = []
    for c in report.cells:
        d = info[c.dataset]
        r = ratio.get((c.dataset, c.classifier, c.procedure))
        rows.append({
            "dataset": c.dataset, "classifier": c.classifier, "procedure": c.procedure, "seed": c.seed,
            "n": d.n, "m": d.m, "aspect_ratio": d.aspect_ratio, "group": d.group,
            "epe": c.epe, "variance": c.variance, "wall_time": c.wall_time,
            "phi_epe": r.phi_epe if r else None,
            "phi_variance": r.phi_variance if r else None,
            "phi_time": r.phi_time if r else None,
            "chosen_reduction": c.chosen_reduction, "error": c.error,
        })
    return rows


def report_dict(report: CampaignReport, strip_timing: bool = False) -> dict:
    columns = [c for c in CELL_COLUMNS if not (strip_timing and c in TIMING_COLUMNS)]
    t4 = [r for r in report.table4() if not (strip_timing and r["panel"] == "D")]
    return {
        "schema": CAMPAIGN_SCHEMA,
        "timing_stripped": strip_timing,
        "config": report.config.to_dict(),
        "datasets": [{f.name: getattr(d, f.name) for f in fields(d)} for d in report.datasets],
        "cells": [{k: row[k] for k in columns} for row in _cell_rows(report)],
        "table4": t4,
        "wins": report.wins(),
        "failures": report.failures,
    }


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def emit(report: CampaignReport, out_dir=None, formats=("json", "csv"), strip_timing: bool = False) -> list[Path]:
    """Write the campaign files; returns the paths written.

    ``json`` writes report.json; ``csv`` writes report.csv (one row per cell),
    wins.csv and table4.csv.  Output is byte-identical for equal reports.
    """
    out = Path(out_dir if out_dir is not None else report.config.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InvalidInputError(f"cannot create output directory {out}: {exc}") from exc
    data = report_dict(report, strip_timing)
    written = []
    for fmt in formats:
        if fmt not in ("json", "csv"):
            raise InvalidSpecError(f"unknown format {fmt!r}")
    files = {}
    if "json" in formats:
        files["report.json"] = json.dumps(data, indent=2, allow_nan=False) + "\n"
    if "csv" in formats:
        cell_cols = [c for c in CELL_COLUMNS if not (strip_timing and c in TIMING_COLUMNS)]
        files["report.csv"] = _csv_text(cell_cols, data["cells"])
        files["wins.csv"] = _csv_text(WINS_COLUMNS, data["wins"])
        files["table4.csv"] = _csv_text(TABLE4_COLUMNS, data["table4"])
    for name, text in files.items():
        path = out / name
        try:
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise InvalidInputError(f"cannot write {path}: {exc}") from exc
        written.append(path)
    return written


def read_cells_csv(path) -> list[dict]:
    """Parse report.csv back into typed rows (empty cells become None)."""
    ints = {"seed", "n", "m"}
    floats = {"aspect_ratio", "epe", "variance", "wall_time", "phi_epe", "phi_variance", "phi_time"}
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            typed = {}
            for k, v in row.items():
                if v == "":
                    typed[k] = None
                elif k in ints:
                    typed[k] = int(v)
                elif k in floats:
                    typed[k] = float(v)
                else:
                    typed[k] = v
            rows.append(typed)
    return rows


# --- k-fold sweep ----------------------------------------------------------------


@dataclass(frozen=True)
class SweepPoint:
    k: int
    procedure: str
    epe: float
    variance: float
    wall_time: float


def kfold_sweep(dataset: Dataset, ks=range(2, 11), classifier: ClassifierSpec = ClassifierSpec(),
                repetitions: int = 50, seed: int = 0,
                procedures=(Procedure.BDSCV, Procedure.MCCV)) -> list[SweepPoint]:
    """EPE of each procedure as a function of the fold count k."""
    points = []
    for k in ks:
        for proc in procedures:
            proc = Procedure(proc)
            r = run(dataset, CvProcedureSpec(proc, k, repetitions, derived_seed(seed, k), classifier))
            points.append(SweepPoint(k, proc.value, r.epe, r.variance, r.wall_time))
    return points
