"""Command-line entry point: ``bdscv {seq,folds,diag,cv,bench} ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 partial campaign
failure.  Data goes to ``--out`` or standard output; diagnostics go to
standard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict, fields
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BdscvError, DataError, InvalidSpecError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_PARTIAL = 0, 1, 2, 3

log = logging.getLogger("bdscv")

SEQ_KINDS = {"e": "e-multiples", "sqrt-prime": "sqrt-prime", "vdc": "van-der-corput", "pseudo-random": "pseudo-random"}
FOLD_METHODS = ("bds", "srs", "stratified", "ordered", "loo")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _shared() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=None, help="random seed")
    p.add_argument("--out", default=None, help="output file (directory for bench run); default stdout")
    p.add_argument("--format", choices=("json", "csv"), default=None, help="machine-readable output format")
    p.add_argument("--verbose", "-v", action="count", default=0, help="more logging on stderr")
    return p


def build_parser() -> argparse.ArgumentParser:
    shared = _shared()
    ap = _Parser(prog="bdscv", description="Best-discrepancy systematic cross-validation toolkit.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("seq", parents=[shared], help="generate a unit-interval sequence or measure its discrepancy")
    p.add_argument("action", nargs="?", choices=("generate", "discrepancy"), default="generate")
    p.add_argument("--kind", choices=sorted(SEQ_KINDS), default="e")
    p.add_argument("--n", type=int, help="sequence length")
    p.add_argument("--p", type=int, help="prime for --kind sqrt-prime")
    p.add_argument("--base", type=int, default=2, help="base for --kind vdc")
    p.add_argument("--in", dest="input", help="sequence file for discrepancy (one value per line)")
    p.add_argument("--trials", type=int, default=50, help="random intervals for discrepancy")

    p = sub.add_parser("folds", parents=[shared], help="emit a fold assignment as CSV (position,fold; 1-based)")
    p.add_argument("--n", type=int, help="number of sorted positions")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--method", choices=FOLD_METHODS, default="bds")
    p.add_argument("--labels", help="label file (one per line) for --method stratified")
    p.add_argument("--start", type=int, help="1-based start for --method ordered")

    p = sub.add_parser("diag", parents=[shared], help="ANOVA summary of a partition, or the SSB study")
    p.add_argument("action", nargs="?", choices=("anova", "study"), default="anova")
    p.add_argument("--values", help="values file (one per line, or first CSV column)")
    p.add_argument("--folds", help="folds CSV as written by the folds subcommand")
    p.add_argument("--icc-form", choices=("subset", "total"), default="subset")
    p.add_argument("--config", help="study config (key = value; ranges as lo,hi)")

    p = sub.add_parser("cv", parents=[shared], help="cross-validate one classifier on one dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--label-col", default="target")
    p.add_argument("--classifier", choices=("logistic", "decision-tree", "naive-bayes"), default="logistic")
    p.add_argument("--procedure", choices=("bdscv", "mccv", "stratified-mccv", "loo"), default="bdscv")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--repetitions", type=int, default=50)
    p.add_argument("--strip-timing", action="store_true")

    p = sub.add_parser("bench", help="benchmark campaigns and datasets")
    bsub = p.add_subparsers(dest="bench_command", parser_class=_Parser, required=True)
    b = bsub.add_parser("run", parents=[shared], help="run a campaign from a config file")
    b.add_argument("--config", required=True)
    b.add_argument("--strip-timing", action="store_true")
    b.add_argument("--parallelism", type=int, default=None)
    b = bsub.add_parser("fetch", parents=[shared], help="download a PMLB dataset into the cache")
    b.add_argument("name")
    b.add_argument("--cache-dir", default=None)
    b.add_argument("--base-url", default=None, help="overrides $BDSCV_PMLB_URL")
    b.add_argument("--offline", action="store_true")
    b = bsub.add_parser("artificial", parents=[shared], help="write the binary-pattern dataset")
    b.add_argument("--copies", type=int, default=5)
    return ap


# --- output helpers -------------------------------------------------------------


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _read_column(path: str) -> list[str]:
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and r[0].strip()]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: empty")
    return [r[0].strip() for r in rows]


def _read_values(path: str) -> np.ndarray:
    cells = _read_column(path)
    try:
        float(cells[0])
    except ValueError:
        cells = cells[1:]  # header
    try:
        return np.array([float(c) for c in cells])
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric value ({exc})") from exc


def _read_folds(path: str) -> np.ndarray:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        pos = np.array([int(r["position"]) for r in rows])
        fold = np.array([int(r["fold"]) for r in rows])
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise DataError(f"{path}: expected a position,fold CSV ({exc})") from exc
    if sorted(pos.tolist()) != list(range(1, pos.size + 1)):
        raise DataError(f"{path}: positions must be 1..n")
    out = np.empty(pos.size, dtype=np.int64)
    out[pos - 1] = fold - 1
    return out


# --- subcommands ---------------------------------------------------------------


def cmd_seq(args) -> int:
    from .sequences import SequenceSpec, discrepancy_report, generate, read_sequence

    if args.action == "discrepancy":
        if not args.input:
            raise UsageError("seq discrepancy: --in is required")
        values = read_sequence(args.input)
        report = discrepancy_report(values, args.trials, 0 if args.seed is None else args.seed)
        _write(json.dumps(report.to_dict(), allow_nan=False) + "\n", args.out)
        return EXIT_OK
    if args.n is None:
        raise UsageError("seq: --n is required")
    kind = SEQ_KINDS[args.kind]
    param = {"sqrt-prime": args.p, "van-der-corput": args.base, "pseudo-random": args.seed}.get(kind)
    if kind == "pseudo-random" and param is None:
        param = 0
    seq = generate(SequenceSpec(kind, args.n, param))
    _write("".join(f"{v:.17g}\n" for v in seq.values), args.out)
    return EXIT_OK


def cmd_folds(args) -> int:
    from . import subsampling as ss

    seed = 0 if args.seed is None else args.seed
    labels = None
    if args.method == "stratified":
        if not args.labels:
            raise UsageError("folds --method stratified needs --labels")
        labels = _read_column(args.labels)
    n = args.n if args.n is not None else (len(labels) if labels is not None else None)
    if n is None:
        raise UsageError("folds: --n is required")
    if args.method == "bds":
        a = ss.bds_partition(n, args.k)
    elif args.method == "srs":
        a = ss.srs_partition(n, args.k, seed)
    elif args.method == "stratified":
        if len(labels) != n:
            raise UsageError("folds: --n disagrees with the label count")
        a = ss.stratified_partition(labels, args.k, seed)
    elif args.method == "ordered":
        a = ss.ordered_systematic_partition(n, args.k, seed=seed, start=args.start)
    else:
        a = ss.loo_partition(n)
    if args.format == "json":
        _write(_json({"k": a.k, "method": a.method.value, "fold_of": (a.fold_of + 1).tolist()}), args.out)
        return EXIT_OK
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["position", "fold"])
    for p, f in enumerate(a.fold_of, start=1):
        w.writerow([p, int(f) + 1])
    _write(buf.getvalue(), args.out)
    return EXIT_OK


def _study_config(path: str):
    from .diagnostics import SsbStudyConfig

    kw = {}
    types = {f.name: f.type for f in fields(SsbStudyConfig)}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep or key not in types:
            raise InvalidSpecError(f"{path}:{lineno}: bad line {raw!r}")
        if key.endswith("_range"):
            lo, hi = (v.strip() for v in value.split(","))
            cast = int if key == "size_range" else float
            kw[key] = (cast(lo), cast(hi))
        elif key in ("dataset_count", "srs_repeats", "k", "seed"):
            kw[key] = int(value)
        else:
            kw[key] = float(value)
    return SsbStudyConfig(**kw)


def cmd_diag(args) -> int:
    from .diagnostics import SsbStudyConfig, anova, ssb_study

    if args.action == "study":
        config = _study_config(args.config) if args.config else SsbStudyConfig()
        if args.seed is not None:
            config = SsbStudyConfig(**{**asdict(config), "seed": args.seed})
        report = ssb_study(config)
        if args.out:
            report.write_csv(args.out)
        sys.stdout.write(_json(report.summary()))
        return EXIT_OK
    if not args.values or not args.folds:
        raise UsageError("diag: --values and --folds are required")
    summary = anova(_read_values(args.values), _read_folds(args.folds), args.icc_form)
    if args.format == "csv":
        d = summary.to_dict()
        d["subset_sizes"] = " ".join(map(str, d["subset_sizes"]))
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(d), lineterminator="\n")
        w.writeheader()
        w.writerow({k: ("" if v is None else v) for k, v in d.items()})
        _write(buf.getvalue(), args.out)
    else:
        _write(_json(summary.to_dict()), args.out)
    return EXIT_OK


def cmd_cv(args) -> int:
    from .classifiers import ClassifierSpec
    from .cv import CvProcedureSpec, run
    from .datasets import ingest

    dataset = ingest(args.data, label_column=args.label_col)
    spec = CvProcedureSpec(
        args.procedure, args.k, args.repetitions, 0 if args.seed is None else args.seed,
        ClassifierSpec(kind=args.classifier),
    )
    report = run(dataset, spec)
    log.info("%s: epe=%.6g variance=%.6g (%.3fs)", args.procedure, report.epe, report.variance, report.wall_time)
    if args.format == "csv":
        cols = ["procedure", "k", "epe", "variance", "chosen_reduction"] + ([] if args.strip_timing else ["wall_time"])
        d = report.to_dict(strip_timing=args.strip_timing)
        d["k"] = spec.k
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        w.writerow(["" if d[c] is None else (repr(d[c]) if isinstance(d[c], float) else d[c]) for c in cols])
        _write(buf.getvalue(), args.out)
    else:
        _write(_json(report.to_dict(strip_timing=args.strip_timing)), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    from . import bench
    from .datasets import fetch, make_artificial, write_dataset

    if args.bench_command == "fetch":
        path = fetch(args.name, base_url=args.base_url, cache_dir=args.cache_dir, offline=args.offline)
        _write(f"{path}\n", args.out)
        return EXIT_OK
    if args.bench_command == "artificial":
        ds = make_artificial(args.copies)
        if args.out:
            write_dataset(ds, args.out)
        else:
            buf = io.StringIO()
            w = csv.writer(buf, delimiter="\t", lineterminator="\n")
            w.writerow(list(ds.feature_names) + ["target"])
            for row, lab in zip(ds.features, ds.labels):
                w.writerow([repr(float(v)) for v in row] + [lab])
            sys.stdout.write(buf.getvalue())
        return EXIT_OK
    config = bench.CampaignConfig.from_file(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.parallelism is not None:
        overrides["parallelism"] = args.parallelism
    if overrides:
        config = bench.CampaignConfig(**{**{f.name: getattr(config, f.name) for f in fields(config)}, **overrides})
    report = bench.run_campaign(config)
    formats = (args.format,) if args.format else ("json", "csv")
    for path in bench.emit(report, formats=formats, strip_timing=args.strip_timing):
        log.info("wrote %s", path)
    if report.failures:
        for f in report.failures:
            print(f"failed: {f}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


COMMANDS = {"seq": cmd_seq, "folds": cmd_folds, "diag": cmd_diag, "cv": cmd_cv, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    level = logging.WARNING - 10 * min(args.verbose or 0, 2) if hasattr(args, "verbose") else logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"bdscv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidSpecError as exc:
        print(f"bdscv: invalid option: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BdscvError, OSError, ValueError) as exc:
        print(f"bdscv: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
