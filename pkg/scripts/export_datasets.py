"""Export small public classification datasets as PMLB-style ``<name>.tsv.gz``.

Sources are the datasets bundled with scikit-learn and the R dataset CSVs
shipped inside the ``pydataset`` package, so no network access is needed.
Every file has numeric feature columns and an integer ``target`` column
(classes coded in sorted label order).  Output is byte-stable across runs.

    python scripts/export_datasets.py --out data
"""

from __future__ import annotations

import argparse
import csv
import gzip
import io
from pathlib import Path

import numpy as np


def _sklearn(loader):
    bunch = loader()
    names = [n.replace(" ", "_") for n in bunch.feature_names]
    return names, bunch.data.astype(float), bunch.target.astype(str)


def _rdata_root() -> Path:
    import importlib

    import pydataset

    root = Path(pydataset.__file__).parent / "resources" / "rdata" / "csv"
    if not root.is_dir():
        # resources ship as a tarball that pydataset unpacks on first use
        importlib.import_module("pydataset.data")

        root = Path.home() / ".pydataset" / "resources" / "rdata" / "csv"
    return root


def _rcsv(*parts, label, features=None, encode=None, drop=()):
    """Rows of one R dataset CSV; rows holding ``NA`` in a used column are skipped."""
    rows = []
    for part in parts:
        with open(_rdata_root() / f"{part}.csv", newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames[1:]  # first column is the R row name
            rows.extend(reader)
    encode = encode or {}
    if features is None:
        features = [h for h in header if h not in (label, *drop)]
    x, y = [], []
    for row in rows:
        cells = [row[f] for f in features]
        if row[label] == "NA" or "NA" in cells:
            continue
        x.append([encode[f][c] if f in encode else float(c) for f, c in zip(features, cells)])
        y.append(row[label])
    return [f.replace(".", "_") for f in features], np.array(x, dtype=float), np.array(y)


def collect() -> dict:
    from sklearn import datasets as skd

    return {
        "iris": _sklearn(skd.load_iris),
        "wine": _sklearn(skd.load_wine),
        "breast_cancer": _sklearn(skd.load_breast_cancer),
        "pima": _rcsv("MASS/Pima.tr", "MASS/Pima.te", label="type"),
        "glass": _rcsv("MASS/fgl", label="type"),
        "breast_w": _rcsv("MASS/biopsy", label="class", drop=("ID",)),
        "crabs": _rcsv(
            "MASS/crabs", label="sp", features=["sex", "FL", "RW", "CL", "CW", "BD"],
            encode={"sex": {"F": 0.0, "M": 1.0}},
        ),
        "synth": _rcsv("MASS/synth.tr", label="yc"),
        "cats": _rcsv("MASS/cats", label="Sex"),
        # bwt defines the label (low = bwt < 2500) and is left out
        "birthwt": _rcsv("MASS/birthwt", label="low", drop=("bwt",)),
        "kyphosis": _rcsv("rpart/kyphosis", label="Kyphosis"),
        "toothgrowth": _rcsv("datasets/ToothGrowth", label="supp"),
        "skulls": _rcsv("HSAUR/skulls", label="epoch"),
    }


def write(path: Path, names, x, y) -> None:
    classes = sorted(set(y.tolist()))
    code = {c: i for i, c in enumerate(classes)}
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(list(names) + ["target"])
    for row, lab in zip(x, y):
        w.writerow([repr(float(v)) for v in row] + [code[lab]])
    with open(path, "wb") as raw, gzip.GzipFile(fileobj=raw, mode="wb", mtime=0) as gz:
        gz.write(buf.getvalue().encode())


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data")
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, (names, x, y) in collect().items():
        write(out / f"{name}.tsv.gz", names, x, y)
        print(f"{name}\tn={x.shape[0]}\tm={x.shape[1]}\tclasses={len(set(y.tolist()))}\tm/n={x.shape[1] / x.shape[0]:.4f}")


if __name__ == "__main__":
    main()
