"""Tabular classification datasets: the in-memory type, file I/O and fetching.

Files follow the PMLB layout: delimiter-separated text with a header row and
a label column (``target`` by default), optionally gzip-compressed.
"""

from __future__ import annotations

import csv
import gzip
import io
import itertools
import logging
import os
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, FetchError, InvalidInputError, UnknownDatasetError, UnknownLabelColumnError

log = logging.getLogger(__name__)

PMLB_BASE_URL = "https://github.com/EpistasisLab/pmlb/raw/master/datasets"
BASE_URL_ENV = "BDSCV_PMLB_URL"
MISSING_TOKENS = frozenset({"", "?", "na", "nan", "null", "none"})


@dataclass(frozen=True)
class Dataset:
    name: str
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = ()
    source: str = ""

    def __post_init__(self):
        x = np.asarray(self.features, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        y = np.asarray(self.labels).astype(str)
        if x.ndim != 2 or y.shape != (x.shape[0],):
            raise InvalidInputError("features must be n x m and labels length n")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)
        if not self.feature_names:
            object.__setattr__(
                self, "feature_names", tuple(f"x{i}" for i in range(x.shape[1]))
            )

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def m(self) -> int:
        return self.features.shape[1]

    @property
    def aspect_ratio(self) -> float:
        return self.m / self.n

    @property
    def classes(self) -> list[str]:
        """Distinct labels in first-appearance order."""
        return list(dict.fromkeys(self.labels.tolist()))

    def take(self, index) -> "Dataset":
        index = np.asarray(index)
        return Dataset(
            self.name, self.features[index], self.labels[index], self.feature_names, self.source
        )

    def validate_for_classification(self) -> None:
        if self.n < 2:
            raise DataError(f"{self.name}: need at least 2 instances")
        if len(self.classes) < 2:
            raise DataError(f"{self.name}: need at least 2 distinct labels")


def _open_text(path: Path):
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"\x1f\x8b":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8", newline="")
    return open(path, encoding="utf-8", newline="")


def ingest(path, label_column: str = "target", delimiter: str | None = None, name: str | None = None) -> Dataset:
    """Read a delimiter-separated dataset file.

    The delimiter is sniffed from the header when not given (tab, comma or
    semicolon).  Rows with a missing cell are dropped and counted in the log.
    """
    path = Path(path)
    if name is None:
        name = path.name.split(".")[0]
    try:
        fh = _open_text(path)
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        header_line = fh.readline()
        if not header_line.strip():
            raise DataError(f"{path}: empty file")
        if delimiter is None:
            delimiter = max("\t,;", key=header_line.count)
        reader = csv.reader(itertools.chain([header_line], fh), delimiter=delimiter)
        header = [h.strip() for h in next(reader)]
        if label_column not in header:
            raise UnknownLabelColumnError(f"{path}: no label column {label_column!r} in header")
        li = header.index(label_column)
        feature_names = tuple(h for i, h in enumerate(header) if i != li)
        rows, labels = [], []
        dropped = 0
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} cells, found {len(row)}")
            cells = [c.strip() for c in row]
            if any(c.lower() in MISSING_TOKENS for c in cells):
                dropped += 1
                continue
            try:
                rows.append([float(c) for i, c in enumerate(cells) if i != li])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: non-numeric feature cell ({exc})") from exc
            labels.append(cells[li])
    if dropped:
        log.info("%s: dropped %d rows with missing values", path, dropped)
    if len(rows) < 2:
        raise DataError(f"{path}: fewer than 2 usable rows")
    if not feature_names:
        raise DataError(f"{path}: no feature columns")
    return Dataset(name, np.array(rows, dtype=float), np.array(labels), feature_names, str(path))


def write_dataset(dataset: Dataset, path, label_column: str = "target") -> None:
    """Write a PMLB-style TSV; gzip when the name ends in ``.gz``."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    # no name and mtime=0 in the gzip header: bytes depend on content only
    if opener is gzip.open:
        raw = open(path, "wb")
        fh = io.TextIOWrapper(gzip.GzipFile(filename="", fileobj=raw, mode="wb", mtime=0), encoding="utf-8", newline="")
    else:
        raw = None
        fh = open(path, "w", encoding="utf-8", newline="")
    with fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(list(dataset.feature_names) + [label_column])
        for row, lab in zip(dataset.features, dataset.labels):
            w.writerow([repr(float(v)) for v in row] + [lab])
    if raw is not None:
        raw.close()


def fetch(name: str, base_url: str | None = None, cache_dir=None, offline: bool = False) -> Path:
    """Download ``<base>/<name>/<name>.tsv.gz`` into ``cache_dir`` (idempotent)."""
    base_url = (base_url or os.environ.get(BASE_URL_ENV) or PMLB_BASE_URL).rstrip("/")
    cache_dir = Path(cache_dir or Path.home() / ".cache" / "bdscv")
    target = cache_dir / f"{name}.tsv.gz"
    if target.exists() and target.stat().st_size > 0:
        return target
    if offline:
        raise FetchError(f"{name}: not in cache {cache_dir} and offline mode is on")
    url = f"{base_url}/{name}/{name}.tsv.gz"
    try:
        with urllib.request.urlopen(url, timeout=60) as resp:
            payload = resp.read()
    except urllib.error.HTTPError as exc:
        if exc.code == 404:
            raise UnknownDatasetError(f"{name}: not found at {url}") from exc
        raise FetchError(f"{name}: HTTP {exc.code} from {url}") from exc
    except (urllib.error.URLError, OSError) as exc:
        raise FetchError(f"{name}: cannot reach {url} ({exc})") from exc
    if not payload:
        raise FetchError(f"{name}: empty download from {url}")
    cache_dir.mkdir(parents=True, exist_ok=True)
    tmp = target.with_suffix(".part")
    tmp.write_bytes(payload)
    tmp.replace(target)
    return target


def make_artificial(copies: int = 5) -> Dataset:
    """All 16 binary 4-tuples, one class each, repeated ``copies`` times."""
    if copies < 1:
        raise InvalidInputError("copies must be >= 1")
    patterns = np.array(list(itertools.product((0.0, 1.0), repeat=4)))
    labels = np.array([f"c{i:02d}" for i in range(16)])
    return Dataset(
        f"artificial{copies}",
        np.tile(patterns, (copies, 1)),
        np.tile(labels, copies),
        ("b0", "b1", "b2", "b3"),
        "synthetic",
    )
