import functools
import gzip
import http.server
import logging
import socket
import threading

import numpy as np
import pytest

from bdscv.datasets import (
    BASE_URL_ENV,
    Dataset,
    fetch,
    ingest,
    make_artificial,
    write_dataset,
)
from bdscv.errors import (
    DataError,
    FetchError,
    InvalidInputError,
    UnknownDatasetError,
    UnknownLabelColumnError,
)


def test_ingest_three_rows(tmp_path):
    p = tmp_path / "tiny.tsv"
    p.write_text("a\tb\ttarget\n1\t2\tx\n3\t4\ty\n5\t6\tx\n")
    ds = ingest(p)
    assert (ds.n, ds.m) == (3, 2) and ds.name == "tiny"
    assert ds.feature_names == ("a", "b") and ds.labels.tolist() == ["x", "y", "x"]


def test_ingest_label_column_anywhere_and_comma(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("cls,a,b\n0,1.5,2\n1,3,4e-1\n")
    ds = ingest(p, label_column="cls")
    assert ds.features.tolist() == [[1.5, 2.0], [3.0, 0.4]] and ds.labels.tolist() == ["0", "1"]


def test_ingest_gzip(tmp_path):
    p = tmp_path / "g.tsv.gz"
    with gzip.open(p, "wt") as fh:
        fh.write("a\ttarget\n1\tp\n2\tq\n")
    assert ingest(p).n == 2


def test_missing_label_column(tmp_path):
    p = tmp_path / "t.tsv"
    p.write_text("a\tb\n1\t2\n3\t4\n")
    with pytest.raises(UnknownLabelColumnError):
        ingest(p)


def test_non_numeric_feature(tmp_path):
    p = tmp_path / "t.tsv"
    p.write_text("a\ttarget\n1\tx\nred\ty\n")
    with pytest.raises(DataError):
        ingest(p)


def test_missing_rows_dropped_and_logged(tmp_path, caplog):
    p = tmp_path / "t.tsv"
    p.write_text("a\tb\ttarget\n1\t?\tx\n2\t3\ty\nNA\t1\tx\n4\t5\tx\n")
    with caplog.at_level(logging.INFO, logger="bdscv.datasets"):
        ds = ingest(p)
    assert ds.n == 2
    assert "dropped 2 rows" in caplog.text


def test_too_few_rows_after_cleaning(tmp_path):
    p = tmp_path / "t.tsv"
    p.write_text("a\ttarget\n?\tx\n1\ty\n")
    with pytest.raises(DataError):
        ingest(p)


def test_ragged_row(tmp_path):
    p = tmp_path / "t.tsv"
    p.write_text("a\tb\ttarget\n1\t2\tx\n1\ty\n")
    with pytest.raises(DataError):
        ingest(p)


def test_vendored_iris_matches_line_count(data_dir):
    path = data_dir / "iris.tsv.gz"
    with gzip.open(path, "rt") as fh:
        lines = fh.read().splitlines()
    header = lines[0].split("\t")
    ds = ingest(path)
    assert (ds.n, ds.m) == (len(lines) - 1, len(header) - 1) == (150, 4)
    assert len(ds.classes) == 3


def test_every_vendored_dataset_is_valid(data_dir):
    for path in sorted(data_dir.glob("*.tsv.gz")):
        ds = ingest(path)
        ds.validate_for_classification()
        assert np.all(np.isfinite(ds.features))


def test_make_artificial():
    art = make_artificial(5)
    assert (art.n, art.m) == (80, 4)
    counts = {c: int(np.sum(art.labels == c)) for c in art.classes}
    assert len(counts) == 16 and set(counts.values()) == {5}
    one = make_artificial(1)
    assert len({tuple(r) for r in one.features}) == 16
    rows = {}
    for r, lab in zip(art.features.tolist(), art.labels):
        assert rows.setdefault(tuple(r), lab) == lab
    with pytest.raises(InvalidInputError):
        make_artificial(0)


@pytest.mark.parametrize("suffix", [".tsv", ".tsv.gz"])
def test_write_round_trip_and_stable_bytes(tmp_path, suffix):
    ds = Dataset("d", [[0.1, 1e-17], [2.0, -3.5]], ["u", "v"], ("p", "q"))
    a, b = tmp_path / f"a{suffix}", tmp_path / f"b{suffix}"
    write_dataset(ds, a)
    write_dataset(ds, b)
    assert a.read_bytes() == b.read_bytes()
    back = ingest(a)
    assert back.features.tobytes() == ds.features.tobytes()
    assert back.labels.tolist() == ["u", "v"] and back.feature_names == ("p", "q")


def test_dataset_validation():
    with pytest.raises(InvalidInputError):
        Dataset("bad", np.ones((3, 2)), ["a", "b"])
    with pytest.raises(DataError):
        Dataset("one", np.ones((3, 1)), ["a"] * 3).validate_for_classification()


# --- fetching from a local server ---------------------------------------------------


class _QuietHandler(http.server.SimpleHTTPRequestHandler):
    def log_message(self, *args):
        pass


@pytest.fixture
def pmlb_server(tmp_path):
    root = tmp_path / "www"
    (root / "toy").mkdir(parents=True)
    payload = gzip.compress(b"a\ttarget\n1\tx\n2\ty\n", mtime=0)
    (root / "toy" / "toy.tsv.gz").write_bytes(payload)
    handler = functools.partial(_QuietHandler, directory=str(root))
    server = http.server.ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}", payload
    server.shutdown()
    server.server_close()


def test_fetch_then_cache_hit(pmlb_server, tmp_path):
    url, payload = pmlb_server
    cache = tmp_path / "cache"
    first = fetch("toy", base_url=url, cache_dir=cache)
    assert first.read_bytes() == payload
    again = fetch("toy", base_url="http://127.0.0.1:9", cache_dir=cache)
    assert again == first and again.read_bytes() == payload
    assert fetch("toy", cache_dir=cache, offline=True) == first
    assert ingest(first).n == 2


def test_fetch_unknown_name(pmlb_server, tmp_path):
    url, _ = pmlb_server
    with pytest.raises(UnknownDatasetError):
        fetch("nope", base_url=url, cache_dir=tmp_path / "cache")


def test_fetch_env_override(pmlb_server, tmp_path, monkeypatch):
    url, payload = pmlb_server
    monkeypatch.setenv(BASE_URL_ENV, url)
    assert fetch("toy", cache_dir=tmp_path / "c").read_bytes() == payload


def _closed_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_fetch_network_failure(tmp_path):
    with pytest.raises(FetchError):
        fetch("toy", base_url=f"http://127.0.0.1:{_closed_port()}", cache_dir=tmp_path / "c")
    with pytest.raises(FetchError):
        fetch("toy", cache_dir=tmp_path / "c", offline=True)
