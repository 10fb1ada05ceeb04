import functools
import gzip
import http.server
import json
import threading

import numpy as np
import pytest

from bdscv.cli import main
from bdscv.datasets import Dataset, ingest, write_dataset
from bdscv.diagnostics import TABLE1_SORTED

SUBCOMMANDS = [["seq"], ["folds"], ["diag"], ["cv"], ["bench"], ["bench", "run"], ["bench", "fetch"], ["bench", "artificial"]]


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_seq_e(capsys):
    code, out, _ = run_cli(capsys, "seq", "--kind", "e", "--n", "5")
    assert code == 0
    values = [float(v) for v in out.split()]
    assert np.round(values, 4).tolist() == [0.7183, 0.4366, 0.1548, 0.8731, 0.5914]


def test_unknown_subcommand_and_flag(capsys):
    assert run_cli(capsys, "frobnicate")[0] == 1
    code, _, err = run_cli(capsys, "seq", "--n", "3", "--bogus")
    assert code == 1 and "bogus" in err
    assert run_cli(capsys)[0] == 1


@pytest.mark.parametrize("argv", SUBCOMMANDS)
def test_help_everywhere(capsys, argv):
    code, out, _ = run_cli(capsys, *argv, "--help")
    assert code == 0 and "usage" in out


def test_missing_required_option(capsys):
    assert run_cli(capsys, "seq")[0] == 1
    assert run_cli(capsys, "folds")[0] == 1


def test_single_class_cv_is_data_error(capsys, tmp_path):
    p = tmp_path / "one.tsv"
    write_dataset(Dataset("one", np.arange(6.0), ["a"] * 6), p)
    code, out, err = run_cli(capsys, "cv", "--data", str(p), "--k", "2")
    assert code == 2 and out == "" and "data error" in err


def test_k_larger_than_n(capsys):
    assert run_cli(capsys, "folds", "--n", "3", "--k", "5")[0] == 2


def test_seq_discrepancy(capsys, tmp_path):
    seq_file = tmp_path / "x.txt"
    assert run_cli(capsys, "seq", "--n", "100", "--out", str(seq_file))[1] == ""
    code, out, _ = run_cli(capsys, "seq", "discrepancy", "--in", str(seq_file), "--trials", "10", "--seed", "3")
    d = json.loads(out)
    assert code == 0 and d["n"] == 100 and d["randomized_extreme"]["trials"] == 10


def test_folds_then_diag_reproduces_worked_example(capsys, tmp_path):
    folds = tmp_path / "folds.csv"
    values = tmp_path / "values.txt"
    values.write_text("".join(f"{v}\n" for v in TABLE1_SORTED))
    assert run_cli(capsys, "folds", "--n", "21", "--k", "3", "--out", str(folds)) == (0, "", "")
    lines = folds.read_text().splitlines()
    assert lines[0] == "position,fold" and len(lines) == 22
    assert lines[16] == "16,1"  # rank 16 opens the first block
    code, out, _ = run_cli(capsys, "diag", "--values", str(values), "--folds", str(folds))
    d = json.loads(out)
    assert code == 0
    assert abs(d["ssw"] - 0.2168) < 5e-4 and abs(d["ssb"] - 0.0082) < 5e-4 and abs(d["icc"] + 0.1241) < 5e-4


def test_folds_json_and_methods(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "folds", "--n", "6", "--k", "2", "--method", "ordered", "--start", "1", "--format", "json")
    assert code == 0 and json.loads(out)["fold_of"] == [1, 2, 1, 2, 1, 2]
    labels = tmp_path / "labels.txt"
    labels.write_text("a\na\nb\nb\n")
    code, out, _ = run_cli(capsys, "folds", "--k", "2", "--method", "stratified", "--labels", str(labels), "--seed", "4")
    assert code == 0 and len(out.splitlines()) == 5
    assert run_cli(capsys, "folds", "--n", "4", "--method", "loo")[1].splitlines()[-1] == "4,4"


def test_diag_csv_format(capsys, tmp_path):
    values = tmp_path / "v.txt"
    values.write_text("1\n2\n1\n2\n")
    folds = tmp_path / "f.csv"
    folds.write_text("position,fold\n1,1\n2,1\n3,2\n4,2\n")
    code, out, _ = run_cli(capsys, "diag", "--values", str(values), "--folds", str(folds), "--format", "csv")
    header, row = out.splitlines()
    d = dict(zip(header.split(","), row.split(",")))
    assert code == 0 and float(d["icc"]) == -1.0 and float(d["ssb"]) == 0.0


def test_diag_study(capsys, tmp_path):
    cfg = tmp_path / "study.cfg"
    cfg.write_text("dataset_count = 4\nsrs_repeats = 3\nsize_range = 20, 40\n")
    out_csv = tmp_path / "study.csv"
    code, out, _ = run_cli(capsys, "diag", "study", "--config", str(cfg), "--out", str(out_csv), "--seed", "1")
    assert code == 0 and json.loads(out)["datasets"] == 4
    assert len(out_csv.read_text().splitlines()) == 3 + 4
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    assert run_cli(capsys, "diag", "study", "--config", str(bad))[0] == 1


def test_cv_writes_report_file(capsys, tmp_path):
    data = tmp_path / "art.tsv"
    assert run_cli(capsys, "bench", "artificial", "--copies", "5", "--out", str(data)) == (0, "", "")
    assert ingest(data).n == 80
    report = tmp_path / "r.json"
    code, out, _ = run_cli(capsys, "cv", "--data", str(data), "--classifier", "naive-bayes", "--k", "5",
                           "--out", str(report), "--strip-timing")
    assert code == 0 and out == ""
    d = json.loads(report.read_text())
    assert d["epe"] == 0.0 and "wall_time" not in d
    code, out, _ = run_cli(capsys, "cv", "--data", str(data), "--classifier", "decision-tree",
                           "--procedure", "mccv", "--k", "2", "--repetitions", "2", "--format", "csv")
    assert code == 0 and out.splitlines()[0].startswith("procedure,k,epe,variance")


def test_bench_artificial_stdout(capsys):
    code, out, _ = run_cli(capsys, "bench", "artificial", "--copies", "1")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "b0\tb1\tb2\tb3\ttarget" and len(lines) == 17


@pytest.mark.filterwarnings("ignore:.*many folds will miss classes")
def test_bench_run_partial_failure(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(
        "datasets = artificial:1, missing\nclassifiers = naive-bayes\nprocedures = bdscv, mccv\n"
        "k = 4\nrepetitions = 2\noutput_dir = out\n"
    )
    code, out, err = run_cli(capsys, "bench", "run", "--config", str(cfg), "--strip-timing")
    assert code == 3 and out == "" and "missing" in err
    assert {p.name for p in (tmp_path / "out").iterdir()} == {"report.json", "report.csv", "wins.csv", "table4.csv"}
    cfg.write_text("datasets = artificial:1\nclassifiers = naive-bayes\nk = 4\nrepetitions = 2\n")
    code, _, _ = run_cli(capsys, "bench", "run", "--config", str(cfg), "--out", str(tmp_path / "o2"),
                         "--format", "csv", "--seed", "9")
    assert code == 0 and not (tmp_path / "o2" / "report.json").exists()


def test_bench_run_bad_config(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("datasets = x\nk = one\n")
    assert run_cli(capsys, "bench", "run", "--config", str(cfg))[0] == 1
    cfg.write_text("datasets = x\nnonsense = 1\n")
    assert run_cli(capsys, "bench", "run", "--config", str(cfg))[0] == 1


class _QuietHandler(http.server.SimpleHTTPRequestHandler):
    def log_message(self, *args):
        pass


def test_bench_fetch(capsys, tmp_path):
    root = tmp_path / "www" / "toy"
    root.mkdir(parents=True)
    (root / "toy.tsv.gz").write_bytes(gzip.compress(b"a\ttarget\n1\tx\n2\ty\n"))
    server = http.server.ThreadingHTTPServer(
        ("127.0.0.1", 0), functools.partial(_QuietHandler, directory=str(tmp_path / "www"))
    )
    threading.Thread(target=server.serve_forever, daemon=True).start()
    url = f"http://127.0.0.1:{server.server_address[1]}"
    try:
        cache = tmp_path / "cache"
        code, out, _ = run_cli(capsys, "bench", "fetch", "toy", "--base-url", url, "--cache-dir", str(cache))
        assert code == 0 and out.strip() == str(cache / "toy.tsv.gz")
        assert run_cli(capsys, "bench", "fetch", "absent", "--base-url", url, "--cache-dir", str(cache))[0] == 2
        assert run_cli(capsys, "bench", "fetch", "toy", "--offline", "--cache-dir", str(cache))[0] == 0
        assert run_cli(capsys, "bench", "fetch", "other", "--offline", "--cache-dir", str(cache))[0] == 2
    finally:
        server.shutdown()
        server.server_close()
