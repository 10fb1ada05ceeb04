import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = ROOT / "data"
CONFIG_DIR = ROOT / "configs"

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, budget): acceptance criterion with a time budget in seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when == "teardown":
        return
    number, title, budget = marker.args
    entry = _criteria.setdefault(number, {"title": title, "budget": budget, "passed": True, "elapsed": 0.0, "notes": []})
    # setup counts too: shared fixtures (the desk campaign) do the heavy work there
    entry["elapsed"] += report.duration
    if report.failed:
        entry["passed"] = False
        entry["notes"].append(f"{item.name} ({report.when})")
    elif report.when == "call":
        entry["passed"] &= report.passed
        entry["notes"].extend(f"{k}: {v}" for k, v in report.user_properties)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        status = "PASS" if e["passed"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {e['title']} ({e['elapsed']:.1f}s, budget {e['budget']:g}s)")
        for note in e["notes"]:
            terminalreporter.write_line(f"    {note}")


@pytest.fixture(scope="session")
def data_dir():
    if not any(DATA_DIR.glob("*.tsv.gz")):
        pytest.fail("vendored datasets missing; run scripts/export_datasets.py")
    return DATA_DIR
