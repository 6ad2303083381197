import numpy as np
import pytest

from insitu_partition.refkit import load_dataset


@pytest.fixture(scope="session")
def two_break_points():
    return load_dataset("two_break_demo.csv")


@pytest.fixture(scope="session")
def reference_points():
    return load_dataset("reference_series.csv")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rel_close(a, b, rel, scale=None):
    """|a - b| <= rel * scale, with scale defaulting to max(|a|, |b|)."""
    if scale is None:
        scale = max(abs(a), abs(b))
    return abs(a - b) <= rel * scale


# acceptance criteria report: criterion number -> (passed, detail)
ACCEPTANCE = {}


@pytest.fixture
def record():
    def _record(number, ok, detail=""):
        ACCEPTANCE[number] = (bool(ok), detail)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in range(1, 12):
        if number in ACCEPTANCE:
            ok, detail = ACCEPTANCE[number]
            terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        else:
            terminalreporter.write_line(f"criterion {number:2d}: FAIL  (not run)")
