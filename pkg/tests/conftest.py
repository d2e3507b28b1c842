import re
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

SHAPES = ("square", "disk", "cross")


def images(max_side=16, min_side=1):
    return st.integers(min_side, max_side).flatmap(
        lambda h: st.integers(min_side, max_side).flatmap(lambda w: arrays(np.uint8, (h, w)))
    )


def random_image(rng, shape=(16, 16), levels=256):
    return rng.integers(0, levels, size=shape, dtype=np.int64).astype(np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance criteria summary: one pass/fail line per criterion
_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::test_ac" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _acceptance.append((name, report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, duration in _acceptance:
        crit = "AC-" + re.match(r"test_ac(\d+)", name).group(1)
        terminalreporter.write_line(f"{crit:<6} {'PASS' if outcome == 'passed' else 'FAIL'}  {name}  ({duration:.2f}s)")
