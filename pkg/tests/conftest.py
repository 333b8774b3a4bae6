from __future__ import annotations

import numpy as np
import pytest

from listdecode.code import LinearCode


@pytest.fixture
def full22() -> LinearCode:
    return LinearCode(2, [[1, 0], [0, 1]])


@pytest.fixture
def rep2() -> LinearCode:
    return LinearCode(2, [[1, 1]])


def random_code(rng: np.random.Generator, q: int, k: int, n: int) -> LinearCode:
    return LinearCode(q, rng.integers(0, q, size=(k, n)))


_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        _ACCEPTANCE[props["criterion"]] = ("PASS" if report.passed else "FAIL", props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        status, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {detail}")
