import math

import pytest

P_VALUES = [1.0, 2.0, math.inf]


@pytest.fixture(params=P_VALUES, ids=["p1", "p2", "pinf"])
def p(request):
    return request.param


# one summary line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE = {}


def record(number: int, title: str, passed: bool, detail: str = "") -> str:
    line = f"acceptance {number}: {'PASS' if passed else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE[number] = line
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
