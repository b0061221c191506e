import json
import os

import pytest

from hardrods import ActivityModel, FiniteList

HERE = os.path.dirname(os.path.abspath(__file__))


@pytest.fixture(scope="session")
def frozen():
    with open(os.path.join(HERE, "frozen_values.json")) as fh:
        return json.load(fh)


def cont(*entries):
    return ActivityModel("continuous", FiniteList(tuple(entries)))


def disc(*entries):
    return ActivityModel("discrete", FiniteList(tuple(entries)))


ACCEPTANCE_LINES = {}


def record(number, ok, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
