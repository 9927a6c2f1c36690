import random
import sys
import time
from pathlib import Path

import pytest

from wellpointed.functor import parse_functor

sys.path.insert(0, str(Path(__file__).parent))

SAMPLES = Path(__file__).resolve().parent.parent / "samples"

# functors exercised by the property tests
FUNCTORS = [
    "Id*Id+{leaf}",
    "Id^{a,b}*{0,1}",
    "P(Id)",
    "P({a,b}*Id)",
    "Id*{a,b}+{end}",
]


@pytest.fixture
def rng():
    return random.Random(20261018)


@pytest.fixture(params=FUNCTORS)
def functor(request):
    return parse_functor(request.param)


@pytest.fixture
def samples():
    return SAMPLES


# ---------------------------------------------------------------- acceptance report

ACCEPTANCE_LINES: list[str] = []


class Criterion:
    def __init__(self, number: int, title: str, limit: float):
        self.number = number
        self.title = title
        self.limit = limit
        self.start = time.perf_counter()
        self.elapsed = None
        self.detail = ""

    def finish(self, detail: str = "") -> None:
        """Stop the clock and enforce the time bound."""
        self.elapsed = time.perf_counter() - self.start
        self.detail = detail
        assert self.elapsed < self.limit, f"took {self.elapsed:.2f}s, limit {self.limit}s"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        item.call_report = report


@pytest.fixture
def criterion(request):
    made = []

    def make(number: int, title: str, limit: float) -> Criterion:
        c = Criterion(number, title, limit)
        made.append(c)
        return c

    yield make
    report = getattr(request.node, "call_report", None)
    ok = report is not None and report.passed
    for c in made:
        elapsed = c.elapsed if c.elapsed is not None else time.perf_counter() - c.start
        detail = f"; {c.detail}" if c.detail else ""
        line = (
            f"criterion {c.number:>2}: {'PASS' if ok else 'FAIL'}  "
            f"{c.title} ({elapsed:.2f}s of {c.limit:g}s{detail})"
        )
        ACCEPTANCE_LINES.append(line)
        print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
