import itertools

import pytest
from hypothesis import settings

from zeroerr.channel import Channel

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def all_binary_channels():
    cells = [(x, y) for x in range(2) for y in range(2)]
    for mask in range(16):
        erased = [c for i, c in enumerate(cells) if mask >> i & 1]
        yield Channel.from_erasures(2, erased, name=f"mask{mask}")


@pytest.fixture
def binary_channels():
    return list(all_binary_channels())


@pytest.fixture
def erase_11():
    return Channel.from_erasures(2, [(1, 1)])


@pytest.fixture
def all_erased():
    return Channel.from_erasures(2, itertools.product(range(2), repeat=2))


ACCEPTANCE_LINES = []


@pytest.fixture
def record():
    """Collect one verdict line per acceptance check; echoed in the terminal summary."""

    def _record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
