import numpy as np
import pytest

from selfcontract import instances

_LOG = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LOG] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LOG, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines):
        terminalreporter.write_line(line[1])


@pytest.fixture
def record(request):
    """``record(number, name, ok, detail)`` logs one acceptance line."""
    log = request.config.stash[_LOG]

    def _record(number, name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {name}" + (f" ({detail})" if detail else "")
        log.append((number, line))
        print(line)
        return ok

    return _record


CORPUS_DIMS = (2, 3, 5)


@pytest.fixture(scope="session")
def prox_corpus():
    """100 proximal traces of random PSD quadratics, seeds 0..99, 30 steps."""
    return [instances.prox_polyline(CORPUS_DIMS[s % 3], 30, s) for s in range(100)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
