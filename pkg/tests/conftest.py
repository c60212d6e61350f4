import numpy as np
import pytest

from wizer.circle import AngleGrid


def brute_force_cyclic_sign_changes(x):
    """S^- of the sequence re-read from every nonzero start; all starts must agree."""
    x = list(x)
    n = len(x)
    counts = set()
    for j in range(n):
        if x[j] == 0:
            continue
        seq = [v for v in x[j:] + x[:j] + [x[j]] if v != 0]
        counts.add(sum(1 for a, b in zip(seq, seq[1:]) if (a > 0) != (b > 0)))
    if not counts:
        return 0
    assert len(counts) == 1, f"start-dependent count {counts} for {x}"
    return counts.pop()


@pytest.fixture
def grid64():
    return AngleGrid(64)


@pytest.fixture
def grid512():
    return AngleGrid(512)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
