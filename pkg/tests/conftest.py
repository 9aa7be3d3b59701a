import pytest

from uflbench.instance import Instance, generate


@pytest.fixture
def single():
    return Instance([5], [[3, 4]])


@pytest.fixture
def symmetric():
    # each customer has its own cost-1 facility
    return Instance([1, 1], [[1, 10], [10, 1]])


@pytest.fixture
def dominated():
    # facility 2 (index 1) is expensive and no closer than facility 1
    return Instance([1, 10], [[1, 1], [1, 1]])


def small_instances(count, n_range=(3, 10), m_range=(4, 20), seed0=1):
    """Deterministic mixed-model batch of small instances."""
    out = []
    for s in range(seed0, seed0 + count):
        model = 1 + s % 4
        n = n_range[0] + s % (n_range[1] - n_range[0] + 1)
        m = m_range[0] + (7 * s) % (m_range[1] - m_range[0] + 1)
        out.append(generate(model, n, m, s))
    return out


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one acceptance line and assert on it."""
    def _report(criterion, ok, detail):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  criterion {criterion}: {detail}")
        assert ok, detail
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
