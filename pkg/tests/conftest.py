import itertools

import pytest

from matchlab.groups import parse_group


def brute_matchings(g, A, B):
    """All bijections f: A -> B with a + f(a) outside A, as sorted pair tuples."""
    aset = set(A)
    out = []
    for perm in itertools.permutations(B):
        if all(g.add(a, b) not in aset for a, b in zip(A, perm)):
            out.append(tuple(zip(A, perm)))
    return sorted(out)


@pytest.fixture
def z7():
    return parse_group("z7")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
