import itertools
import random

import pytest

from cubewalk.pocset import Pocset, random_walled_set


def brute_force_vertices(p: Pocset) -> set[int]:
    """Sign vectors (bit i = wall i on its + side) with no two selected half-spaces disjoint.

    Written independently of the library's search: every sign vector is
    tried and every pair of selected half-spaces is compared with the order.
    """
    out = set()
    n = p.n_walls
    for signs in range(1 << n):
        hs = [2 * i if signs >> i & 1 else 2 * i + 1 for i in range(n)]
        ok = True
        for a, b in itertools.combinations(hs, 2):
            # a and b disjoint  <=>  a <= b*
            if p.leq(a, b ^ 1):
                ok = False
                break
        if ok:
            out.add(signs)
    return out


def random_pocsets(seed: int, count: int, max_walls: int = 12):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n_points = rng.randint(3, 9)
        n_walls = rng.randint(1, max_walls)
        p, pts = random_walled_set(rng, n_points, n_walls)
        if p.n_walls:
            out.append((p, pts))
    return out


@pytest.fixture(scope="session")
def corpus():
    return random_pocsets(2024, 60, 10)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
