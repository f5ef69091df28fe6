import itertools

import numpy as np
import pytest

from qbsearch.oracle import And, Not, Or, Var, Xor


def random_expr(rng: np.random.Generator, n: int, depth: int):
    """Random expression tree over x1..xn, at most ``depth`` levels deep."""
    if depth <= 1 or rng.random() < 0.25:
        return Var(int(rng.integers(1, n + 1)))
    kind = rng.integers(0, 4)
    if kind == 0:
        return Not(random_expr(rng, n, depth - 1))
    if kind == 3:
        return Xor(random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1))
    arity = int(rng.integers(2, 4))
    children = tuple(random_expr(rng, n, depth - 1) for _ in range(arity))
    return And(children) if kind == 1 else Or(children)


def brute_table(fn, n):
    return [int(fn(x)) for x in range(2**n)]


def all_tables(n):
    return [list(bits) for bits in itertools.product((0, 1), repeat=2**n)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
