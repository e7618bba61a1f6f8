from pathlib import Path

import numpy as np
import pytest

from treetop import TransitionMatrix, essential_reduce, is_irreducible, row_sum_stats

DATA = Path(__file__).resolve().parent.parent / "data"

GOLDEN = TransitionMatrix.from_rows([[1, 1], [1, 0]])
STAIRCASE = TransitionMatrix.from_rows([[1, 1, 0], [0, 1, 1], [0, 1, 1]])
SSE_A = TransitionMatrix.from_rows([[1, 1, 0], [0, 0, 1], [1, 1, 1]])
FULL2 = TransitionMatrix.full(2)
TWO_GOLDEN = TransitionMatrix.from_rows(
    [[1, 1, 1, 1], [1, 0, 1, 1], [0, 0, 1, 1], [0, 0, 1, 0]]
)


def random_essential(rng, k, tries=1000):
    for _ in range(tries):
        A = TransitionMatrix(rng.integers(0, 2, size=(k, k)))
        if not essential_reduce(A)[1]:
            return A
    raise RuntimeError("no essential matrix found")


def random_strict_irreducible(rng, k_max=5, tries=10_000):
    """Irreducible 0/1 matrix with unequal row sums."""
    for _ in range(tries):
        k = int(rng.integers(2, k_max + 1))
        A = TransitionMatrix(rng.integers(0, 2, size=(k, k)))
        if is_irreducible(A):
            s = row_sum_stats(A)
            if s.M > s.m:
                return A
    raise RuntimeError("no strict irreducible matrix found")


def random_constant_row_sum(rng, k, M):
    rows = np.zeros((k, k), dtype=np.uint8)
    for i in range(k):
        rows[i, rng.choice(k, size=M, replace=False)] = 1
    return TransitionMatrix(rows)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(mod.RESULTS.items()):
        terminalreporter.write_line(line)
