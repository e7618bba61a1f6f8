import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treetop import TransitionMatrix, block_count_exact, enumerate_line_words, enumerate_tree_blocks, verify_recursion
from treetop.errors import BudgetExceeded
from treetop.oracle import BUDGET_ENV, TreeBlock, node_addresses, subtree_dp_counts

from conftest import GOLDEN, STAIRCASE

small_matrices = st.integers(1, 3).flatmap(
    lambda k: st.lists(st.lists(st.integers(0, 1), min_size=k, max_size=k), min_size=k, max_size=k)
).map(TransitionMatrix.from_rows)


def test_node_addresses():
    assert node_addresses(2, 2) == ["", "0", "1", "00", "01", "10", "11"]


def test_golden_depth_one():
    res = enumerate_tree_blocks(GOLDEN, 2, 1, limit=10)
    assert res.count == 5 and res.subtotals == (4, 1)
    assert len(res.sample) == 5
    assert all(b.is_admissible(GOLDEN) for b in res.sample)
    assert [b.labels for b in res.sample] == sorted(b.labels for b in res.sample)


def test_naive_product_agrees():
    # independent of the kernels: filter every labeling of Delta_2
    nodes = 7
    count = 0
    for lab in itertools.product(range(2), repeat=nodes):
        if TreeBlock(2, 2, lab).is_admissible(GOLDEN):
            count += 1
    assert count == enumerate_tree_blocks(GOLDEN, 2, 2).count == 41


def test_staircase_oracle():
    res = verify_recursion(STAIRCASE, 2, 2)
    assert res.ok and res.verified_through == 2
    assert enumerate_tree_blocks(STAIRCASE, 2, 2).subtotals == (64, 64, 64)


def test_budget_refusal():
    with pytest.raises(BudgetExceeded):
        enumerate_tree_blocks(GOLDEN, 2, 5, budget=1000)


def test_budget_env(monkeypatch):
    monkeypatch.setenv(BUDGET_ENV, "100")
    with pytest.raises(BudgetExceeded):
        enumerate_tree_blocks(GOLDEN, 2, 3)
    res = verify_recursion(GOLDEN, 2, 4)
    assert res.ok and res.budget_limited and res.verified_through == 1  # 2**7 > 100


def test_dp_method():
    res = enumerate_tree_blocks(GOLDEN, 2, 6, method="dp")
    assert res.subtotals == block_count_exact(GOLDEN, 2, 6).exact_counts


def test_line_words():
    assert enumerate_line_words(GOLDEN, 3) == 5
    assert enumerate_line_words(GOLDEN, 3, method="brute") == 5
    assert enumerate_line_words(TransitionMatrix([[0, 0], [1, 0]]), 3) == 0


@given(small_matrices, st.integers(2, 3), st.integers(0, 2))
@settings(max_examples=150, deadline=None)
def test_oracle_matches_recursion(A, d, n):
    got = enumerate_tree_blocks(A, d, n).subtotals
    assert got == block_count_exact(A, d, n).exact_counts
    assert subtree_dp_counts(A, d, n) == got


@given(small_matrices, st.integers(1, 6))
def test_line_words_transfer_vs_brute(A, n):
    assert enumerate_line_words(A, n) == enumerate_line_words(A, n, method="brute")


def test_line_words_growth_rate():
    n = 40
    c = enumerate_line_words(GOLDEN, n)
    assert math.log(c) / n == pytest.approx(math.log((1 + 5**0.5) / 2), abs=0.02)
