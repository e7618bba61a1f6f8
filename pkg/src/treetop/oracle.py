"""Brute-force counts used to cross-check the block-count recursion.

Nothing here calls :mod:`treetop.counting`; the only shared input is the
matrix. Node addresses are words over ``0..d-1`` listed breadth-first with
children in letter order: ``"", "0", "1", "00", "01", ...``.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass

from . import kernels
from .core import TransitionMatrix
from .errors import BudgetExceeded

__all__ = [
    "BUDGET_ENV",
    "DEFAULT_BUDGET",
    "TreeBlock",
    "EnumerationResult",
    "VerificationResult",
    "node_addresses",
    "enumeration_budget",
    "enumerate_tree_blocks",
    "subtree_dp_counts",
    "enumerate_line_words",
    "verify_recursion",
]

BUDGET_ENV = "TREETOP_BUDGET"
DEFAULT_BUDGET = 10**8


def enumeration_budget(budget: int | None = None) -> int:
    if budget is not None:
        return int(budget)
    env = os.environ.get(BUDGET_ENV)
    return int(float(env)) if env else DEFAULT_BUDGET


def node_addresses(d: int, n: int) -> list[str]:
    out = [""]
    level = [""]
    for _ in range(n):
        level = [w + str(c) for w in level for c in range(d)]
        out.extend(level)
    return out


@dataclass(frozen=True)
class TreeBlock:
    d: int
    n: int
    labels: tuple[int, ...]  # breadth-first node order

    def as_mapping(self, alphabet=None) -> dict[str, object]:
        names = alphabet if alphabet is not None else range(max(self.labels) + 1)
        names = list(names)
        return {addr: names[s] for addr, s in zip(node_addresses(self.d, self.n), self.labels)}

    def is_admissible(self, A: TransitionMatrix) -> bool:
        return all(
            A.entries[self.labels[(p - 1) // self.d], self.labels[p]]
            for p in range(1, len(self.labels))
        )


@dataclass(frozen=True)
class EnumerationResult:
    count: int
    subtotals: tuple[int, ...]
    sample: tuple[TreeBlock, ...] = ()
    method: str = "exhaustive"


def _n_nodes(d: int, n: int) -> int:
    return (d ** (n + 1) - 1) // (d - 1)


def enumerate_tree_blocks(
    A: TransitionMatrix,
    d: int,
    n: int,
    limit: int = 0,
    budget: int | None = None,
    method: str = "exhaustive",
) -> EnumerationResult:
    """Count admissible labelings of Delta_n.

    ``method="exhaustive"`` visits every admissible labeling and refuses when
    ``k ** |Delta_n|`` exceeds the budget. ``method="dp"`` folds counts up the
    explicit node list and has no budget; it cannot return samples.
    """
    if n < 0:
        raise ValueError("depth must be nonnegative")
    nodes = _n_nodes(d, n)
    if method == "dp":
        sub = subtree_dp_counts(A, d, n)
        return EnumerationResult(sum(sub), sub, (), "dp")
    if method != "exhaustive":
        raise ValueError(f"unknown method {method!r}")
    cap = enumeration_budget(budget)
    if A.k == 0:
        return EnumerationResult(0, ())
    if nodes * math.log(A.k) > math.log(cap) + 1e-12:
        raise BudgetExceeded(
            f"{A.k}**{nodes} candidate labelings exceed the enumeration budget {cap}"
        )
    counts, samples = kernels.tree_block_search(A.entries, d, nodes, limit)
    blocks = tuple(TreeBlock(d, n, tuple(int(s) for s in row)) for row in samples)
    sub = tuple(int(c) for c in counts)
    return EnumerationResult(sum(sub), sub, blocks)


def subtree_dp_counts(A: TransitionMatrix, d: int, n: int) -> tuple[int, ...]:
    """Per-root counts by folding explicit children lists from the leaves up."""
    addrs = node_addresses(d, n)
    where = {a: p for p, a in enumerate(addrs)}
    children = [[where[a + str(c)] for c in range(d)] if len(a) < n else [] for a in addrs]
    table: list[list[int] | None] = [None] * len(addrs)
    succ = [A.successors(i) for i in range(A.k)]
    for p in reversed(range(len(addrs))):
        row = []
        for s in range(A.k):
            val = 1
            for c in children[p]:
                val *= sum(table[c][t] for t in succ[s])
            row.append(val)
        table[p] = row
    return tuple(table[0]) if addrs else ()


def enumerate_line_words(A: TransitionMatrix, n: int, method: str = "transfer") -> int:
    """Number of length-n words w with A[w_t, w_{t+1}] = 1 for every t."""
    if n < 1:
        raise ValueError("word length must be >= 1")
    if method == "brute":
        return sum(
            all(A.entries[w[t], w[t + 1]] for t in range(n - 1))
            for w in itertools.product(range(A.k), repeat=n)
        )
    succ = [A.successors(i) for i in range(A.k)]
    ends = [1] * A.k  # ends[i] = words of current length starting at i
    for _ in range(n - 1):
        ends = [sum(ends[j] for j in s) for s in succ]
    return sum(ends)


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    verified_through: int
    mismatch: tuple | None = None  # (n, oracle subtotals, recursion subtotals)
    budget_limited: bool = False


def verify_recursion(
    A: TransitionMatrix,
    d: int,
    n_max: int,
    budget: int | None = None,
    method: str = "exhaustive",
) -> VerificationResult:
    """Compare oracle subtotals with the recursion x_i(n) = ((A x(n-1))_i)**d."""
    from .counting import iter_exact_counts

    gen = iter_exact_counts(A, d)
    verified = -1
    for n in range(n_max + 1):
        expected = next(gen)
        try:
            got = enumerate_tree_blocks(A, d, n, budget=budget, method=method).subtotals
        except BudgetExceeded:
            return VerificationResult(True, verified, None, budget_limited=True)
        if tuple(got) != tuple(expected):
            return VerificationResult(False, verified, (n, tuple(got), tuple(expected)))
        verified = n
    return VerificationResult(True, verified)
