"""Block counts of hom Markov tree-shifts and the entropy numbers built on them.

The count of n-blocks rooted at symbol i obeys

    x_i(0) = 1,    x_i(n) = ((A x(n-1))_i) ** d

which is evaluated either with Python integers (exact) or in the log domain.
Natural logarithms are used everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import kernels
from .core import (
    TransitionMatrix,
    essential_reduce,
    is_irreducible,
    row_sum_stats,
    spectral_data,
)

__all__ = [
    "DIGIT_BUDGET",
    "BlockCountVector",
    "EntropyEntry",
    "EntropySequence",
    "EntropyReport",
    "LogCounts",
    "delta_size",
    "iter_exact_counts",
    "block_count_exact",
    "block_count_log",
    "log_counts",
    "predicted_digits",
    "tree_entropy_sequence",
    "line_entropy",
    "entropy_report",
]

DIGIT_BUDGET = 10**6


@dataclass(frozen=True)
class BlockCountVector:
    n: int
    mode: str  # "exact" or "log"
    log_counts: np.ndarray
    exact_counts: tuple[int, ...] | None = None

    @property
    def total(self) -> int:
        if self.exact_counts is None:
            raise ValueError("exact total unavailable in log mode")
        return sum(self.exact_counts)

    @property
    def log_total(self) -> float:
        if self.exact_counts is not None:
            return _log_int(self.total)
        return _logsumexp(self.log_counts)


@dataclass(frozen=True)
class EntropyEntry:
    n: int
    delta_n: int
    log_count: float | None  # None once the tree-shift has no n-blocks
    h_n: float | None
    mode: str


@dataclass(frozen=True)
class EntropySequence:
    d: int
    entries: tuple[EntropyEntry, ...]
    running_min: float | None
    empty: bool = False

    def prefix_minima(self) -> list[float]:
        out, best = [], math.inf
        for e in self.entries:
            if e.h_n is None:
                break
            best = min(best, e.h_n)
            out.append(best)
        return out


@dataclass
class EntropyReport:
    k: int
    d: int
    M: int
    m: int
    rho: float | None
    line_entropy: float
    sequence: EntropySequence
    tree_upper: float | None
    tree_lower_perron: float
    tree_lower_certified: float | None = None
    verdict: str = "unknown"
    empty: bool = False
    certificate: object = field(default=None, repr=False)

    def to_dict(self, log_base: float | None = None) -> dict:
        scale = 1.0 / math.log(log_base) if log_base else 1.0

        def sc(x):
            return None if x is None or not math.isfinite(x) else x * scale

        return {
            "k": self.k,
            "d": self.d,
            "M": self.M,
            "m": self.m,
            "rho": self.rho,
            "line_entropy": sc(self.line_entropy),
            "h_sequence": [
                {"n": e.n, "delta_n": e.delta_n, "log_count": sc(e.log_count), "h_n": sc(e.h_n)}
                for e in self.sequence.entries
            ],
            "upper_bound": sc(self.tree_upper),
            "lower_bound_perron": sc(self.tree_lower_perron),
            "lower_bound_certified": sc(self.tree_lower_certified),
            "verdict": self.verdict,
        }


def _log_int(x: int) -> float:
    return math.log(x) if x > 0 else -math.inf


def _logsumexp(y) -> float:
    y = np.asarray(y, dtype=np.float64)
    if y.size == 0:
        return -math.inf
    top = y.max()
    if top == -np.inf:
        return -math.inf
    return float(top + np.log(np.exp(y - top).sum()))


def delta_size(d: int, n: int) -> int:
    """Number of nodes of the depth-n initial subtree, 1 + d + ... + d**n."""
    if d < 2 or n < 0:
        raise ValueError("need d >= 2 and n >= 0")
    return (d ** (n + 1) - 1) // (d - 1)


def iter_exact_counts(A: TransitionMatrix, d: int) -> Iterator[tuple[int, ...]]:
    """Yield x(0), x(1), ... as tuples of Python integers, forever."""
    rows = [A.successors(i) for i in range(A.k)]
    x = [1] * A.k
    while True:
        yield tuple(x)
        x = [sum(x[j] for j in succ) ** d for succ in rows]


def block_count_exact(A: TransitionMatrix, d: int, n: int) -> BlockCountVector:
    if n < 0:
        raise ValueError("depth must be nonnegative")
    for depth, x in enumerate(iter_exact_counts(A, d)):
        if depth == n:
            logs = np.array([_log_int(v) for v in x], dtype=np.float64)
            return BlockCountVector(n, "exact", logs, x)
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class LogCounts:
    """Log-domain counts for depths 0..n_max: y(n) = scaled[n] * d**n + rel[n]."""

    d: int
    scaled: np.ndarray
    rel: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.scaled) - 1

    def absolute(self, n: int) -> np.ndarray:
        if not np.isfinite(self.scaled[n]):
            return np.full(self.rel.shape[1], -np.inf)
        return self.scaled[n] * float(self.d) ** n + self.rel[n]

    def log_total(self, n: int) -> float:
        if not np.isfinite(self.scaled[n]):
            return -math.inf
        return self.scaled[n] * float(self.d) ** n + _logsumexp(self.rel[n])

    def h(self, n: int) -> float | None:
        """log|B_n| / |Delta_n| without forming d**n-sized intermediates."""
        if not np.isfinite(self.scaled[n]):
            return None
        d = self.d
        lead = (d - 1) / (d - float(d) ** (-n))  # d**n / |Delta_n|
        size = delta_size(d, n)
        tail = _logsumexp(self.rel[n]) / size if size.bit_length() < 1000 else 0.0
        return float(self.scaled[n] * lead + tail)


def log_counts(A: TransitionMatrix, d: int, n_max: int) -> LogCounts:
    scaled, rel = kernels.log_recursion(A.entries, d, n_max)
    return LogCounts(d, np.asarray(scaled), np.asarray(rel))


def block_count_log(A: TransitionMatrix, d: int, n: int) -> BlockCountVector:
    lc = log_counts(A, d, n)
    return BlockCountVector(n, "log", lc.absolute(n))


def predicted_digits(A: TransitionMatrix, d: int, n: int) -> int:
    """Upper bound on the decimal digits of max_i x_i(n), from x_i(n) <= M**(|Delta_n|-1)."""
    M = row_sum_stats(A).M
    if M <= 1:
        return 1
    return int((delta_size(d, n) - 1) * math.log10(M)) + 1


def tree_entropy_sequence(
    A: TransitionMatrix, d: int, n_max: int, digit_budget: int = DIGIT_BUDGET
) -> EntropySequence:
    """h_n = log|B_n(T_A)| / |Delta_n| for n = 1..n_max and their running minimum.

    Exact integers are used while the predicted size of the counts stays within
    ``digit_budget`` decimal digits; deeper levels come from the log recursion.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    exact_through = 0
    exact_logs: dict[int, float] = {}
    if A.k:
        gen = iter_exact_counts(A, d)
        for n in range(n_max + 1):
            if predicted_digits(A, d, n) > digit_budget:
                break
            exact_logs[n] = _log_int(sum(next(gen)))
            exact_through = n
    lc = log_counts(A, d, n_max) if exact_through < n_max else None

    entries = []
    best = math.inf
    empty = False
    for n in range(1, n_max + 1):
        delta = delta_size(d, n)
        if n in exact_logs:
            lt, mode = exact_logs[n], "exact"
            h = lt / delta if math.isfinite(lt) else None
        else:
            lt, mode = lc.log_total(n), "log"
            h = lc.h(n)
        if h is None or not math.isfinite(lt):
            empty = True
            entries.append(EntropyEntry(n, delta, None, None, mode))
            continue
        best = min(best, h)
        entries.append(EntropyEntry(n, delta, lt, h, mode))
    empty = empty or A.k == 0
    # an empty tree-shift has no entropy, even if shallow blocks exist
    running = None if empty or best == math.inf else best
    return EntropySequence(d, tuple(entries), running, empty)


def line_entropy(A: TransitionMatrix) -> float:
    """log rho(A); ``-inf`` flags an empty essential part (no infinite paths)."""
    Ae, _ = essential_reduce(A)
    if Ae.is_empty:
        return -math.inf
    return math.log(spectral_data(Ae).rho)


def entropy_report(
    A: TransitionMatrix,
    d: int,
    depth: int,
    eps: float | None = None,
    certify_depth: int | None = None,
) -> EntropyReport:
    """Bracket h(T_A) between the Perron bound and the running-min upper bound.

    When A is irreducible with M > m and ``eps`` is given, the certified bound
    from :func:`treetop.analysis.certified_lower_bound` is attached; a refusal
    propagates as :class:`~treetop.errors.CertificationUnavailable`.
    """
    from . import analysis

    stats = row_sum_stats(A)
    Ae, _ = essential_reduce(A)
    seq = tree_entropy_sequence(A, d, depth)
    if Ae.is_empty:
        return EntropyReport(A.k, d, stats.M, stats.m, None, -math.inf, seq, None,
                             -math.inf, None, "unknown", empty=True)
    rho = spectral_data(Ae).rho
    h_line = math.log(rho)
    verdict = "unknown"
    if is_irreducible(A):
        verdict = "equal" if stats.M == stats.m else "strictly_greater"
    report = EntropyReport(A.k, d, stats.M, stats.m, rho, h_line, seq, seq.running_min, h_line,
                           verdict=verdict)
    if verdict == "strictly_greater" and eps is not None:
        cert = analysis.certified_lower_bound(A, d, eps, certify_depth or max(depth, 20))
        report.tree_lower_certified = cert.lower_bound
        report.certificate = cert
    return report
