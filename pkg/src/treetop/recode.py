"""Higher-block recoding, forbidden-word compilation, SSE witnesses.

Also holds the finite-depth counting inequalities that tie the tree entropy of
a Markov shift to that of its higher block presentation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import TransitionMatrix, essential_reduce
from .counting import delta_size, iter_exact_counts, log_counts
from .errors import DomainError

__all__ = [
    "RecodedShift",
    "SSEWitness",
    "InequalityCheck",
    "higher_block_markov",
    "forbidden_words_to_markov",
    "sse_witness_check",
    "higher_block_inequalities_check",
]

Word = tuple[int, ...]


@dataclass(frozen=True)
class RecodedShift:
    matrix: TransitionMatrix
    words: tuple[Word, ...]
    m: int
    removed_words: tuple[Word, ...] = ()

    @property
    def empty(self) -> bool:
        return self.matrix.is_empty

    def comment_lines(self, source_labels: Sequence[str] | None = None) -> list[str]:
        out = []
        for idx, (lab, w) in enumerate(zip(self.matrix.labels, self.words), start=1):
            src = " ".join(source_labels[s] if source_labels else str(s) for s in w)
            out.append(f"{idx} {lab} <- {src}")
        return out


@dataclass(frozen=True)
class SSEWitness:
    R: np.ndarray
    S: np.ndarray


def _word_label(word: Word, labels: Sequence[str]) -> str:
    parts = [labels[s] for s in word]
    sep = "" if all(len(p) == 1 for p in parts) else "."
    return sep.join(parts)


def _overlap_matrix(words: list[Word], admissible_step) -> np.ndarray:
    by_prefix: dict[Word, list[int]] = {}
    for j, w in enumerate(words):
        by_prefix.setdefault(w[:-1], []).append(j)
    out = np.zeros((len(words), len(words)), dtype=np.int64)
    for i, w in enumerate(words):
        for j in by_prefix.get(w[1:], ()):
            if admissible_step(w + words[j][-1:]):
                out[i, j] = 1
    return out


def higher_block_markov(A: TransitionMatrix, m: int) -> RecodedShift:
    """Recode X_A over its admissible m-words with overlap transitions."""
    if m < 1:
        raise DomainError("block length m must be >= 1")
    if m == 1:
        return RecodedShift(A, tuple((i,) for i in range(A.k)), 1)
    succ = [A.successors(i) for i in range(A.k)]
    words: list[Word] = [(i,) for i in range(A.k)]
    for _ in range(m - 1):
        words = [w + (j,) for w in words for j in succ[w[-1]]]

    def path_ok(w: Word) -> bool:
        return all(A.entries[w[t], w[t + 1]] for t in range(len(w) - 1))

    entries = _overlap_matrix(words, path_ok)
    labels = tuple(_word_label(w, A.labels) for w in words)
    return RecodedShift(TransitionMatrix(entries, labels), tuple(words), m)


def _contains_factor(word: Word, forbidden: set[Word], lengths: list[int]) -> bool:
    for L in lengths:
        for t in range(len(word) - L + 1):
            if word[t : t + L] in forbidden:
                return True
    return False


def forbidden_words_to_markov(
    alphabet_size: int, forbidden: Sequence[Sequence[int]], trim: bool = True
) -> RecodedShift:
    """Markov presentation of the shift avoiding every word in ``forbidden``.

    States are the m-words (m = max(L - 1, 1), L the longest forbidden word)
    with no forbidden factor; w -> w' when they overlap and the (m+1)-word
    ``w + w'[-1]`` has no forbidden factor. With ``trim`` the graph is reduced
    to its essential part, leaving exactly the m-words that occur in the shift.
    """
    if alphabet_size < 1:
        raise DomainError("alphabet_size must be >= 1")
    forb = set()
    for w in forbidden:
        w = tuple(int(s) for s in w)
        if not w:
            raise DomainError("forbidden words must be nonempty")
        if any(s < 0 or s >= alphabet_size for s in w):
            raise DomainError(f"forbidden word {w} uses a symbol outside 0..{alphabet_size - 1}")
        forb.add(w)
    L = max((len(w) for w in forb), default=0)
    m = max(L - 1, 1)
    lengths = sorted({len(w) for w in forb})
    words: list[Word] = [()]
    for _ in range(m):
        words = [w + (s,) for w in words for s in range(alphabet_size)
                 if not _contains_factor(w + (s,), forb, lengths)]
    entries = _overlap_matrix(words, lambda w: not _contains_factor(w, forb, lengths))
    labels = tuple(_word_label(w, [str(s) for s in range(alphabet_size)]) for w in words)
    mat = TransitionMatrix(entries, labels)
    if not trim:
        return RecodedShift(mat, tuple(words), m)
    reduced, removed = essential_reduce(mat)
    keep = [i for i in range(len(words)) if i not in set(removed)]
    return RecodedShift(reduced, tuple(words[i] for i in keep), m,
                        tuple(words[i] for i in removed))


def sse_witness_check(A: TransitionMatrix, B: TransitionMatrix, w: SSEWitness) -> bool:
    """True iff A = R S and B = S R as exact integer products."""
    R = np.asarray(w.R, dtype=object)
    S = np.asarray(w.S, dtype=object)
    if R.ndim != 2 or S.ndim != 2:
        raise DomainError("witness matrices must be 2-dimensional")
    if R.shape != (A.k, B.k) or S.shape != (B.k, A.k):
        raise DomainError(
            f"witness shapes R{R.shape}, S{S.shape} incompatible with k_A={A.k}, k_B={B.k}"
        )
    if any(int(x) < 0 for x in np.concatenate([R.ravel(), S.ravel()])):
        raise DomainError("witness entries must be nonnegative")
    RS = R.dot(S)
    SR = S.dot(R)
    a = A.entries.astype(object)
    b = B.entries.astype(object)
    return bool((RS == a).all() and (SR == b).all())


@dataclass(frozen=True)
class InequalityCheck:
    """Both recoding inequalities at one depth; slacks are log(rhs) - log(lhs)."""

    n: int
    m: int
    recoded_count: int | None
    source_count: int | None
    recoded_shorter_count: int | None
    first_holds: bool
    second_holds: bool
    first_slack: float
    second_slack: float
    mode: str

    @property
    def ok(self) -> bool:
        return self.first_holds and self.second_holds


EXACT_DIGITS = 200_000


def higher_block_inequalities_check(
    A: TransitionMatrix, d: int, m: int, n: int, recoded: RecodedShift | None = None
) -> InequalityCheck:
    """Check at depth n (n >= m >= 1):

        |B_n(T_{A^[m]})| <= k**(m-1) |B_n(T_A)|
        |B_n(T_A)|       <= k**|Delta_{m-1}| |B_{n-m+1}(T_{A^[m]})| ** (d**(m-1))
    """
    if not (n >= m >= 1):
        raise DomainError("need n >= m >= 1")
    hb = recoded if recoded is not None else higher_block_markov(A, m)
    k = A.k
    k_pow_second = delta_size(d, m - 1)
    digits = (delta_size(d, n) - 1) * math.log10(max(k, hb.matrix.k, 2)) * d ** (m - 1)
    if digits <= EXACT_DIGITS:
        big = _nth(iter_exact_counts(hb.matrix, d), n)
        src = _nth(iter_exact_counts(A, d), n)
        short = _nth(iter_exact_counts(hb.matrix, d), n - m + 1)
        lhs1, rhs1 = sum(big), k ** (m - 1) * sum(src)
        lhs2, rhs2 = sum(src), k**k_pow_second * sum(short) ** (d ** (m - 1))
        return InequalityCheck(
            n, m, lhs1, sum(src), sum(short),
            lhs1 <= rhs1, lhs2 <= rhs2,
            _log_ratio(rhs1, lhs1), _log_ratio(rhs2, lhs2), "exact",
        )
    lc_hb = log_counts(hb.matrix, d, n)
    lc_a = log_counts(A, d, n)
    big, src, short = lc_hb.log_total(n), lc_a.log_total(n), lc_hb.log_total(n - m + 1)
    s1 = (m - 1) * math.log(k) + src - big
    s2 = k_pow_second * math.log(k) + d ** (m - 1) * short - src
    tol = 1e-9
    return InequalityCheck(n, m, None, None, None, s1 >= -tol * max(1.0, abs(big)),
                           s2 >= -tol * max(1.0, abs(src)), s1, s2, "log")


def _nth(gen, n):
    for i, x in enumerate(gen):
        if i == n:
            return x


def _log_ratio(num: int, den: int) -> float:
    if num == den:
        return 0.0
    if den == 0:
        return math.inf
    if num == 0:
        return -math.inf
    return math.log(num) - math.log(den)

