"""Transition matrices: parsing, essential reduction, components, Perron data.

Indices are 0-based throughout the Python API. Display labels default to
``"1".."k"`` so printed output matches the usual 1-based alphabet.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import ConvergenceError, DomainError, ParseError

__all__ = [
    "TransitionMatrix",
    "TreeParams",
    "RowSumStats",
    "SpectralData",
    "ComponentDecomposition",
    "parse_matrix",
    "parse_integer_matrix",
    "format_matrix",
    "essential_reduce",
    "row_sum_stats",
    "strongly_connected_components",
    "is_irreducible",
    "spectral_data",
]

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 1_000_000


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """A k x k 0/1 matrix over an implicit alphabet of size k.

    ``entries`` is stored as a read-only ``uint8`` array. ``k == 0`` is allowed
    so that essential reduction can return an empty matrix.
    """

    entries: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.int64, copy=True)
        if arr.size == 0:
            arr = arr.reshape(0, 0)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DomainError(f"transition matrix must be square, got shape {arr.shape}")
        if not np.isin(arr, (0, 1)).all():
            raise DomainError("transition matrix entries must be 0 or 1")
        arr = arr.astype(np.uint8)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        labels = tuple(str(s) for s in self.labels) or tuple(str(i + 1) for i in range(arr.shape[0]))
        if len(labels) != arr.shape[0]:
            raise DomainError(f"expected {arr.shape[0]} labels, got {len(labels)}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], labels: Sequence[str] = ()) -> "TransitionMatrix":
        rows = [list(r) for r in rows]
        return cls(np.array(rows, dtype=np.int64).reshape(len(rows), -1 if rows else 0), tuple(labels))

    @classmethod
    def full(cls, k: int) -> "TransitionMatrix":
        return cls(np.ones((k, k), dtype=np.int64))

    @property
    def k(self) -> int:
        return int(self.entries.shape[0])

    @property
    def is_empty(self) -> bool:
        return self.k == 0

    def successors(self, i: int) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.entries[i])]

    def submatrix(self, indices: Sequence[int]) -> "TransitionMatrix":
        idx = list(indices)
        return TransitionMatrix(self.entries[np.ix_(idx, idx)], tuple(self.labels[i] for i in idx))

    def permuted(self, perm: Sequence[int]) -> "TransitionMatrix":
        """Relabel so that new index ``perm[i]`` carries old index ``i``."""
        perm = np.asarray(perm)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm))
        return self.submatrix([int(i) for i in inv])

    def tolist(self) -> list[list[int]]:
        return self.entries.astype(int).tolist()

    def __eq__(self, other):
        if not isinstance(other, TransitionMatrix):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.entries.shape, self.entries.tobytes(), self.labels))

    def __repr__(self):
        return f"TransitionMatrix({self.tolist()})"


@dataclass(frozen=True)
class TreeParams:
    d: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"tree arity d must be an integer >= 2, got {self.d}")


@dataclass(frozen=True)
class RowSumStats:
    M: int
    m: int
    per_row: tuple[int, ...]


@dataclass(frozen=True)
class SpectralData:
    rho: float
    left_vector: np.ndarray
    residual: float
    iterations: int


@dataclass(frozen=True)
class ComponentDecomposition:
    """Strongly connected components, each a sorted tuple of indices.

    Components are listed by smallest contained index. ``condensation_order``
    is a topological order of component positions (ties broken by smallest
    index), and ``edges`` the condensation arcs as position pairs.
    """

    components: tuple[tuple[int, ...], ...]
    condensation_order: tuple[int, ...]
    irreducible_flags: tuple[bool, ...]
    edges: frozenset = field(default_factory=frozenset)

    def component_of(self) -> dict[int, int]:
        return {i: c for c, comp in enumerate(self.components) for i in comp}


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if line.startswith("#") or not line.strip():
            continue
        yield lineno, line


def _split_ints(line: str, lineno: int) -> list[int]:
    tokens = line.split(" ")
    if any(t == "" for t in tokens):
        raise ParseError("fields must be separated by single spaces", lineno)
    try:
        return [int(t, 10) for t in tokens]
    except ValueError:
        raise ParseError(f"non-integer field in {line!r}", lineno) from None


def parse_matrix(text: str) -> tuple[TransitionMatrix, TreeParams]:
    """Parse ``"d k"`` followed by ``k`` rows of ``k`` bits."""
    lines = list(_data_lines(text))
    if not lines:
        raise ParseError("missing header line 'd k'", 1)
    hline, header = lines[0]
    fields = _split_ints(header, hline)
    if len(fields) != 2:
        raise ParseError("header must be two integers 'd k'", hline)
    d, k = fields
    if k < 1:
        raise ParseError(f"alphabet size k must be positive, got {k}", hline)
    if d < 2:
        raise ParseError(f"tree arity d must be >= 2, got {d}", hline)
    body = lines[1:]
    if len(body) < k:
        raise ParseError(f"expected {k} matrix rows, found {len(body)}", body[-1][0] if body else hline)
    if len(body) > k:
        raise ParseError("unexpected data after the last matrix row", body[k][0])
    rows = []
    for lineno, line in body:
        row = _split_ints(line, lineno)
        if len(row) != k:
            raise ParseError(f"ragged row: expected {k} entries, got {len(row)}", lineno)
        for x in row:
            if x not in (0, 1):
                raise ParseError(f"non-binary entry {x}", lineno)
        rows.append(row)
    return TransitionMatrix.from_rows(rows), TreeParams(d)


def parse_integer_matrix(text: str) -> np.ndarray:
    """Parse a nonnegative integer matrix: header ``"rows cols"``, then the rows."""
    lines = list(_data_lines(text))
    if not lines:
        raise ParseError("missing header line 'rows cols'", 1)
    hline, header = lines[0]
    fields = _split_ints(header, hline)
    if len(fields) != 2 or min(fields) < 1:
        raise ParseError("header must be two positive integers 'rows cols'", hline)
    r, c = fields
    body = lines[1:]
    if len(body) != r:
        raise ParseError(f"expected {r} rows, found {len(body)}", body[-1][0] if body else hline)
    out = []
    for lineno, line in body:
        row = _split_ints(line, lineno)
        if len(row) != c:
            raise ParseError(f"ragged row: expected {c} entries, got {len(row)}", lineno)
        if any(x < 0 for x in row):
            raise ParseError("entries must be nonnegative", lineno)
        out.append(row)
    return np.array(out, dtype=object)


def format_matrix(A: TransitionMatrix, d: int, comments: Sequence[str] = ()) -> str:
    parts = [f"# {c}" for c in comments]
    parts.append(f"{d} {A.k}")
    parts.extend(" ".join(str(int(x)) for x in row) for row in A.entries)
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# structure
# ---------------------------------------------------------------------------


def essential_reduce(A: TransitionMatrix) -> tuple[TransitionMatrix, list[int]]:
    """Delete indices with a zero row or zero column until none remain.

    Each pass deletes the smallest offending index, so ``removed`` (original
    indices) is deterministic.
    """
    alive = list(range(A.k))
    removed: list[int] = []
    a = A.entries.astype(bool)
    while alive:
        sub = a[np.ix_(alive, alive)]
        bad = np.flatnonzero(~sub.any(axis=1) | ~sub.any(axis=0))
        if bad.size == 0:
            break
        victim = alive[int(bad[0])]
        removed.append(victim)
        alive.remove(victim)
    return A.submatrix(alive), removed


def row_sum_stats(A: TransitionMatrix) -> RowSumStats:
    per_row = tuple(int(s) for s in A.entries.sum(axis=1))
    if not per_row:
        return RowSumStats(0, 0, ())
    return RowSumStats(max(per_row), min(per_row), per_row)


def _tarjan(succ: list[list[int]]) -> list[list[int]]:
    """Iterative Tarjan; returns components in reverse topological order."""
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            if pos < len(succ[v]):
                work[-1] = (v, pos + 1)
                w = succ[v][pos]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def strongly_connected_components(A: TransitionMatrix) -> ComponentDecomposition:
    succ = [A.successors(i) for i in range(A.k)]
    comps = sorted((tuple(sorted(c)) for c in _tarjan(succ)), key=lambda c: c[0])
    owner = {i: c for c, comp in enumerate(comps) for i in comp}
    edges = set()
    for i in range(A.k):
        for j in succ[i]:
            if owner[i] != owner[j]:
                edges.add((owner[i], owner[j]))
    indeg = [0] * len(comps)
    for _, b in edges:
        indeg[b] += 1
    heap = [c for c in range(len(comps)) if indeg[c] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        c = heapq.heappop(heap)
        order.append(c)
        for a, b in sorted(edges):
            if a == c:
                indeg[b] -= 1
                if indeg[b] == 0:
                    heapq.heappush(heap, b)
    flags = tuple(len(c) > 1 or bool(A.entries[c[0], c[0]]) for c in comps)
    return ComponentDecomposition(tuple(comps), tuple(order), flags, frozenset(edges))


def is_irreducible(A: TransitionMatrix) -> bool:
    if A.is_empty:
        return False
    dec = strongly_connected_components(A)
    return len(dec.components) == 1 and dec.irreducible_flags[0]


# ---------------------------------------------------------------------------
# Perron data
# ---------------------------------------------------------------------------


def _irreducible_perron(A: TransitionMatrix, tol: float, max_iter: int):
    v, rho, residual, it = kernels.left_perron_iteration(A.entries, tol, max_iter)
    if residual > tol:
        raise ConvergenceError("power iteration did not converge", residual, it)
    return v, rho, it


def spectral_data(A: TransitionMatrix, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> SpectralData:
    """Spectral radius and a nonnegative left eigenvector summing to 1.

    Irreducible input goes straight to shifted power iteration. For reducible
    input the radius is the largest component radius; the eigenvector lives on
    the last (topologically) component attaining it and on everything that
    component reaches, where it solves ``v_R (rho I - A_RR) = v_C A_CR``.
    """
    if A.is_empty:
        raise DomainError("spectral data of an empty matrix is undefined")
    dec = strongly_connected_components(A)
    if len(dec.components) == 1 and dec.irreducible_flags[0]:
        v, rho, it = _irreducible_perron(A, tol, max_iter)
        residual = float(np.abs(v @ A.entries - rho * v).max())
        return SpectralData(rho, v, residual, it)

    rhos = []
    vecs = []
    iterations = 0
    for comp, irr in zip(dec.components, dec.irreducible_flags):
        if not irr:
            rhos.append(0.0)
            vecs.append(None)
            continue
        v, rho, it = _irreducible_perron(A.submatrix(comp), tol, max_iter)
        iterations += it
        rhos.append(rho)
        vecs.append(v)
    rho = max(rhos)
    if rho <= 0.0:
        raise DomainError("matrix is nilpotent; no positive Perron root")
    near = {c for c, r in enumerate(rhos) if r >= rho - 1e-9}
    anchor = [c for c in dec.condensation_order if c in near][-1]
    rho = rhos[anchor]

    # components reachable from the anchor
    reach = {anchor}
    frontier = [anchor]
    while frontier:
        c = frontier.pop()
        for a, b in dec.edges:
            if a == c and b not in reach:
                reach.add(b)
                frontier.append(b)
    C = list(dec.components[anchor])
    R = sorted(i for c in reach - {anchor} for i in dec.components[c])
    a = A.entries.astype(np.float64)
    v = np.zeros(A.k)
    v[C] = vecs[anchor]
    if R:
        lhs = (rho * np.eye(len(R)) - a[np.ix_(R, R)]).T
        rhs = a[np.ix_(C, R)].T @ v[C]
        v[R] = np.linalg.solve(lhs, rhs)
    v = np.clip(v, 0.0, None)
    v /= v.sum()
    residual = float(np.abs(v @ a - rho * v).max())
    return SpectralData(rho, v, residual, iterations)
