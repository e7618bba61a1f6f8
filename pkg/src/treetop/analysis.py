"""Certified bounds separating h(T_A) from h(X_A), plus the entropy-gap and
reducible-component analyses.

Pipeline for an irreducible A with M > m and a tolerance ``eps`` in
``(0, (M/m)**(1/(d+1)) - 1)``:

1. ``window_constant`` gives N such that every window [n, n+N] meets the
   gap set S(eps) of depths where the entries of A x(n) spread by > 1+eps.
2. ``holder_C`` turns a spread into a multiplicative gain of
   ``sum a_i**d v_i / (sum a_i v_i)**d`` over 1.
3. ``gamma_chain_check`` verifies the resulting product inequality depth by
   depth, and ``certified_lower_bound`` converts the worst-case density of S
   into a limit bound  log rho + kappa * log C((1+eps)**(1/(k-1))).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .core import (
    DEFAULT_TOL,
    TransitionMatrix,
    essential_reduce,
    is_irreducible,
    row_sum_stats,
    spectral_data,
    strongly_connected_components,
)
from .counting import (
    delta_size,
    iter_exact_counts,
    line_entropy,
    log_counts,
    predicted_digits,
    tree_entropy_sequence,
)
from .errors import CertificationUnavailable, DomainError, NotApplicable

__all__ = [
    "HOLDER_EXACT_MAX_K",
    "GapSetReport",
    "HolderBound",
    "GammaEntry",
    "GammaChainResult",
    "Certificate",
    "GapClassification",
    "ComponentReport",
    "ComponentComparison",
    "epsilon_range",
    "default_eps",
    "window_constant",
    "gap_set",
    "pigeonhole_ratio_index",
    "holder_ratio",
    "holder_C",
    "gamma_chain_check",
    "certified_lower_bound",
    "equality_verdict",
    "entropy_gap_classify",
    "component_comparison",
]

HOLDER_EXACT_MAX_K = 20
GAP_EXACT_DIGITS = 20_000


# ---------------------------------------------------------------------------
# eps and N
# ---------------------------------------------------------------------------


def epsilon_range(A: TransitionMatrix, d: int) -> tuple[float, float]:
    stats = row_sum_stats(A)
    if stats.m == 0:
        raise DomainError("matrix has a zero row; reduce it to its essential part first")
    if stats.M == stats.m:
        raise NotApplicable("M == m: the eps interval is empty and h(T_A) = h(X_A)")
    return 0.0, (stats.M / stats.m) ** (1.0 / (d + 1)) - 1.0


def default_eps(A: TransitionMatrix, d: int) -> float:
    return epsilon_range(A, d)[1] / 2


def _check_eps(A: TransitionMatrix, d: int, eps: float) -> tuple[int, int]:
    _, eps_max = epsilon_range(A, d)
    stats = row_sum_stats(A)
    q = Fraction(eps)
    # exact test of (1+eps)**(d+1) < M/m
    if not (0 < eps and (1 + q) ** (d + 1) * stats.m < stats.M):
        raise DomainError(f"eps={eps} outside (0, {eps_max})")
    return stats.M, stats.m


def window_constant(A: TransitionMatrix, d: int, eps: float) -> int:
    """Smallest N >= 1 with ((M/m) (1+eps)**-(d+1))**N > (1+eps)**2, decided exactly."""
    M, m = _check_eps(A, d, eps)
    q = 1 + Fraction(eps)
    base = Fraction(M, m) / q ** (d + 1)
    target = q**2

    def ok(N: int) -> bool:
        return base**N > target

    guess = max(1, int(math.log(float(target)) / math.log(float(base))))
    N = guess
    while N > 1 and ok(N - 1):
        N -= 1
    while not ok(N):
        N += 1
    return N


# ---------------------------------------------------------------------------
# gap set
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GapSetReport:
    eps: float
    eps_max: float
    N: int
    depth: int
    S: tuple[int, ...]
    windows_ok: bool
    empirical_density: float
    excluded: tuple[int, ...] = ()  # depths where some (A x(n))_i == 0
    ambiguous: tuple[int, ...] = ()  # log-mode ratios too close to 1+eps; left out of S
    first_uncovered: int | None = None

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "eps_max": self.eps_max,
            "N": self.N,
            "depth": self.depth,
            "S": list(self.S),
            "windows_ok": self.windows_ok,
            "empirical_density": self.empirical_density,
            "excluded": list(self.excluded),
            "ambiguous": list(self.ambiguous),
        }


def _ax_profile(A: TransitionMatrix, d: int, depth: int, exact_digits: int):
    """Yield (n, kind, values) for n = 0..depth.

    kind "exact": values are the integers (A x(n))_i.
    kind "log":   values are log (A x(n))_i up to a common additive constant.
    """
    succ = [A.successors(i) for i in range(A.k)]
    gen = iter_exact_counts(A, d)
    lc = None
    for n in range(depth + 1):
        if lc is None and predicted_digits(A, d, n) + 1 <= exact_digits:
            x = next(gen)
            yield n, "exact", [sum(x[j] for j in s) for s in succ]
            continue
        if lc is None:
            lc = log_counts(A, d, depth + 1)
        # x(n+1) = (A x(n))**d, so rel(n+1)/d is log A x(n) shifted by a constant
        yield n, "log", lc.rel[n + 1] / d


def gap_set(
    A: TransitionMatrix, d: int, eps: float, depth: int, exact_digits: int = GAP_EXACT_DIGITS
) -> GapSetReport:
    """Depths n <= depth with max_i (Ax(n))_i / min_i (Ax(n))_i > 1 + eps."""
    _, eps_max = epsilon_range(A, d)
    N = window_constant(A, d, eps)
    if depth < N:
        raise DomainError(f"depth {depth} is smaller than the window constant N={N}")
    q = Fraction(eps)
    log_thr = math.log1p(eps)
    S, excluded, ambiguous = [], [], []
    for n, kind, vals in _ax_profile(A, d, depth, exact_digits):
        if kind == "exact":
            lo, hi = min(vals), max(vals)
            if lo == 0:
                excluded.append(n)
            elif hi * q.denominator > lo * (q.denominator + q.numerator):
                S.append(n)
            continue
        vals = np.asarray(vals)
        if not np.isfinite(vals).all():
            excluded.append(n)
            continue
        spread = float(vals.max() - vals.min())
        if abs(spread - log_thr) <= 1e-9 * max(1.0, float(np.abs(vals).max())):
            ambiguous.append(n)
        elif spread > log_thr:
            S.append(n)
    members = set(S)
    first_bad = None
    for n in range(0, depth - N + 1):
        if not any(j in members for j in range(n, n + N + 1)):
            first_bad = n
            break
    return GapSetReport(
        eps, eps_max, N, depth, tuple(S), first_bad is None, len(S) / (depth + 1),
        tuple(excluded), tuple(ambiguous), first_bad,
    )


def pigeonhole_ratio_index(w: Sequence[float], eps: float, k: int | None = None) -> int:
    """Smallest l in 1..k-1 with w[l] / w[l-1] > (1+eps)**(1/(k-1)).

    ``w`` must be positive and ascending, and w[-1]/w[0] > 1+eps. The returned
    l counts the entries below the gap (1-based, as in the pigeonhole bound).
    """
    w = [float(t) for t in w]
    k = len(w) if k is None else k
    if k != len(w) or k < 2:
        raise DomainError("need k == len(w) >= 2")
    if w[0] <= 0 or any(b < a for a, b in zip(w, w[1:])):
        raise DomainError("w must be positive and sorted ascending")
    if not w[-1] > w[0] * (1 + eps):
        raise DomainError("no index: max/min ratio does not exceed 1+eps")
    thr = (1 + eps) ** (1.0 / (k - 1))
    for l in range(1, k):
        if w[l] > w[l - 1] * thr:
            return l
    raise AssertionError("pigeonhole violated; inputs were validated")


# ---------------------------------------------------------------------------
# Hoelder gain
# ---------------------------------------------------------------------------


def holder_ratio(a: Sequence[float], w: Sequence[float], d: int) -> float:
    """sum a_i**d w_i / (sum a_i w_i)**d."""
    a = np.asarray(a, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    return float((a**d * w).sum() / (a * w).sum() ** d)


def _partial_sum_ratio(W: float, d: int, x: float) -> float:
    return (W + x**d * (1.0 - W)) / (W + x * (1.0 - W)) ** d


class HolderBound:
    """C(x) for a fixed positive probability vector ``v`` and arity ``d``.

    For k <= 20 the minimum runs over every proper non-empty subset sum of v.
    Beyond that it uses the two extreme subset sums v_min and 1 - v_min: the
    ratio, as a function of the subset sum W, rises from 1 and falls back to 1
    on [0, 1] with a single interior maximum, so the extremes attain the
    minimum. Tests compare both routes for small k.
    """

    def __init__(self, v: Sequence[float], d: int):
        v = np.asarray(v, dtype=np.float64)
        if v.ndim != 1 or v.size < 2:
            raise DomainError("need a probability vector with at least two entries")
        if (v <= 0).any():
            raise DomainError("probability vector must be strictly positive")
        if abs(v.sum() - 1.0) > 1e-9:
            raise DomainError("probability vector must sum to 1")
        self.v = v
        self.d = int(d)
        self.method = "subsets" if v.size <= HOLDER_EXACT_MAX_K else "extremes"
        self._cache: dict[float, float] = {}

    def extremes(self, x: float) -> float:
        lo = float(self.v.min())
        return min(_partial_sum_ratio(lo, self.d, x), _partial_sum_ratio(1.0 - lo, self.d, x))

    def __call__(self, x: float) -> float:
        x = float(x)
        if x < 1.0:
            raise DomainError("C is defined on [1, inf)")
        if x == 1.0:
            return 1.0
        if x not in self._cache:
            if self.method == "subsets":
                val = kernels.min_partial_sum_ratio(self.v, self.d, x)
            else:
                val = self.extremes(x)
            self._cache[x] = max(val, 1.0)
        return self._cache[x]


def holder_C(v: Sequence[float], d: int, x: float) -> float:
    return HolderBound(v, d)(x)


# ---------------------------------------------------------------------------
# gamma chain and certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GammaEntry:
    n: int
    in_S: bool
    gamma: float


@dataclass(frozen=True)
class GammaChainResult:
    ok: bool
    margins: tuple[float, ...]  # log lhs - log rhs for n = 0..depth
    gammas: tuple[GammaEntry, ...]
    rho: float
    left_vector: np.ndarray = field(repr=False)

    @property
    def min_margin(self) -> float:
        return min(self.margins)


def _require_strict_case(A: TransitionMatrix) -> None:
    if not is_irreducible(A):
        raise DomainError("certification needs an irreducible matrix")
    stats = row_sum_stats(A)
    if stats.M == stats.m:
        raise NotApplicable("M == m: h(T_A) = h(X_A), nothing to certify")


def gamma_chain_check(
    A: TransitionMatrix, d: int, eps: float, depth: int, tol: float = DEFAULT_TOL
) -> GammaChainResult:
    """Verify log(sum_i x_i(n) v_i) >= sum_j d**(n-1-j) log gamma(j) + (|Delta_n|-1) log rho."""
    _require_strict_case(A)
    _check_eps(A, d, eps)
    sd = spectral_data(A, tol=tol)
    if sd.residual > tol:
        raise CertificationUnavailable(f"Perron residual {sd.residual:.3e} exceeds tol {tol}")
    gs = gap_set(A, d, eps, max(depth, window_constant(A, d, eps)))
    C = HolderBound(sd.left_vector, d)
    gain = C((1 + eps) ** (1.0 / (A.k - 1)))
    members = set(gs.S)
    gammas = tuple(GammaEntry(n, n in members, gain if n in members else 1.0) for n in range(depth + 1))

    lc = log_counts(A, d, depth)
    log_v = np.log(sd.left_vector)
    log_rho = math.log(sd.rho)
    margins = []
    acc = 0.0  # sum_{j<n} d**(-1-j) log gamma(j)
    for n in range(depth + 1):
        if n > 0:
            acc += math.log(gammas[n - 1].gamma) * float(d) ** (-n)
        # everything below is divided by d**n
        top = lc.rel[n] + log_v
        mx = top.max()
        lhs = lc.scaled[n] + (mx + math.log(np.exp(top - mx).sum())) / float(d) ** n
        rhs = acc + (d * (1.0 - float(d) ** (-n)) / (d - 1)) * log_rho
        margins.append((lhs - rhs) * float(d) ** n)
    margins = tuple(margins)
    return GammaChainResult(min(margins) >= -1e-9, margins, gammas, sd.rho, sd.left_vector)


@dataclass(frozen=True)
class Certificate:
    eps: float
    N: int
    depth: int
    S_prefix: tuple[int, ...]
    kappa: float
    empirical_term: float
    C_value: float
    lower_bound: float
    line_entropy: float
    holder_method: str

    @property
    def margin(self) -> float:
        return self.lower_bound - self.line_entropy

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "N": self.N,
            "S_prefix": list(self.S_prefix),
            "kappa": self.kappa,
            "C_value": self.C_value,
            "lower_bound": self.lower_bound,
            "line_entropy": self.line_entropy,
            "margin": self.margin,
        }


def kappa(d: int, N: int) -> float:
    """liminf of sum_{i in S, i<n} d**(n-1-i) / |Delta_n| over S meeting every (N+1)-window."""
    return (d - 1) / (d * (d ** (N + 1) - 1))


def empirical_density_term(S: Sequence[int], d: int, n: int) -> float:
    lead = (d - 1) / (d - float(d) ** (-n))  # d**n / |Delta_n|
    return lead * sum(float(d) ** (-1 - i) for i in S if i <= n - 1)


def certified_lower_bound(
    A: TransitionMatrix, d: int, eps: float, depth: int, tol: float = DEFAULT_TOL
) -> Certificate:
    """Lower bound log rho + kappa log C((1+eps)**(1/(k-1))) for h(T_A).

    Refuses (CertificationUnavailable) when the window property fails at
    ``depth``, when the observed density term at ``depth`` does not dominate
    kappa, or when the Perron residual exceeds ``tol``.
    """
    _require_strict_case(A)
    gs = gap_set(A, d, eps, depth)
    if not gs.windows_ok:
        raise CertificationUnavailable(
            f"window [{gs.first_uncovered}, {gs.first_uncovered + gs.N}] misses S at depth {depth}"
        )
    sd = spectral_data(A, tol=tol)
    if sd.residual > tol:
        raise CertificationUnavailable(f"Perron residual {sd.residual:.3e} exceeds tol {tol}")
    kap = kappa(d, gs.N)
    emp = empirical_density_term(gs.S, d, depth)
    if emp < kap:
        raise CertificationUnavailable(
            f"density term {emp:.6g} at depth {depth} does not dominate kappa={kap:.6g}"
        )
    C = HolderBound(sd.left_vector, d)
    c_val = C((1 + eps) ** (1.0 / (A.k - 1)))
    h_line = math.log(sd.rho)
    return Certificate(eps, gs.N, depth, gs.S, kap, emp, c_val, h_line + kap * math.log(c_val),
                       h_line, C.method)


# ---------------------------------------------------------------------------
# verdicts and classifications
# ---------------------------------------------------------------------------


def equality_verdict(A: TransitionMatrix, d: int | None = None) -> str:
    """"equal" iff M == m, "strictly_greater" iff M > m; "not_applicable" if reducible."""
    if not is_irreducible(A):
        return "not_applicable"
    stats = row_sum_stats(A)
    return "equal" if stats.M == stats.m else "strictly_greater"


@dataclass(frozen=True)
class GapClassification:
    case: str  # "M1_zero", "M2_bounded" or "empty"
    bound: float | None
    M: int
    k: int
    witnesses: tuple[tuple[int, int, int, bool], ...] = ()  # (n, |B_n|, reference, holds)

    @property
    def ok(self) -> bool:
        return all(w[3] for w in self.witnesses)


def entropy_gap_classify(
    A: TransitionMatrix, d: int, witness_depth: int = 3, bounded_depth: int = 10
) -> GapClassification:
    """Either h(T_A) = 0 (M = 1) or h(T_A) >= (d-1)/d log M (M >= 2), M from the essential part.

    Witnesses: |B_n| <= k for n <= ``bounded_depth`` when M = 1, and
    |B_n| >= M**(d**n) for n <= ``witness_depth`` when M >= 2.
    """
    Ae, _ = essential_reduce(A)
    if Ae.is_empty:
        return GapClassification("empty", None, 0, 0)
    M = row_sum_stats(Ae).M
    gen = iter_exact_counts(Ae, d)
    if M == 1:
        wit = []
        for n in range(bounded_depth + 1):
            total = sum(next(gen))
            wit.append((n, total, Ae.k, total <= Ae.k))
        return GapClassification("M1_zero", 0.0, 1, Ae.k, tuple(wit))
    wit = []
    for n in range(witness_depth + 1):
        total = sum(next(gen))
        ref = M ** (d**n)
        wit.append((n, total, ref, total >= ref))
    return GapClassification("M2_bounded", (d - 1) / d * math.log(M), M, Ae.k, tuple(wit))


@dataclass(frozen=True)
class ComponentReport:
    indices: tuple[int, ...]
    irreducible: bool
    upper: float | None
    lower: float | None


@dataclass(frozen=True)
class ComponentComparison:
    components: tuple[ComponentReport, ...]
    whole_upper: float | None
    whole_lower: float
    dominance_ok: bool  # |B_n(T_A)| >= |B_n(T_{A_i})| for every checked n, i
    dominance_depth: int
    relation: str  # "strict", "equal" or "undetermined"

    @property
    def strict(self) -> bool:
        return self.relation == "strict"

    def to_dict(self) -> dict:
        return {
            "components": [
                {"indices": [i + 1 for i in c.indices], "irreducible": c.irreducible,
                 "upper_bound": c.upper, "lower_bound": c.lower}
                for c in self.components
            ],
            "whole_upper": self.whole_upper,
            "whole_lower": self.whole_lower,
            "dominance_ok": self.dominance_ok,
            "dominance_depth": self.dominance_depth,
            "relation": self.relation,
        }


def _lower_from_structure(A: TransitionMatrix, d: int) -> float:
    h = line_entropy(A)
    gap = entropy_gap_classify(A, d, witness_depth=0)
    if gap.case == "M2_bounded":
        h = max(h, gap.bound)
    elif gap.case == "M1_zero":
        h = max(h, 0.0)
    return h


def component_comparison(
    A: TransitionMatrix, d: int, depth: int, exact_digits: int = 100_000
) -> ComponentComparison:
    """Compare h(T_A) against the tree entropies of its irreducible components."""
    Ae, _ = essential_reduce(A)
    if Ae.is_empty:
        raise DomainError("empty essential part")
    dec = strongly_connected_components(Ae)
    reports = []
    subs = []
    for comp, irr in zip(dec.components, dec.irreducible_flags):
        if not irr:
            reports.append(ComponentReport(comp, False, None, None))
            continue
        sub = Ae.submatrix(comp)
        subs.append(sub)
        seq = tree_entropy_sequence(sub, d, depth)
        reports.append(ComponentReport(comp, True, seq.running_min, _lower_from_structure(sub, d)))

    whole_seq = tree_entropy_sequence(Ae, d, depth)
    comp_lowers = [r.lower for r in reports if r.lower is not None]
    comp_uppers = [r.upper for r in reports if r.upper is not None]
    whole_lower = max([_lower_from_structure(Ae, d)] + comp_lowers)

    gens = [iter_exact_counts(Ae, d)] + [iter_exact_counts(s, d) for s in subs]
    ok, checked = True, -1
    for n in range(depth + 1):
        if predicted_digits(Ae, d, n) > exact_digits:
            break
        totals = [sum(next(g)) for g in gens]
        if subs and totals[0] < max(totals[1:]):
            ok = False
        checked = n

    relation = "undetermined"
    if comp_uppers and whole_lower > max(comp_uppers):
        relation = "strict"
    elif comp_lowers and whole_seq.running_min is not None and whole_seq.running_min <= max(comp_lowers) + 1e-12:
        relation = "equal"
    return ComponentComparison(tuple(reports), whole_seq.running_min, whole_lower, ok, checked, relation)
