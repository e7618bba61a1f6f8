"""Consistency checks run by ``treetop verify``.

Each check compares two independent computations, or tests an inequality
that must hold for every matrix of the given kind. Only the checks that
apply to the input are run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analysis, oracle, recode
from .core import TransitionMatrix, essential_reduce, is_irreducible, row_sum_stats
from .counting import iter_exact_counts, line_entropy, tree_entropy_sequence
from .errors import CertificationUnavailable

DP_MAX_DEPTH = 12


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _oracle_check(A, d, depth, budget) -> Check:
    res = oracle.verify_recursion(A, d, depth, budget=budget)
    if not res.ok:
        n, got, want = res.mismatch
        return Check("oracle", False, f"n={n}: enumeration {got} != recursion {want}")
    if not res.budget_limited:
        return Check("oracle", True, f"exhaustive enumeration matches through n={depth}")
    # continue past the budget with the node-list DP, which shares no code with the recursion
    top = min(depth, DP_MAX_DEPTH)
    gen = iter_exact_counts(A, d)
    for n in range(top + 1):
        want = next(gen)
        if n <= res.verified_through:
            continue
        got = oracle.subtree_dp_counts(A, d, n)
        if tuple(got) != tuple(want):
            return Check("oracle", False, f"n={n}: node DP {got} != recursion {want}")
    return Check("oracle", True,
                 f"exhaustive through n={res.verified_through}, node DP through n={top}")


def _recoding_checks(A, d, depth) -> list[Check]:
    out = []
    for m in (2, 3):
        if depth < m:
            continue
        hb = recode.higher_block_markov(A, m)
        for n in range(m, min(depth, 6) + 1):
            r = recode.higher_block_inequalities_check(A, d, m, n, recoded=hb)
            if not r.ok:
                out.append(Check(f"recoding m={m}", False,
                                 f"n={n}: slacks {r.first_slack:.3e}, {r.second_slack:.3e}"))
                break
        else:
            out.append(Check(f"recoding m={m}", True, f"both inequalities hold for n={m}..{min(depth, 6)}"))
    return out


def _bracket_check(A, d, depth) -> Check:
    seq = tree_entropy_sequence(A, d, depth)
    h_line = line_entropy(A)
    if seq.running_min is None:
        return Check("bracket", True, "tree-shift is empty; no bracket to check")
    ok = seq.running_min >= h_line - 1e-9
    return Check("bracket", ok, f"upper {seq.running_min:.12g} vs line entropy {h_line:.12g}")


def _gap_check(A, d) -> Check:
    gap = analysis.entropy_gap_classify(A, d)
    if gap.case == "empty":
        return Check("entropy gap", True, "empty essential part")
    bad = [w for w in gap.witnesses if not w[3]]
    if bad:
        n, total, ref, _ = bad[0]
        return Check("entropy gap", False, f"n={n}: |B_n|={total} vs reference {ref}")
    return Check("entropy gap", True, f"case {gap.case}, witnesses hold through n={gap.witnesses[-1][0]}")


def _strict_case_checks(A, d, depth) -> list[Check]:
    out = []
    eps = analysis.default_eps(A, d)
    gap_depth = max(depth, 20)
    gs = analysis.gap_set(A, d, eps, gap_depth)
    detail = f"eps={eps:.6g} N={gs.N} depth={gap_depth}"
    if not gs.windows_ok:
        detail += f", window at n={gs.first_uncovered} misses S"
    out.append(Check("window property", gs.windows_ok, detail))

    gc = analysis.gamma_chain_check(A, d, eps, depth)
    worst = int(np.argmin(gc.margins))
    out.append(Check("gamma chain", gc.ok, f"min margin {gc.margins[worst]:.3e} at n={worst}"))

    try:
        cert = analysis.certified_lower_bound(A, d, eps, gap_depth)
    except CertificationUnavailable as exc:
        out.append(Check("certificate", False, f"refused: {exc}"))
        return out
    upper = tree_entropy_sequence(A, d, depth).running_min
    ok = cert.margin > 0 and cert.lower_bound <= upper + 1e-9
    out.append(Check("certificate", ok,
                     f"lower {cert.lower_bound:.12g}, margin {cert.margin:.3e}, upper {upper:.12g}"))
    return out


def _component_check(A, d, depth) -> Check:
    cc = analysis.component_comparison(A, d, depth)
    detail = f"relation {cc.relation}, dominance checked through n={cc.dominance_depth}"
    return Check("component comparison", cc.dominance_ok, detail)


def _random_checks(seed: int, budget) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    # oracle on random essential 3x3 matrices
    tried = 0
    for _ in range(200):
        A = TransitionMatrix(rng.integers(0, 2, size=(3, 3)))
        if essential_reduce(A)[1]:
            continue
        tried += 1
        res = oracle.verify_recursion(A, 2, 2, budget=budget)
        if not res.ok:
            out.append(Check("random oracle", False, f"{A.tolist()}: n={res.mismatch[0]}"))
            break
        if tried == 20:
            break
    if not out:
        out.append(Check("random oracle", True, f"{tried} essential 3x3 matrices, n<=2"))

    # the Hoelder gain bound on random inputs
    worst = math.inf
    for _ in range(200):
        k = int(rng.integers(2, 6))
        d = int(rng.integers(2, 4))
        v = rng.random(k) + 1e-3
        v /= v.sum()
        a = np.sort(rng.random(k) + 0.05)
        perm = rng.permutation(k)
        w = v[perm]
        l = int(np.argmax(a[1:] / a[:-1])) + 1
        lhs = analysis.holder_ratio(a, w, d)
        c = analysis.holder_C(w, d, a[l] / a[l - 1])
        worst = min(worst, lhs - c)
    out.append(Check("random Hoelder gain", worst >= -1e-9, f"min slack {worst:.3e} over 200 cases"))

    # transfer-matrix word counts vs brute force
    ok = True
    for _ in range(20):
        A = TransitionMatrix(rng.integers(0, 2, size=(3, 3)))
        for n in range(1, 6):
            if oracle.enumerate_line_words(A, n) != oracle.enumerate_line_words(A, n, "brute"):
                ok = False
    out.append(Check("random line words", ok, "20 matrices, word lengths 1..5"))
    return out


def run_checks(
    A: TransitionMatrix,
    d: int,
    depth: int,
    include_random: bool = False,
    seed: int = 0,
    budget: int | None = None,
) -> list[Check]:
    checks = [_oracle_check(A, d, depth, budget), _bracket_check(A, d, depth)]
    Ae, _ = essential_reduce(A)
    if not Ae.is_empty:
        checks.append(_gap_check(Ae, d))
        checks.extend(_recoding_checks(Ae, d, depth))
        if is_irreducible(Ae):
            stats = row_sum_stats(Ae)
            if stats.M > stats.m:
                checks.extend(_strict_case_checks(Ae, d, depth))
        else:
            checks.append(_component_check(Ae, d, depth))
    if include_random:
        checks.extend(_random_checks(seed, budget))
    return checks
