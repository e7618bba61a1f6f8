import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treetop import (
    TransitionMatrix,
    certified_lower_bound,
    component_comparison,
    entropy_gap_classify,
    epsilon_range,
    equality_verdict,
    gamma_chain_check,
    gap_set,
    holder_C,
    line_entropy,
    pigeonhole_ratio_index,
    tree_entropy_sequence,
    window_constant,
)
from treetop.analysis import HolderBound, default_eps, holder_ratio, kappa
from treetop.counting import block_count_exact
from treetop.errors import CertificationUnavailable, DomainError, NotApplicable

from conftest import FULL2, GOLDEN, SSE_A, STAIRCASE, TWO_GOLDEN, random_essential, random_strict_irreducible

LOG2 = math.log(2)


def test_eps_range():
    assert epsilon_range(GOLDEN, 2)[1] == pytest.approx(2 ** (1 / 3) - 1)
    assert epsilon_range(SSE_A, 2)[1] == pytest.approx(3 ** (1 / 3) - 1)
    with pytest.raises(NotApplicable):
        epsilon_range(FULL2, 2)


def test_window_constant_golden():
    assert window_constant(GOLDEN, 2, 0.1) == 1
    assert window_constant(GOLDEN, 2, 0.25) == 19
    with pytest.raises(DomainError):
        window_constant(GOLDEN, 2, 0.3)


@given(st.integers(2, 4), st.integers(1, 3), st.integers(2, 3), st.floats(0.01, 0.99))
def test_window_constant_is_minimal(M, m, d, frac):
    if M <= m:
        return
    k = max(M, m + 1)
    rows = [[1] * M + [0] * (k - M)] + [[1] * m + [0] * (k - m)] * (k - 1)
    A = TransitionMatrix(rows)
    eps = frac * ((M / m) ** (1 / (d + 1)) - 1)
    if not (1 + Fraction(eps)) ** (d + 1) * m < M:
        return
    N = window_constant(A, d, eps)
    q = 1 + Fraction(eps)
    base = Fraction(M, m) / q ** (d + 1)
    assert base**N > q**2
    assert N == 1 or base ** (N - 1) <= q**2


def test_gap_set_golden():
    gs = gap_set(GOLDEN, 2, 0.1, 20)
    assert gs.N == 1 and gs.windows_ok and gs.S == tuple(range(21))


def test_gap_set_log_mode_matches_exact():
    exact = gap_set(SSE_A, 2, 0.2, 18)
    mixed = gap_set(SSE_A, 2, 0.2, 18, exact_digits=30)
    assert exact.S == mixed.S


def test_pigeonhole_index():
    assert pigeonhole_ratio_index([1.0, 1.0, 2.0], 0.5) == 2
    assert pigeonhole_ratio_index([1.0, 1.5, 1.6], 0.5) == 1
    with pytest.raises(DomainError):
        pigeonhole_ratio_index([1.0, 1.1], 0.5)


def test_pigeonhole_on_gap_set_members(rng):
    from treetop.analysis import _ax_profile

    for _ in range(10):
        A = random_strict_irreducible(rng)
        eps = default_eps(A, 2)
        gs = gap_set(A, 2, eps, 12)
        prof = {n: vals for n, kind, vals in _ax_profile(A, 2, 12, 10**6)}
        for n in gs.S:
            lo = min(prof[n])
            w = sorted(float(Fraction(x, lo)) for x in prof[n])  # scale to avoid float overflow
            l = pigeonhole_ratio_index(w, eps)
            assert w[l] > w[l - 1] * (1 + eps) ** (1 / (A.k - 1))


def test_holder_C_at_one_and_golden():
    phi = (1 + 5**0.5) / 2
    v = [phi / (1 + phi), 1 / (1 + phi)]
    assert holder_C(v, 2, 1.0) == 1.0
    # W = 1/(1+phi) gives the smaller of the two ratios
    assert holder_C(v, 2, 1.1) == pytest.approx(1.0020939, abs=1e-7)
    assert holder_C([0.5, 0.5], 2, 1.1) == pytest.approx(1.00227, abs=1e-5)


@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=8), st.integers(2, 4))
@settings(max_examples=100, deadline=None)
def test_holder_C_monotone(raw, d):
    v = np.array(raw) / sum(raw)
    C = HolderBound(v, d)
    grid = np.linspace(1.0, 4.0, 25)
    vals = [C(x) for x in grid]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=10), st.integers(2, 3), st.floats(1.0, 3.0))
@settings(max_examples=100, deadline=None)
def test_extremes_equal_subset_minimum(raw, d, x):
    v = np.array(raw) / sum(raw)
    C = HolderBound(v, d)
    assert C.extremes(x) == pytest.approx(C(x), rel=1e-12)


def test_holder_large_k_uses_extremes():
    v = np.full(25, 1 / 25)
    C = HolderBound(v, 2)
    assert C.method == "extremes" and C(1.2) > 1.0


def test_holder_gain_random(rng):
    worst = math.inf
    for _ in range(500):
        k = int(rng.integers(2, 7))
        d = int(rng.integers(2, 4))
        v = rng.random(k) + 1e-3
        v /= v.sum()
        a = np.sort(rng.random(k) * 3 + 0.01)
        w = v[rng.permutation(k)]
        for l in range(1, k):
            worst = min(worst, holder_ratio(a, w, d) - holder_C(w, d, a[l] / a[l - 1]))
    assert worst >= -1e-9


def test_kappa():
    assert kappa(2, 1) == pytest.approx(1 / 6)


def test_gamma_chain_golden():
    gc = gamma_chain_check(GOLDEN, 2, 0.1, 12)
    assert gc.ok
    assert gc.margins[1] == pytest.approx(0.0842, abs=5e-4)


def test_gamma_chain_random(rng):
    for _ in range(25):
        A = random_strict_irreducible(rng)
        assert gamma_chain_check(A, 2, default_eps(A, 2), 12).ok


def test_certificate_golden():
    cert = certified_lower_bound(GOLDEN, 2, 0.1, 20)
    assert cert.kappa == pytest.approx(1 / 6)
    assert cert.margin >= 1e-5
    assert list(cert.to_dict()) == [
        "eps", "N", "S_prefix", "kappa", "C_value", "lower_bound", "line_entropy", "margin"
    ]


def test_certificate_sse_matrix():
    cert = certified_lower_bound(SSE_A, 2, 0.1, 20)
    assert cert.lower_bound > LOG2


def test_certificate_refusals():
    with pytest.raises(NotApplicable):
        certified_lower_bound(FULL2, 2, 0.1, 20)
    with pytest.raises(DomainError):
        certified_lower_bound(TWO_GOLDEN, 2, 0.1, 20)


def test_certificate_refuses_when_density_too_small():
    # depth 1 with N = 19 cannot show the windows
    with pytest.raises((CertificationUnavailable, DomainError)):
        certified_lower_bound(GOLDEN, 2, 0.25, 5)


def test_certificate_below_upper_random(rng):
    for _ in range(15):
        A = random_strict_irreducible(rng, k_max=4)
        try:
            cert = certified_lower_bound(A, 2, default_eps(A, 2), 20)
        except CertificationUnavailable:
            continue
        assert cert.lower_bound > line_entropy(A)
        for h in tree_entropy_sequence(A, 2, 10).prefix_minima():
            assert cert.lower_bound <= h + 1e-9


def test_equality_verdict():
    assert equality_verdict(TransitionMatrix.full(3)) == "equal"
    assert equality_verdict(GOLDEN) == "strictly_greater"
    assert equality_verdict(TWO_GOLDEN) == "not_applicable"


def test_entropy_gap_examples():
    g = entropy_gap_classify(GOLDEN, 2)
    assert g.case == "M2_bounded" and g.bound == pytest.approx(0.5 * LOG2)
    assert g.witnesses[2] == (2, 41, 16, True)
    perm = TransitionMatrix([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    g = entropy_gap_classify(perm, 2)
    assert g.case == "M1_zero" and g.bound == 0.0 and g.ok
    g = entropy_gap_classify(TWO_GOLDEN, 2)
    assert g.M == 4 and g.bound == pytest.approx(LOG2)
    assert entropy_gap_classify(TransitionMatrix([[0, 1], [0, 0]]), 2).case == "empty"


def test_entropy_gap_random(rng):
    for _ in range(40):
        A = random_essential(rng, int(rng.integers(1, 5)))
        g = entropy_gap_classify(A, 2)
        assert g.ok
        if g.case == "M2_bounded":
            assert tree_entropy_sequence(A, 2, 6).running_min >= g.bound - 1e-9


def test_component_comparison_two_golden():
    cc = component_comparison(TWO_GOLDEN, 2, 1)
    assert cc.strict and cc.dominance_ok
    for c in cc.components:
        assert c.upper <= math.log(5) / 3 + 1e-12
    assert cc.whole_lower >= LOG2


def test_component_comparison_staircase():
    cc = component_comparison(STAIRCASE, 2, 10)
    assert cc.dominance_ok
    assert [c.indices for c in cc.components] == [(0,), (1, 2)]
    assert cc.whole_lower == pytest.approx(LOG2)
    assert cc.whole_upper - LOG2 < 1e-3


def test_dominance_random(rng):
    for _ in range(20):
        A = random_essential(rng, 4)
        cc = component_comparison(A, 2, 4)
        assert cc.dominance_ok
