"""The numba kernels and their numpy twins must agree."""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from treetop import kernels
from treetop._accel import HAVE_NUMBA

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")

adjacency = st.integers(1, 4).flatmap(
    lambda k: st.lists(st.integers(0, 1), min_size=k * k, max_size=k * k).map(
        lambda xs: np.array(xs, dtype=np.uint8).reshape(k, k)
    )
)


@given(adjacency, st.integers(2, 3), st.integers(0, 25))
@settings(max_examples=100, deadline=None)
def test_log_recursion_twins(adj, d, n_max):
    s1, r1 = kernels.log_recursion_numba(adj, d, n_max)
    s2, r2 = kernels.log_recursion_numpy(adj, d, n_max)
    np.testing.assert_allclose(s1, s2, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(r1, r2, rtol=1e-12, atol=1e-12)


@given(adjacency, st.integers(2, 3), st.integers(0, 2))
@settings(max_examples=80, deadline=None)
def test_tree_block_search_twins(adj, d, n):
    nodes = (d ** (n + 1) - 1) // (d - 1)
    assume(adj.shape[0] ** nodes <= 1 << 16)  # the numpy twin scans every labeling
    c1, s1 = kernels.tree_block_search_numba(adj, d, nodes, 7)
    c2, s2 = kernels.tree_block_search_numpy(adj, d, nodes, 7)
    np.testing.assert_array_equal(c1, c2)
    np.testing.assert_array_equal(s1, s2)


def test_perron_twins():
    a = np.array([[1, 1, 0], [0, 0, 1], [1, 1, 1]], dtype=np.uint8)
    v1, rho1, res1, _ = kernels.left_perron_iteration_numba(a, 1e-13, 100000)
    v2, rho2, res2, _ = kernels.left_perron_iteration_numpy(a, 1e-13, 100000)
    assert rho1 == pytest.approx(2.0, abs=1e-12) and rho2 == pytest.approx(2.0, abs=1e-12)
    np.testing.assert_allclose(v1, v2, atol=1e-12)


@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=10), st.integers(2, 3), st.floats(1.0, 3.0))
@settings(max_examples=100, deadline=None)
def test_min_partial_sum_twins(raw, d, x):
    v = np.array(raw) / sum(raw)
    a = kernels.min_partial_sum_ratio_numba(v, d, x)
    b = kernels.min_partial_sum_ratio_numpy(v, d, x)
    assert a == pytest.approx(b, rel=1e-12)
