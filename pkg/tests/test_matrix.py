import math
import os
import tracemalloc

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ndwt.errors import DataError, ResourceGuardError
from ndwt.filters import dilate_filter, filter_names, get_filter
from ndwt.matrix import (
    ENV_MAX_ELEMENTS,
    block_map,
    build_level_matrices,
    build_ndwt_matrix,
    build_orthonormal_matrix,
    build_weight_matrix,
    cached_ndwt_matrix,
    check_guard,
    element_cap,
)

from conftest import circulant_oracle

R2 = 1 / math.sqrt(2.0)


def naive_level(taps, m, shift):
    # entry (i, j) = sum of taps k with (i + shift + k) mod m == j
    M = np.zeros((m, m))
    for i in range(m):
        for k, t in enumerate(taps):
            M[i, (i + shift + k) % m] += t
    return M


def test_haar_level1_m2_by_hand():
    lv = build_level_matrices("haar", 2, 1)
    np.testing.assert_allclose(lv.H, [[R2, R2], [R2, R2]], atol=1e-15)
    np.testing.assert_allclose(lv.G, [[R2, -R2], [-R2, R2]], atol=1e-15)


def test_haar_level2_m4_by_hand():
    H = build_level_matrices("haar", 4, 2).H
    for i in range(4):
        want = np.zeros(4)
        want[i] += R2
        want[(i + 2) % 4] += R2
        np.testing.assert_allclose(H[i], want, atol=1e-15)


@pytest.mark.parametrize("name", ["haar", "db4", "sym8", "coif18"])
@pytest.mark.parametrize("m,level,shift", [(2, 1, 0), (5, 1, 2), (7, 3, 0), (16, 2, 1), (31, 4, 5)])
def test_level_matrices_match_naive_placement(name, m, level, shift):
    wf = get_filter(name)
    lv = build_level_matrices(name, m, level, shift)
    np.testing.assert_allclose(lv.H, naive_level(dilate_filter(wf.h, level - 1).taps, m, shift), atol=1e-15)
    np.testing.assert_allclose(lv.G, naive_level(dilate_filter(wf.g, level - 1).taps, m, shift), atol=1e-15)


@pytest.mark.parametrize("name", ["haar", "db8", "sym12", "coif12"])
def test_level_matrix_invariants(name):
    L = get_filter(name).length
    for m in (3, 10, 64):
        lv = build_level_matrices(name, m, 2, shift=1)
        np.testing.assert_allclose(lv.H, circulant_oracle(lv.H[0]), atol=0)
        np.testing.assert_allclose(lv.G, circulant_oracle(lv.G[0]), atol=0)
        np.testing.assert_allclose(lv.H.sum(axis=1), math.sqrt(2), atol=1e-12)
        np.testing.assert_allclose(lv.G.sum(axis=1), 0, atol=1e-12)
        assert (np.count_nonzero(lv.H, axis=1) <= L).all()


def test_level_matrices_reject_short_signal():
    with pytest.raises(ValueError):
        build_level_matrices("haar", 1, 1)


def test_weight_examples():
    np.testing.assert_array_equal(build_weight_matrix(2, 1).diagonal, [0.5] * 4)
    np.testing.assert_array_equal(build_weight_matrix(1, 2).diagonal, [0.25, 0.25, 0.5])
    np.testing.assert_array_equal(build_weight_matrix(3, 3).diagonal, [1 / 8] * 6 + [1 / 4] * 3 + [1 / 2] * 3)


def test_block_map_order():
    kinds = [(b.kind, b.depth, b.start, b.stop) for b in block_map(4, 3)]
    assert kinds == [("c", 3, 0, 4), ("d", 3, 4, 8), ("d", 2, 8, 12), ("d", 1, 12, 16)]


def test_constant_signal_haar_p1():
    W = build_ndwt_matrix("haar", 4, 1)
    out = W.W @ np.ones(4)
    np.testing.assert_allclose(out[:4], math.sqrt(2), atol=1e-15)
    np.testing.assert_allclose(out[4:], 0, atol=1e-15)


def test_haar_p2_block_recursion():
    W = build_ndwt_matrix("haar", 4, 2)
    l1, l2 = build_level_matrices("haar", 4, 1), build_level_matrices("haar", 4, 2)
    np.testing.assert_allclose(W.block("c"), l2.H @ l1.H, atol=1e-15)
    np.testing.assert_allclose(W.block("d", 2), l2.G @ l1.H, atol=1e-15)
    np.testing.assert_allclose(W.block("d", 1), l1.G, atol=1e-15)


@pytest.mark.parametrize("name", ["db6", "sym10", "coif6"])
def test_block_recursion_general(name):
    m, p, shift = 23, 4, 3
    W = build_ndwt_matrix(name, m, p, shift)
    acc = np.eye(m)
    for j in range(1, p + 1):
        lv = build_level_matrices(name, m, j, shift)
        np.testing.assert_allclose(W.block("d", j), lv.G @ acc, atol=1e-14)
        acc = lv.H @ acc
    np.testing.assert_allclose(W.block("c"), acc, atol=1e-14)


@pytest.mark.parametrize("name", filter_names())
def test_reconstruction_identity_per_filter(name):
    for m, p, shift in ((2, 1, 0), (7, 3, 2), (37, 5, 0), (64, 2, 1)):
        W = build_ndwt_matrix(name, m, p, shift)
        T = build_weight_matrix(m, p)
        assert W.shape == ((p + 1) * m, m)
        V = build_orthonormal_matrix(W, T)
        assert np.abs(V.T @ V - np.eye(m)).max() < 1e-10
        cs = (V @ V.T).sum(axis=0)
        np.testing.assert_allclose(cs, np.r_[np.ones(m), np.zeros(p * m)], atol=1e-10)


def test_orthonormal_haar_m2_by_hand():
    W = build_ndwt_matrix("haar", 2, 1)
    V = build_orthonormal_matrix(W, build_weight_matrix(2, 1))
    np.testing.assert_allclose(V, R2 * W.W, atol=1e-15)
    np.testing.assert_allclose((V @ V.T).sum(axis=0), [1, 1, 0, 0], atol=1e-15)


def test_orthonormal_rejects_mismatch():
    with pytest.raises(DataError):
        build_orthonormal_matrix(build_ndwt_matrix("haar", 4, 2), build_weight_matrix(4, 3))


def test_depth_beyond_log2_m_is_allowed():
    W = build_ndwt_matrix("db8", 5, 6)
    V = build_orthonormal_matrix(W, build_weight_matrix(5, 6))
    assert np.abs(V.T @ V - np.eye(5)).max() < 1e-10


def test_column_circulant_property():
    m, p = 12, 3
    W = build_ndwt_matrix("db4", m, p, shift=2).W
    for j in range(m):
        rolled = np.concatenate([np.roll(W[b * m:(b + 1) * m, 0], j) for b in range(p + 1)])
        np.testing.assert_allclose(W[:, j], rolled, atol=1e-15)


def test_matrix_is_read_only():
    W = build_ndwt_matrix("haar", 8, 2)
    with pytest.raises(ValueError):
        W.W[0, 0] = 1.0


def test_cache_returns_same_object():
    a = cached_ndwt_matrix("haar", 16, 3)
    assert cached_ndwt_matrix("HAAR", 16, 3) is a
    assert cached_ndwt_matrix("haar", 16, 3, shift=1) is not a


@settings(max_examples=40, deadline=None)
@given(m=st.integers(2, 40), p=st.integers(1, 6), shift=st.integers(-5, 5),
       name=st.sampled_from(filter_names()))
def test_identity_property(m, p, shift, name):
    W = build_ndwt_matrix(name, m, p, shift)
    T = build_weight_matrix(m, p)
    assert np.abs(W.W.T @ (T.diagonal[:, None] * W.W) - np.eye(m)).max() < 1e-10


def test_guard_counts_and_message():
    assert check_guard(10, 2, cap=300) == 300
    with pytest.raises(ResourceGuardError) as exc:
        check_guard(10, 2, cap=299)
    msg = str(exc.value)
    assert "300" in msg and "299" in msg
    assert exc.value.required == 300 and exc.value.allowed == 299


def test_guard_trips_before_allocation():
    tracemalloc.start()
    try:
        with pytest.raises(ResourceGuardError):
            build_ndwt_matrix("haar", 100_000, 4, max_elements=10_000)
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    assert peak < 1_000_000


def test_guard_env_var(monkeypatch):
    monkeypatch.setenv(ENV_MAX_ELEMENTS, "100")
    assert element_cap() == 100
    with pytest.raises(ResourceGuardError):
        build_ndwt_matrix("haar", 10, 1)
    assert element_cap(500) == 500
    monkeypatch.setenv(ENV_MAX_ELEMENTS, "lots")
    with pytest.raises(DataError):
        element_cap()
    monkeypatch.delenv(ENV_MAX_ELEMENTS)
    assert element_cap() == 2_000_000_000


@pytest.mark.parametrize("m,p", [(1, 1), (4, 0)])
def test_bad_sizes(m, p):
    with pytest.raises(ValueError):
        build_ndwt_matrix("haar", m, p)
