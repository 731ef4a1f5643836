import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from truncmoment.sturm_zhang import balance_pair, initial_factor, sz_decompose


def _psd(rng, n, r):
    B = rng.normal(size=(n, r))
    return B @ B.T


def test_initial_factor_reconstructs(rng):
    X = _psd(rng, 5, 3)
    U = initial_factor(X)
    assert U.shape == (5, 3)
    np.testing.assert_allclose(U @ U.T, X, atol=1e-10)


def test_initial_factor_rejects_indefinite():
    with pytest.raises(ValueError):
        initial_factor(np.diag([1.0, -1.0]))


def test_balance_pair_hits_target_and_keeps_sum(rng):
    Q = np.diag([1.0, -1.0, 0.5])
    ui, uj = np.array([2.0, 0.1, 0.0]), np.array([0.1, 2.0, 0.3])
    ai, aj = ui @ Q @ ui, uj @ Q @ uj
    target = 0.3 * ai + 0.7 * aj
    vi, vj = balance_pair(ui, uj, Q, target)
    assert vi @ Q @ vi == pytest.approx(target)
    np.testing.assert_allclose(np.outer(vi, vi) + np.outer(vj, vj), np.outer(ui, ui) + np.outer(uj, uj), atol=1e-12)


def test_decomposition_with_zero_trace_form():
    X = np.eye(2)
    Q = np.diag([1.0, -1.0])
    dec = sz_decompose(X, Q)
    assert dec.rank == 2
    np.testing.assert_allclose(dec.q_values(Q), 0.0, atol=1e-12)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        sz_decompose(np.eye(2), np.eye(3))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7), st.data())
def test_decomposition_properties(n, data):
    r = data.draw(st.integers(1, n))
    rng = np.random.default_rng(data.draw(st.integers(0, 2 ** 31)))
    X = _psd(rng, n, r)
    A = rng.normal(size=(n, n))
    Q = A + A.T
    dec = sz_decompose(X, Q)
    U = dec.vectors
    assert dec.rank == r
    assert np.linalg.norm(U @ U.T - X) <= 1e-8 * (1 + np.linalg.norm(X))
    scale = 1 + np.abs(Q).max() * np.trace(X)
    vals = dec.q_values(Q)
    assert vals.max() - vals.min() <= 1e-8 * scale
    assert vals.mean() == pytest.approx(np.sum(Q * X) / r, abs=1e-8 * scale)
