import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import brute_moments, random_measure
from truncmoment.core import (AtomicMeasure, DimensionError, MomentSequence, Polynomial, Status, ToleranceConfig,
                              Verdict, add_index, basis_size, eval_poly, moment_matrix, moments_of_measure,
                              monomial_basis, monomial_name, riesz, verify_measure)


def test_basis_order_bivariate():
    assert monomial_basis(2, 2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def test_basis_order_trivariate_degree_one():
    assert monomial_basis(3, 1) == [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]


@pytest.mark.parametrize("n,k", [(1, 4), (2, 3), (3, 2), (5, 2), (2, 6)])
def test_basis_size_matches_binomial(n, k):
    from math import comb
    assert basis_size(n, k) == comb(n + k, k) == len(monomial_basis(n, k))


def test_basis_is_all_exponents_up_to_degree():
    got = set(monomial_basis(3, 3))
    want = {a for a in itertools.product(range(4), repeat=3) if sum(a) <= 3}
    assert got == want


def test_monomial_name():
    assert monomial_name((0, 0)) == "1"
    assert monomial_name((2, 1)) in ("x1^2*x2", "x1^2 x2", "x1^2x2")


def test_from_dict_rejects_gaps_and_out_of_range():
    with pytest.raises(DimensionError):
        MomentSequence.from_dict(2, 1, {(0, 0): 1, (1, 0): 0})
    with pytest.raises(DimensionError):
        MomentSequence.from_dict(2, 1, {(0, 0): 1, (1, 0): 0, (0, 1): 0, (2, 0): 1})


def test_sequence_rejects_wrong_length_and_nan():
    with pytest.raises(DimensionError):
        MomentSequence(2, 1, [1.0, 2.0])
    with pytest.raises(ValueError):
        MomentSequence(1, 1, [1.0, float("nan")])


def test_sequence_helpers():
    y = MomentSequence(1, 4, [1, 2, 3, 4, 5])
    assert y[(3,)] == 4
    assert y.truncate(2).values.tolist() == [1, 2, 3]
    assert y.scaled(2)[(4,)] == 10
    assert y.replace({(0,): 7})[(0,)] == 7
    with pytest.raises(DimensionError):
        y[(5,)]


def test_moment_matrix_entries_are_shifted_moments():
    mu = AtomicMeasure([[1.0, 2.0], [-1.0, 0.5]], [0.5, 1.5])
    y = moments_of_measure(mu, 4)
    M = moment_matrix(y)
    for i, a in enumerate(M.labels):
        for j, b in enumerate(M.labels):
            assert M.entries[i, j] == pytest.approx(y[add_index(a, b)])


def test_moments_match_brute_force(rng):
    mu = random_measure(rng, 3, 4)
    basis = monomial_basis(3, 3)
    np.testing.assert_allclose(moments_of_measure(mu, 3).values, brute_moments(mu.atoms, mu.weights, basis),
                               rtol=1e-12, atol=1e-12)


def test_measure_validation():
    with pytest.raises(ValueError):
        AtomicMeasure([[0.0]], [0.0])
    with pytest.raises(ValueError):
        AtomicMeasure([[0.0], [1.0]], [1.0, -1.0])
    with pytest.raises(DimensionError):
        AtomicMeasure([[0.0], [1.0]], [1.0])


def test_measure_merges_close_atoms():
    mu = AtomicMeasure([[1.0, 1.0], [1.0 + 1e-12, 1.0]], [1.0, 3.0])
    assert len(mu) == 1
    assert mu.mass == pytest.approx(4.0)


def test_verify_measure_pass_and_fail():
    mu = AtomicMeasure([[0.0], [2.0]], [1.0, 1.0])
    y = moments_of_measure(mu, 4)
    assert verify_measure(y, mu).passed
    bad = AtomicMeasure([[0.0], [2.0]], [1.0, 1.1])
    rep = verify_measure(y, bad)
    assert not rep.passed and rep.max_abs_deviation == pytest.approx(1.6)


def test_riesz_of_polynomial_is_integral():
    mu = AtomicMeasure([[1.0, 2.0], [3.0, -1.0]], [2.0, 1.0])
    y = moments_of_measure(mu, 2)
    p = Polynomial(2, {(2, 0): 1.0, (0, 1): -3.0, (0, 0): 4.0})
    direct = sum(w * eval_poly(p, u) for u, w in zip(mu.atoms, mu.weights))
    assert riesz(y, p) == pytest.approx(direct)


def test_polynomial_product_and_vector_roundtrip():
    p = Polynomial(2, {(1, 0): 1.0, (0, 0): -1.0})
    q = Polynomial.monomial((0, 1))
    r = p * q
    assert eval_poly(r, (3.0, 2.0)) == pytest.approx(4.0)
    v = r.to_vector(2)
    assert Polynomial.from_vector(2, 2, v).degree == 2


def test_tolerance_config_validation():
    with pytest.raises(ValueError):
        ToleranceConfig(psd_tol=0.0)
    cfg = ToleranceConfig()
    assert cfg.moment_threshold([1.0, -3.0]) == pytest.approx(1e-8 * 4)


def test_constructed_verdict_needs_measure():
    with pytest.raises(ValueError):
        Verdict(Status.MEASURE_CONSTRUCTED)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 5), st.integers(0, 2 ** 31))
def test_moment_matrix_of_measure_is_psd(n, d, r, seed):
    mu = random_measure(np.random.default_rng(seed), n, r)
    M = moment_matrix(moments_of_measure(mu, 2 * d)).entries
    w = np.linalg.eigvalsh(M)
    assert w[0] >= -1e-9 * max(1.0, np.abs(w).max()) * len(w)
    assert np.linalg.matrix_rank(M, tol=1e-9 * np.abs(w).max()) <= r


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 4), st.integers(0, 2 ** 31))
def test_moments_are_linear_in_weights(n, k, seed):
    rng = np.random.default_rng(seed)
    mu = random_measure(rng, n, 3)
    c = rng.uniform(0.1, 3.0)
    scaled = AtomicMeasure(mu.atoms, c * mu.weights)
    np.testing.assert_allclose(moments_of_measure(scaled, k).values, c * moments_of_measure(mu, k).values,
                               rtol=1e-12, atol=1e-12)
