from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from truncmoment.core import DimensionError, PreconditionError
from truncmoment.symlin import (Definiteness, fraction_inverse, frobenius, kernel_basis, numeric_rank,
                                pencil_feasible, psd_status, schur_blocks, sym_eigen)


def _sym(rng, n):
    A = rng.normal(size=(n, n))
    return A + A.T


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 9), st.integers(0, 2 ** 31))
def test_jacobi_matches_lapack(n, seed):
    A = _sym(np.random.default_rng(seed), n)
    w, V = sym_eigen(A)
    np.testing.assert_allclose(w, np.sort(np.linalg.eigvalsh(A))[::-1], atol=1e-10 * (1 + np.abs(w).max()))
    np.testing.assert_allclose(V @ np.diag(w) @ V.T, A, atol=1e-10 * (1 + np.abs(A).max()))
    np.testing.assert_allclose(V.T @ V, np.eye(n), atol=1e-12)


def test_sym_eigen_rejects_asymmetric():
    with pytest.raises(Exception):
        sym_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_frobenius():
    assert frobenius(np.eye(2), np.array([[2.0, 5.0], [5.0, 3.0]])) == 5.0


@pytest.mark.parametrize("A,status,rank", [
    (np.diag([3.0, 1.0]), Definiteness.POSITIVE_DEFINITE, 2),
    (np.array([[1.0, 1.0], [1.0, 1.0]]), Definiteness.PSD_SINGULAR, 1),
    (np.diag([1.0, -1e-3]), Definiteness.INDEFINITE, 1),
    (np.diag([1.0, -1e-14]), Definiteness.PSD_SINGULAR, 1),
])
def test_psd_status(A, status, rank):
    rep = psd_status(A)
    assert rep.status is status and rep.rank == rank


def test_numeric_rank_low_rank(rng):
    B = rng.normal(size=(7, 3))
    assert numeric_rank(B @ B.T) == 3


def test_kernel_relations_pivot_on_highest_label():
    # columns 1, x, x^2 of the Hankel matrix of the point mass at 2
    A = np.array([[1.0, 2.0, 4.0], [2.0, 4.0, 8.0], [4.0, 8.0, 16.0]])
    kb = kernel_basis(A)
    assert kb.dim == 2
    assert kb.pivots == (1, 2)
    np.testing.assert_allclose(kb.relations, [[-2.0, 1.0, 0.0], [-4.0, 0.0, 1.0]], atol=1e-10)
    np.testing.assert_allclose(A @ kb.relations.T, 0.0, atol=1e-9)


def test_kernel_of_definite_matrix_is_empty():
    assert kernel_basis(np.eye(3)).dim == 0


def test_fraction_inverse_against_sympy():
    rows = [[Fraction(2), Fraction(1, 3), Fraction(0)], [Fraction(1, 3), Fraction(5), Fraction(-1)],
            [Fraction(0), Fraction(-1), Fraction(7, 2)]]
    inv = fraction_inverse(rows)
    ref = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in r] for r in rows]).inv()
    for i in range(3):
        for j in range(3):
            assert inv[i][j] == Fraction(int(ref[i, j].p), int(ref[i, j].q))


def test_fraction_inverse_singular():
    with pytest.raises(PreconditionError):
        fraction_inverse([[1, 2], [2, 4]])


def test_schur_blocks_float_and_exact(rng):
    B = rng.normal(size=(5, 5))
    A = B @ B.T + np.eye(5)
    blk = schur_blocks(A, 3)
    inv = np.linalg.inv(A)
    np.testing.assert_allclose(blk.P, inv[:3, :3], rtol=1e-10)
    np.testing.assert_allclose(blk.eps, inv[3:, 3:], rtol=1e-10)
    # P - V eps^{-1} V^T inverts N
    np.testing.assert_allclose(np.linalg.inv(blk.P - blk.V @ np.linalg.solve(blk.eps, blk.V.T)), A[:3, :3],
                               rtol=1e-9, atol=1e-9)
    Ai = [[Fraction(int(v)) for v in row] for row in np.rint(A * 10)]
    ex = schur_blocks(Ai, 4, exact=True)
    assert isinstance(ex.eps[0][0], Fraction)
    with pytest.raises(DimensionError):
        schur_blocks(A, 0)


def test_pencil_trust_region_feasible():
    # f = 1 - |x|^2 >= 0 on q = 1 - |x|^2 >= 0: t = 1 works
    F = np.diag([1.0, -1.0, -1.0])
    res = pencil_feasible(F, F, "nonneg")
    assert res.feasible and res.min_eig >= -1e-9


def test_pencil_infeasible():
    # f = x1 x2 is not >= t*(-x1^2) for any t >= 0
    F = np.array([[0, 0, 0], [0, 0, 0.5], [0, 0.5, 0]])
    Q = np.diag([0.0, -1.0, 0.0])
    res = pencil_feasible(F, Q, "nonneg")
    assert not res.feasible


def test_pencil_real_domain_negative_multiplier():
    F = np.diag([1.0, 1.0])
    Q = np.diag([2.0, -1.0])
    res = pencil_feasible(np.diag([-1.0, 1.0]), Q, "real")
    assert res.feasible and res.t < 0
    with pytest.raises(ValueError):
        pencil_feasible(F, Q, "bogus")
