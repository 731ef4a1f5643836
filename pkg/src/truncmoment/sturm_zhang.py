"""Rank-one decomposition of a PSD matrix with equal values of a quadratic form.

Given X >= 0 of rank r and a symmetric Q, produce u_1..u_r with
X = sum u_i u_i^T and u_i^T Q u_i = (Q . X) / r for every i.  Starting from
any factorization, repeatedly take the vector with the largest Q-value and
the one with the smallest, and rotate the pair so that one of them hits the
common target exactly.  Each rotation keeps the sum of outer products fixed,
so r - 1 rotations suffice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, ToleranceConfig, as_matrix
from .symlin import frobenius, sym_eigen


@dataclass(frozen=True)
class RankOneDecomposition:
    vectors: np.ndarray  # columns u_i
    common_value: float
    residual: float

    @property
    def rank(self) -> int:
        return self.vectors.shape[1]

    def q_values(self, Q) -> np.ndarray:
        Q = as_matrix(Q)
        return np.einsum("ij,ik,kj->j", self.vectors, Q, self.vectors)


def initial_factor(X, cfg: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Columns sqrt(lambda_i) v_i over the numerically nonzero eigenpairs of X."""
    w, V = sym_eigen(X)
    if w.size and w[-1] < -cfg.psd_threshold(w):
        raise ValueError("matrix is not positive semidefinite")
    keep = w > cfg.rank_threshold(w)
    return V[:, keep] * np.sqrt(w[keep])


def balance_pair(ui, uj, Q, target: float) -> tuple[np.ndarray, np.ndarray]:
    """Rotate (ui, uj) so the first output has Q-value ``target``.

    Requires ui^T Q ui >= target >= uj^T Q uj.  The outer-product sum
    ui ui^T + uj uj^T is unchanged.
    """
    Q = as_matrix(Q)
    ai, aj, b = ui @ Q @ ui, uj @ Q @ uj, ui @ Q @ uj
    # (aj - target) s^2 + 2 b s + (ai - target) = 0, root of smaller modulus
    A, C = aj - target, ai - target
    if C == 0.0:
        s = 0.0
    elif A == 0.0:
        s = -C / (2.0 * b)
    else:
        disc = max(b * b - A * C, 0.0)
        qq = -(b + np.copysign(np.sqrt(disc), b if b != 0 else 1.0))
        roots = [qq / A, C / qq] if qq != 0.0 else [np.sqrt(-C / A), -np.sqrt(-C / A)]
        s = min(roots, key=abs)
    h = np.sqrt(1.0 + s * s)
    return (ui + s * uj) / h, (uj - s * ui) / h


def sz_decompose(X, Q, cfg: ToleranceConfig = DEFAULT_TOL, factor: np.ndarray | None = None) -> RankOneDecomposition:
    """Decompose X = sum u_i u_i^T with u_i^T Q u_i = (Q . X)/rank for all i.

    ``factor`` optionally supplies the starting columns (any U with U U^T = X);
    by default they come from the eigendecomposition of X.
    """
    X, Q = as_matrix(X), as_matrix(Q)
    if X.shape != Q.shape:
        raise ValueError("X and Q must have the same shape")
    U = initial_factor(X, cfg) if factor is None else np.array(factor, dtype=float, copy=True)
    r = U.shape[1]
    if r == 0:
        raise ValueError("X has rank zero")
    delta = frobenius(Q, X) / r
    guard = 1e-12 * np.sqrt(np.linalg.norm(X))
    scale = 1.0 + np.linalg.norm(Q) * np.linalg.norm(X)
    vals = np.einsum("ij,ik,kj->j", U, Q, U)
    active = list(range(r))
    for _ in range(r - 1):
        i = max(active, key=lambda c: vals[c])
        j = min(active, key=lambda c: vals[c])
        if vals[i] - delta <= 1e-15 * scale and delta - vals[j] <= 1e-15 * scale:
            break
        U[:, i], U[:, j] = balance_pair(U[:, i], U[:, j], Q, delta)
        for c in (i, j):
            if np.linalg.norm(U[:, c]) < guard:
                raise ArithmeticError("rank-one decomposition produced a zero vector")
            vals[c] = U[:, c] @ Q @ U[:, c]
        active.remove(i)
    residual = float(np.linalg.norm(U @ U.T - X))
    return RankOneDecomposition(U, float(delta), residual)
