"""Dense symmetric linear algebra used by the moment routines.

The eigensolver is a cyclic Jacobi iteration: slower than LAPACK but
deterministic, accurate on small eigenvalues, and plenty fast for the
matrix sizes that appear here (at most a few dozen rows).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import DEFAULT_TOL, DimensionError, PreconditionError, ToleranceConfig, as_matrix


def _check_symmetric(A: np.ndarray) -> np.ndarray:
    A = as_matrix(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"square matrix required, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    scale = 1.0 + np.abs(A).max(initial=0.0)
    if np.abs(A - A.T).max(initial=0.0) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    return 0.5 * (A + A.T)


def sym_eigen(A, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors (columns)."""
    A = _check_symmetric(A).copy()
    n = A.shape[0]
    V = np.eye(n)
    if n == 0:
        return np.zeros(0), V
    norm = np.linalg.norm(A)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= 1e-15 * norm or off == 0.0:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                g = 100.0 * abs(apq)
                if abs(A[p, p]) + g == abs(A[p, p]) and abs(A[q, q]) + g == abs(A[q, q]):
                    A[p, q] = A[q, p] = 0.0
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                colp = A[:, p].copy()
                colq = A[:, q]
                A[:, p] = c * colp - s * colq
                A[:, q] = s * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :]
                A[p, :] = c * rowp - s * rowq
                A[q, :] = s * rowp + c * rowq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                V[:, p] = c * vp - s * V[:, q]
                V[:, q] = s * vp + c * V[:, q]
    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], V[:, order]


def frobenius(A, B) -> float:
    """Trace inner product A . B."""
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise DimensionError(f"shape mismatch {A.shape} vs {B.shape}")
    return float(np.sum(A * B))


class Definiteness(str, enum.Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    PSD_SINGULAR = "PositiveSemidefiniteSingular"
    INDEFINITE = "Indefinite"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class PsdReport:
    status: Definiteness
    rank: int
    eigenvalues: np.ndarray
    psd_threshold: float
    rank_threshold: float

    @property
    def min_eig(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def is_psd(self) -> bool:
        return self.status is not Definiteness.INDEFINITE


def psd_status(A, cfg: ToleranceConfig = DEFAULT_TOL) -> PsdReport:
    w, _ = sym_eigen(A)
    ptol, rtol = cfg.psd_threshold(w), cfg.rank_threshold(w)
    rank = int(np.sum(w > rtol))
    if w.size and w[-1] < -ptol:
        status = Definiteness.INDEFINITE
    elif rank == w.size:
        status = Definiteness.POSITIVE_DEFINITE
    else:
        status = Definiteness.PSD_SINGULAR
    return PsdReport(status, rank, w, ptol, rtol)


def numeric_rank(A, cfg: ToleranceConfig = DEFAULT_TOL) -> int:
    w, _ = sym_eigen(A)
    return int(np.sum(w > cfg.rank_threshold(w)))


@dataclass(frozen=True)
class KernelBasis:
    """Orthonormal kernel basis plus an echelon form of the same space.

    Each row of ``relations`` has a unit coefficient at its pivot column and
    zeros at the pivots of the other rows; pivots are taken from the right,
    so every relation expresses its highest label through lower ones.
    """

    vectors: np.ndarray
    relations: np.ndarray
    pivots: tuple

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def _echelon_from_right(K: np.ndarray, pivot_min: float = 1e-6) -> tuple[np.ndarray, tuple]:
    R = K.T[:, ::-1].copy()
    m = R.shape[1]
    pivots = []
    row = 0
    for col in range(m):
        if row == R.shape[0]:
            break
        cand = np.argmax(np.abs(R[row:, col])) + row
        if abs(R[cand, col]) < pivot_min:
            continue
        R[[row, cand]] = R[[cand, row]]
        R[row] /= R[row, col]
        for r in range(R.shape[0]):
            if r != row:
                R[r] -= R[r, col] * R[row]
        pivots.append(col)
        row += 1
    R = R[:row, ::-1]
    R[np.abs(R) < 1e-12] = 0.0
    piv = [m - 1 - c for c in pivots]
    order = np.argsort(piv)
    return R[order], tuple(piv[i] for i in order)


def kernel_basis(A, cfg: ToleranceConfig = DEFAULT_TOL) -> KernelBasis:
    w, V = sym_eigen(A)
    mask = np.abs(w) <= cfg.rank_threshold(w)
    K = V[:, mask]
    if K.shape[1] == 0:
        return KernelBasis(K, np.zeros((0, V.shape[0])), ())
    rel, piv = _echelon_from_right(K)
    return KernelBasis(K, rel, piv)


# -- Schur blocks --------------------------------------------------------------


def fraction_inverse(rows) -> list:
    """Exact inverse of a square matrix of Fractions by Gauss-Jordan."""
    n = len(rows)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if p is None:
            raise PreconditionError("matrix is singular")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [v / piv for v in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                ci = aug[c]
                aug[i] = [a - f * b for a, b in zip(aug[i], ci)]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class SchurBlocks:
    """A = [[N, U], [U^T, Delta]] and A^{-1} = [[P, V], [V^T, eps]]."""

    N: object
    U: object
    Delta: object
    P: object
    V: object
    eps: object


def schur_blocks(A, split: int, exact: bool = False) -> SchurBlocks:
    """Block A after ``split`` rows/columns and block its inverse the same way.

    With ``exact=True`` the entries are converted to Fractions and the
    inverse is computed exactly; the returned blocks are then nested lists.
    """
    if exact:
        rows = [[Fraction(v) for v in row] for row in A]
        n = len(rows)
        if not 0 < split < n:
            raise DimensionError("split must leave both blocks non-empty")
        inv = fraction_inverse(rows)
        blk = lambda M, r0, r1, c0, c1: [row[c0:c1] for row in M[r0:r1]]
        return SchurBlocks(
            blk(rows, 0, split, 0, split), blk(rows, 0, split, split, n), blk(rows, split, n, split, n),
            blk(inv, 0, split, 0, split), blk(inv, 0, split, split, n), blk(inv, split, n, split, n),
        )
    A = _check_symmetric(A)
    n = A.shape[0]
    if not 0 < split < n:
        raise DimensionError("split must leave both blocks non-empty")
    # equilibrate first: moment matrices mix entries of very different size
    d = 1.0 / np.sqrt(np.abs(np.diag(A)).clip(min=1e-300))
    As = A * d[:, None] * d[None, :]
    inv = np.linalg.inv(As) * d[:, None] * d[None, :]
    inv = 0.5 * (inv + inv.T)
    return SchurBlocks(A[:split, :split], A[:split, split:], A[split:, split:],
                       inv[:split, :split], inv[:split, split:], inv[split:, split:])


# -- pencil search -------------------------------------------------------------


@dataclass(frozen=True)
class PencilResult:
    """Best multiplier t for lambda_min(F - tQ) and whether it certifies F - tQ >= 0."""

    t: float
    min_eig: float
    feasible: bool
    bottom_vector: np.ndarray | None = None
    reason: str = ""


def _pencil_min(F, Q, t):
    w, V = sym_eigen(F - t * Q)
    return w[-1], V[:, -1], w


def pencil_feasible(F, Q, domain: str = "nonneg", cfg: ToleranceConfig = DEFAULT_TOL,
                    max_width: float = 1e12, iters: int = 200) -> PencilResult:
    """Search t (t >= 0 for ``domain='nonneg'``, any real t for ``'real'``)
    maximizing the concave map t -> lambda_min(F - tQ).

    The acceptance threshold shrinks like 1/(1 + |t|): a multiplier of size
    t amplifies rounding in F - tQ, and without the shrink every pencil whose
    bottom eigenvalue merely creeps towards zero as t grows would pass.
    """
    F, Q = _check_symmetric(F), _check_symmetric(Q)
    if F.shape != Q.shape:
        raise DimensionError("F and Q must have the same shape")
    if domain not in ("nonneg", "real"):
        raise ValueError("domain must be 'nonneg' or 'real'")
    base = cfg.psd_tol * F.shape[0] * max(np.abs(sym_eigen(F)[0]).max(), np.abs(sym_eigen(Q)[0]).max(), 1.0)
    cache: dict = {}

    def g(t):
        if t not in cache:
            cache[t] = _pencil_min(F, Q, t)
        return cache[t][0]

    def ok(t):
        return g(t) >= -base / (1.0 + abs(t))

    def done(t, reason):
        lam, vec, _ = cache[t] if t in cache else _pencil_min(F, Q, t)
        return PencilResult(float(t), float(lam), bool(ok(t)), vec, reason)

    lo, hi = (0.0, 1.0) if domain == "nonneg" else (-1.0, 1.0)
    for t in (0.0, lo, hi):
        if ok(t):
            return done(t, "feasible")
    # expand outwards while lambda_min keeps improving
    while hi - lo < max_width and g(4.0 * hi) >= g(hi):
        hi *= 4.0
        if ok(hi):
            return done(hi, "feasible")
    hi = 4.0 * hi if hi - lo < max_width else hi
    if domain == "real":
        while hi - lo < max_width and g(4.0 * lo) >= g(lo):
            lo *= 4.0
            if ok(lo):
                return done(lo, "feasible")
        lo = 4.0 * lo if hi - lo < max_width else lo
    # golden-section search on the concave objective
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    for _ in range(iters):
        if b - a <= 1e-13 * max(1.0, abs(a), abs(b)):
            break
        if g(c) < g(d):
            a, c = c, d
            d = a + phi * (b - a)
        else:
            b, d = d, c
            c = b - phi * (b - a)
        for t in (c, d):
            if ok(t):
                return done(t, "feasible")
    best = max(cache, key=lambda t: cache[t][0])
    return done(best, "infeasible")
