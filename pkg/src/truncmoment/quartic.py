"""Bivariate quartic (and cubic, univariate) truncated moment problems.

Covers recursive generation of column relations, the real variety of the
relations of M2(y), flat extensions and atom extraction from them, and the
decision procedures built from these pieces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial as P1
from scipy.optimize import least_squares, nnls

from .core import (
    DEFAULT_TOL, AtomicMeasure, DimensionError, ExtractionError, NoMeasureError, MomentMatrix, MomentSequence, Polynomial, Status,
    ToleranceConfig, Verdict, add_index, as_matrix, basis_size, moment_block, moment_matrix, monomial_basis,
    moments_of_measure, unit_index, verify_measure,
)
from .quadratic import ApproximationError, ApproxStep
from .symlin import Definiteness, kernel_basis, psd_status, sym_eigen

# -- recursive generation ---------------------------------------------------------


@dataclass(frozen=True)
class RecursiveCheck:
    passed: bool
    relations: list
    violation: tuple | None = None  # (p, q) with p a relation and p*q not one

    def __bool__(self) -> bool:
        return self.passed


def column_relations(M: MomentMatrix, cfg: ToleranceConfig = DEFAULT_TOL) -> list[Polynomial]:
    """Echelonized kernel relations of M as polynomials over its labels."""
    kb = kernel_basis(M.entries, cfg)
    n = len(M.labels[0])
    return [Polynomial(n, dict(zip(M.labels, row))) for row in kb.relations]


def _relation_residual(A: np.ndarray, vec: np.ndarray) -> float:
    return float(np.linalg.norm(A @ vec) / np.linalg.norm(vec))


def recursive_check(M: MomentMatrix, cfg: ToleranceConfig = DEFAULT_TOL) -> RecursiveCheck:
    """Check that p(X) = 0 implies (pq)(X) = 0 whenever deg pq <= d."""
    rels = column_relations(M, cfg)
    A = M.entries
    n, d = len(M.labels[0]), M.d
    w, _ = sym_eigen(A)
    tol = 10.0 * cfg.rank_threshold(w)
    for p in rels:
        for qa in monomial_basis(n, d - p.degree)[1:]:
            h = p * Polynomial.monomial(qa)
            if _relation_residual(A, h.to_vector(d)) > tol:
                return RecursiveCheck(False, rels, (p, Polynomial.monomial(qa)))
    return RecursiveCheck(True, rels)


# -- real varieties of conics ---------------------------------------------------------


@dataclass(frozen=True)
class Variety:
    kind: str  # "Finite", "Infinite" or "Empty"
    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))

    @property
    def card(self) -> float:
        if self.kind == "Infinite":
            return float("inf")
        return len(self.points)


def _poly_scale(p: Polynomial) -> float:
    return 1.0 + max(abs(c) for c in p.coeffs.values())


def _on_all(rels, x, tol=1e-6) -> bool:
    return all(abs(p(x)) <= tol * _poly_scale(p) * (1.0 + x @ x) for p in rels)


def _single_conic(p: Polynomial, tol: float = 1e-10) -> Variety:
    from .quadratic import split_quadratic

    c = split_quadratic(p)
    s = c.scale()
    if np.abs(c.Q2).max() <= tol * s:
        if np.abs(c.q1).max() <= tol * s:
            return Variety("Empty") if abs(c.q0) > tol * s else Variety("Infinite")
        return Variety("Infinite")
    w, V = sym_eigen(c.Q2)
    big = np.abs(w) > tol * s
    if w.min() < -tol * s and w.max() > tol * s:
        return Variety("Infinite")
    # semidefinite quadratic part: p = const + sum w_i (v_i.(x - x*))^2 + linear part on the kernel
    kern = V[:, ~big]
    if kern.size and np.abs(kern.T @ c.q1).max() > tol * s:
        return Variety("Infinite")
    xs = -V[:, big] @ ((V[:, big].T @ c.q1) / w[big])
    val = c(xs)
    sign = np.sign(w[big][0])
    if val * sign > tol * s:
        return Variety("Empty")
    if val * sign < -tol * s or kern.size:
        return Variety("Infinite")
    return Variety("Finite", xs[None, :])


def _rotate(p: Polynomial, R: np.ndarray) -> Polynomial:
    """p(R z) as a polynomial in z."""
    lin = [Polynomial(2, {(1, 0): R[i, 0], (0, 1): R[i, 1]}) for i in range(2)]
    out = Polynomial(2, {})
    for (a, b), coef in p.coeffs.items():
        term = Polynomial.constant(2, coef)
        for _ in range(a):
            term = term * lin[0]
        for _ in range(b):
            term = term * lin[1]
        out = out + term
    return out


def _in_second(p: Polynomial) -> list:
    """Coefficients of p as a polynomial in z2 whose coefficients are polynomials in z1."""
    deg = max((b for _, b in p.coeffs), default=0)
    coefs = [np.zeros(p.degree + 1) for _ in range(deg + 1)]
    for (a, b), c in p.coeffs.items():
        coefs[b][a] += c
    return [P1(c) for c in coefs]


def _det(M):
    if len(M) == 1:
        return M[0][0]
    total = P1([0.0])
    for j in range(len(M)):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def _sylvester_resultant(cp: list, cr: list) -> P1:
    m, n = len(cp) - 1, len(cr) - 1
    size = m + n
    zero = P1([0.0])
    rows = []
    for i in range(n):
        row = [zero] * size
        for k, c in enumerate(reversed(cp)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k, c in enumerate(reversed(cr)):
            row[i + k] = c
        rows.append(row)
    return _det(rows)


def _newton(rels, x, steps: int = 8):
    """Gauss-Newton polish of a common zero of the relations."""
    for _ in range(steps):
        F = np.array([p(x) for p in rels])
        J = np.array([[sum(c * a[i] * np.prod(x ** (np.array(a) - np.eye(2, dtype=int)[i]))
                            for a, c in p.coeffs.items() if a[i] > 0) for i in range(2)] for p in rels])
        step, *_ = np.linalg.lstsq(J, -F, rcond=None)
        if not np.all(np.isfinite(step)):
            break
        x = x + step
        if np.linalg.norm(step) <= 1e-15 * (1.0 + np.linalg.norm(x)):
            break
    return x


def _pair_points(p: Polynomial, r: Polynomial, R: np.ndarray):
    """Real common zeros of two conics, or None when they share a component."""
    pr, rr = _rotate(p, R), _rotate(r, R)
    cp, cr = _in_second(pr), _in_second(rr)
    if len(cp) == 1 or len(cr) == 1:
        return None
    res = _sylvester_resultant(cp, cr)
    coef = res.coef
    if np.abs(coef).max(initial=0.0) <= 1e-12 * (_poly_scale(pr) * _poly_scale(rr)) ** 2:
        return None
    res = P1(np.trim_zeros(np.where(np.abs(coef) <= 1e-14 * np.abs(coef).max(), 0.0, coef), "b"))
    pts = []
    for z1 in res.roots():
        if abs(z1.imag) > 1e-7 * (1.0 + abs(z1.real)):
            continue
        z1 = z1.real
        for coefs in (cp, cr):
            qz = P1([c(z1) for c in coefs])
            if np.abs(qz.coef).max() <= 1e-12 * (1 + abs(z1)) ** 2:
                continue
            for z2 in qz.roots():
                if abs(z2.imag) > 1e-7 * (1.0 + abs(z2.real)):
                    continue
                pts.append(R @ np.array([z1, z2.real]))
            break
    return pts


def variety_of(rels: list, seed: int = 7) -> Variety:
    """Real common zeros of bivariate relations of degree <= 2."""
    if not rels:
        return Variety("Infinite")
    if len(rels) == 1:
        return _single_conic(rels[0])
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.3, 1.2)
    R = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    cands = None
    for i in range(len(rels)):
        for j in range(i + 1, len(rels)):
            pts = _pair_points(rels[i], rels[j], R)
            if pts is not None:
                cands = pts
                break
        if cands is not None:
            break
    if cands is None:
        return Variety("Infinite")
    found: list = []
    for x in cands:
        x = _newton(rels, x)
        if not _on_all(rels, x):
            continue
        if all(np.linalg.norm(x - z) > 1e-8 * (1.0 + np.linalg.norm(x)) for z in found):
            found.append(x)
    if not found:
        return Variety("Empty")
    return Variety("Finite", np.array(found))


def variety_count(M: MomentMatrix, cfg: ToleranceConfig = DEFAULT_TOL) -> Variety:
    """Real variety of the column relations of a bivariate M2(y)."""
    if len(M.labels[0]) != 2 or M.d != 2:
        raise DimensionError("variety_count expects a bivariate M2")
    return variety_of(column_relations(M, cfg))


# -- flat extensions ----------------------------------------------------------------


@dataclass(frozen=True)
class FlatExtension:
    """Moments of degree 2d+2 whose M_{d+1} has the same rank as M_d."""

    moments: MomentSequence
    d: int
    rank: int

    @property
    def base(self) -> MomentMatrix:
        return moment_matrix(self.moments.truncate(2 * self.d))

    @property
    def extended(self) -> MomentMatrix:
        return moment_matrix(self.moments)


def _pick_basis(A: np.ndarray, r: int, rel: float = 1e-8) -> list:
    """First r labels (in order) whose columns are independent, by Schur pivots."""
    chosen: list = []
    for i in range(A.shape[0]):
        trial = chosen + [i]
        S = A[np.ix_(trial, trial)]
        if chosen:
            piv = S[-1, -1] - S[-1, :-1] @ np.linalg.solve(S[:-1, :-1], S[:-1, -1])
        else:
            piv = S[0, 0]
        if piv > rel * max(A[i, i], 1e-300):
            chosen.append(i)
            if len(chosen) == r:
                break
    return chosen


def extract_atoms(flat: FlatExtension, cfg: ToleranceConfig = DEFAULT_TOL, seed: int = 0) -> AtomicMeasure:
    """Rank-many atoms from a flat extension via joint eigenvalues of the
    (symmetrized) multiplication operators."""
    y, d, r = flat.moments, flat.d, flat.rank
    n = y.n
    base = flat.base
    A = base.entries
    labels = base.labels
    chosen = _pick_basis(A, r)
    if len(chosen) < r:
        raise ExtractionError("could not find independent basis columns")
    B = [labels[i] for i in chosen]
    L = np.linalg.cholesky(A[np.ix_(chosen, chosen)])
    Linv = np.linalg.inv(L)
    ops = []
    for j in range(n):
        shifted = [add_index(b, unit_index(n, j)) for b in B]
        S = Linv @ moment_block(y, B, shifted) @ Linv.T
        ops.append(0.5 * (S + S.T))
    rng = np.random.default_rng(seed)
    c = rng.normal(size=n)
    _, O = sym_eigen(sum(ci * S for ci, S in zip(c, ops)))
    coords = np.empty((r, n))
    for j, S in enumerate(ops):
        D = O.T @ S @ O
        off = D - np.diag(np.diag(D))
        if np.abs(off).max(initial=0.0) > 1e-6 * (1.0 + np.abs(D).max()):
            raise ExtractionError("multiplication operators do not commute")
        coords[:, j] = np.diag(D)
    # L O = V_B diag(sqrt(w)); the row of the constant monomial carries sqrt(w)
    if B[0] != (0,) * n:
        raise ExtractionError("constant monomial is not among the basis columns")
    w = (L @ O)[0] ** 2
    mu = AtomicMeasure(coords, w, cfg.atom_merge_tol)
    if not verify_measure(y.truncate(2 * d), mu, cfg).passed:
        raise ExtractionError("extracted measure does not reproduce the moments")
    return mu


_DEG3 = [(3, 0), (2, 1), (1, 2), (0, 3)]
_DEG5 = [(5, 0), (4, 1), (3, 2), (2, 3), (1, 4), (0, 5)]
_HANKEL = [((0, 2), (1, 1)), ((0, 3), (1, 2)), ((1, 3), (2, 2))]


def _extension_moments(y: MomentSequence, y5: dict, C: np.ndarray) -> MomentSequence:
    data = y.as_dict()
    data.update(y5)
    data[(6, 0)], data[(5, 1)] = C[0, 0], C[0, 1]
    data[(4, 2)] = 0.5 * (C[0, 2] + C[1, 1])
    data[(3, 3)] = 0.5 * (C[0, 3] + C[1, 2])
    data[(2, 4)] = 0.5 * (C[1, 3] + C[2, 2])
    data[(1, 5)], data[(0, 6)] = C[2, 3], C[3, 3]
    return MomentSequence.from_dict(2, 6, data)


def flat_search(y: MomentSequence, cfg: ToleranceConfig = DEFAULT_TOL, seed: int = 0, starts: int = 16,
                pinned: dict | None = None, all_solutions: bool = False):
    """Heuristic search for a flat extension M3 of a bivariate M2(y).

    The degree-5 moments are the unknowns; with B = [y_{a+b}] (|a| <= 2,
    |b| = 3) the degree-6 block is forced to C = B^T M2^+ B, and the search
    drives to zero the mismatches that would stop C from being a moment
    block (plus the part of B outside the range of M2).  Each candidate is
    accepted only if the assembled M3 is PSD with rank equal to rank M2.
    Candidates are ranked by the condition number of the rank part of M3;
    returns the best FlatExtension (or all distinct ones), or None.
    """
    if y.n != 2 or y.k != 4:
        raise DimensionError("flat_search expects bivariate degree-4 moments")
    pinned = {tuple(a): float(v) for a, v in (pinned or {}).items()}
    free = [a for a in _DEG5 if a not in pinned]
    M2 = moment_matrix(y).entries
    w, V = sym_eigen(M2)
    rtol = cfg.rank_threshold(w)
    keep = w > rtol
    r = int(keep.sum())
    Mp = (V[:, keep] / w[keep]) @ V[:, keep].T
    Pperp = np.eye(6) - V[:, keep] @ V[:, keep].T
    rows = monomial_basis(2, 2)
    y00 = max(y.values[0], 1e-300)
    rho = max(max(abs(y[a]) for a in [(4, 0), (3, 1), (2, 2), (1, 3), (0, 4)]) / y00, 1e-12) ** 0.25
    s5, s6 = y00 * rho ** 5, y00 * rho ** 6

    # B = B0 + s5 * sum_k z_k E_k is affine in the free degree-5 moments
    B0 = np.zeros((6, 4))
    E = np.zeros((len(free), 6, 4))
    for i, a in enumerate(rows):
        for j, b in enumerate(_DEG3):
            ab = add_index(a, b)
            if sum(ab) < 5:
                B0[i, j] = y[ab]
            elif ab in pinned:
                B0[i, j] = pinned[ab]
            else:
                E[free.index(ab), i, j] = s5

    def assemble(z):
        y5 = dict(pinned)
        y5.update({a: s5 * v for a, v in zip(free, z)})
        return y5, B0 + np.tensordot(z, E, axes=1)

    hi, hj = zip(*_HANKEL)

    def residual(z):
        B = B0 + np.tensordot(z, E, axes=1)
        C = B.T @ Mp @ B
        res = (C[tuple(np.array(hi).T)] - C[tuple(np.array(hj).T)]) / s6
        if r < 6:
            res = np.concatenate([res, (Pperp @ B).ravel() / s5])
        return res

    def jacobian(z):
        B = B0 + np.tensordot(z, E, axes=1)
        G = np.einsum("kia,ij,jb->kab", E, Mp, B)
        dC = G + G.transpose(0, 2, 1)
        cols = (dC[:, np.array(hi)[:, 0], np.array(hi)[:, 1]] - dC[:, np.array(hj)[:, 0], np.array(hj)[:, 1]]) / s6
        J = cols.T
        if r < 6:
            J = np.vstack([J, np.einsum("ij,kjb->ibk", Pperp, E).reshape(24, len(free)) / s5])
        return J

    rng = np.random.default_rng(seed)
    found: list = []
    for k in range(starts):
        # spread the starting magnitudes: flat extensions of nearly singular
        # data sit far out in degree-5 space
        z0 = np.zeros(len(free)) if k == 0 else rng.normal(size=len(free)) * 10.0 ** rng.uniform(-1.0, 3.0)
        if free:
            z0 = least_squares(residual, z0, jac=jacobian, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                               max_nfev=400).x
        if np.linalg.norm(residual(z0)) > 1e-9:
            continue
        y5, B = assemble(z0)
        ext = _extension_moments(y, y5, B.T @ Mp @ B)
        ev, _ = sym_eigen(moment_matrix(ext).entries)
        smallest = ev[r:]
        if ev[-1] < -cfg.psd_threshold(ev) or np.abs(smallest).sum() > smallest.size * cfg.rank_threshold(ev):
            continue
        if all(np.abs(ext.values - g.values).max() > 1e-6 * s5 for g, _ in found):
            found.append((ext, ev[0] / ev[r - 1]))
    found.sort(key=lambda item: item[1])
    flats = [FlatExtension(ext, 2, r) for ext, _ in found]
    if all_solutions:
        return flats
    return flats[0] if flats else None


def _measure_from_flats(flats, cfg, seed):
    for flat in flats:
        try:
            return extract_atoms(flat, cfg, seed)
        except ExtractionError:
            continue
    return None


# -- decision procedures -------------------------------------------------------------


def decide_univariate(y: MomentSequence, cfg: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """One-variable even-degree data: a measure exists iff M_d(y) is PSD and
    recursively generated."""
    if y.n != 1 or y.k % 2:
        raise DimensionError("decide_univariate expects one variable and even degree")
    d = y.k // 2
    M = moment_matrix(y)
    rep = psd_status(M.entries, cfg)
    diag = {"rank": rep.rank, "psd": str(rep.status)}
    if not rep.is_psd:
        return Verdict(Status.NO_MEASURE, certificate=[f"M_{d}(y) has eigenvalue {rep.min_eig:.6g} < 0"], diagnostics=diag)
    if rep.status is Definiteness.POSITIVE_DEFINITE:
        b = np.array([y[(d + 1 + i,)] if d + 1 + i <= 2 * d else 0.0 for i in range(d + 1)])
        top = b @ np.linalg.solve(M.entries, b)
        ext = MomentSequence(1, 2 * d + 2, np.concatenate([y.values, [0.0, top]]))
        flat = FlatExtension(ext, d, d + 1)
        cert = [f"M_{d}(y) positive definite: a flat extension exists"]
    else:
        rc = recursive_check(M, cfg)
        diag["recursive"] = rc.passed
        if not rc.passed:
            p, q = rc.violation
            return Verdict(Status.NO_MEASURE, certificate=[f"column relation {p} = 0 but ({p})*{q} is not a relation"],
                           approximable=True, diagnostics=diag)
        if rep.rank == 0:
            return Verdict(Status.NO_MEASURE, certificate=["zero data"], diagnostics=diag)
        flat = FlatExtension(y, d - 1, rep.rank)
        cert = [f"M_{d}(y) PSD, recursively generated, rank {rep.rank}: flat over M_{d - 1}(y)"]
    try:
        mu = extract_atoms(flat, cfg)
    except ExtractionError as exc:
        return Verdict(Status.EXISTS_NONCONSTRUCTIVE, certificate=cert + [f"extraction failed: {exc}"], diagnostics=diag)
    return Verdict(Status.MEASURE_CONSTRUCTED, mu, cert, diagnostics=diag)


def _fit_on_points(y: MomentSequence, pts: np.ndarray, cfg: ToleranceConfig):
    V = np.array([[np.prod(u ** np.array(a)) for u in pts] for a in y.basis])
    w, _ = nnls(V, y.values)
    keep = w > 0
    if not keep.any():
        return None
    mu = AtomicMeasure(pts[keep], w[keep], cfg.atom_merge_tol)
    return mu if verify_measure(y, mu, cfg).passed else None


def decide_quartic(y: MomentSequence, cfg: ToleranceConfig = DEFAULT_TOL, seed: int = 0) -> Verdict:
    """Bivariate degree-4 data."""
    if y.n != 2 or y.k != 4:
        raise DimensionError("decide_quartic expects bivariate degree-4 moments")
    M = moment_matrix(y)
    rep = psd_status(M.entries, cfg)
    diag = {"rank": rep.rank, "psd": str(rep.status)}
    if not rep.is_psd:
        return Verdict(Status.NO_MEASURE, certificate=[f"M2(y) has eigenvalue {rep.min_eig:.6g} < 0"], diagnostics=diag)
    if rep.status is Definiteness.POSITIVE_DEFINITE:
        cert = ["M2(y) positive definite: L_y is strictly positive, so a measure exists"]
        flats = flat_search(y, cfg, seed, all_solutions=True)
        diag["flat_extensions"] = len(flats)
        mu = _measure_from_flats(flats, cfg, seed)
        if mu is not None:
            return Verdict(Status.MEASURE_CONSTRUCTED, mu, cert + ["flat extension found by search"],
                           approximable=True, diagnostics=diag)
        return Verdict(Status.EXISTS_NONCONSTRUCTIVE, certificate=cert + ["no flat extension found (heuristic)"],
                       approximable=True, diagnostics=diag)
    rc = recursive_check(M, cfg)
    var = variety_count(M, cfg)
    diag.update(recursive=rc.passed, variety=var.kind, card=var.card)
    cert = [f"M2(y) PSD singular, rank {rep.rank}"]
    if not rc.passed:
        p, q = rc.violation
        cert.append(f"not recursively generated: ({p})*{q} is not a column relation")
        return Verdict(Status.NO_MEASURE, certificate=cert, approximable=True, diagnostics=diag)
    cert.append("recursively generated")
    if var.card < rep.rank:
        cert.append(f"rank {rep.rank} > card V = {int(var.card)}")
        return Verdict(Status.NO_MEASURE, certificate=cert, approximable=True, diagnostics=diag)
    cert.append(f"rank {rep.rank} <= card V = {var.card if var.kind == 'Infinite' else int(var.card)}: a measure exists")
    mu = _measure_from_flats(flat_search(y, cfg, seed, all_solutions=True), cfg, seed)
    if mu is not None:
        return Verdict(Status.MEASURE_CONSTRUCTED, mu, cert + ["flat extension found"], diagnostics=diag)
    if var.kind == "Finite":
        mu = _fit_on_points(y, var.points, cfg)
        if mu is not None:
            return Verdict(Status.MEASURE_CONSTRUCTED, mu, cert + ["weights fitted on the variety"], diagnostics=diag)
    return Verdict(Status.EXISTS_NONCONSTRUCTIVE, certificate=cert, diagnostics=diag)


def cubic_solve(y: MomentSequence, cfg: ToleranceConfig = DEFAULT_TOL, seed: int = 0, margin: float = 1.0) -> Verdict:
    """Bivariate degree-3 data, split on the rank of M1(y)."""
    if y.n != 2 or y.k != 3:
        raise DimensionError("cubic_solve expects bivariate degree-3 moments")
    lin, quad = monomial_basis(2, 1), monomial_basis(2, 2)[3:]
    M1 = moment_block(y, lin, lin)
    B = moment_block(y, lin, quad)
    rep = psd_status(M1, cfg)
    diag = {"rank": rep.rank, "psd": str(rep.status)}
    if not rep.is_psd or rep.rank == 0:
        return Verdict(Status.NO_MEASURE, certificate=["M1(y) is not PSD and nonzero"], diagnostics=diag)
    y00 = y.values[0]
    if rep.status is Definiteness.POSITIVE_DEFINITE:
        S = B.T @ np.linalg.solve(M1, B)
        m = margin * y00
        y40, y31, y13 = S[0, 0] + m, S[0, 1], S[1, 2]
        y22 = S[1, 1] + m
        off = y22 - S[0, 2]
        y04 = S[2, 2] + off ** 2 / (y40 - S[0, 0]) + m
        data = y.as_dict()
        data.update({(4, 0): y40, (3, 1): y31, (2, 2): y22, (1, 3): y13, (0, 4): y04})
        y4 = MomentSequence.from_dict(2, 4, data)
        v = decide_quartic(y4, cfg, seed)
        cert = ["M1(y) positive definite: degree-4 block chosen above its Schur floor, M2 positive definite"]
        if v.measure is not None and verify_measure(y, v.measure, cfg).passed:
            return Verdict(Status.MEASURE_CONSTRUCTED, v.measure, cert + v.certificate[1:], diagnostics=diag)
        return Verdict(Status.EXISTS_NONCONSTRUCTIVE, certificate=cert, diagnostics=diag)
    w, V = sym_eigen(M1)
    keep = w > cfg.rank_threshold(w)
    Pperp = np.eye(3) - V[:, keep] @ V[:, keep].T
    tol = cfg.moment_threshold(y.values)
    if np.abs(Pperp @ B).max() > tol:
        return Verdict(Status.NO_MEASURE, certificate=["range of B(2) not inside range of M1(y)"], diagnostics=diag)
    cert = [f"M1(y) rank {rep.rank}", "range of B(2) inside range of M1(y)"]
    if rep.rank == 2:
        full = np.hstack([M1, B])
        for row in kernel_basis(M1, cfg).relations:
            p = Polynomial(2, dict(zip(lin, row)))
            for j in range(2):
                h = (p * Polynomial.monomial(unit_index(2, j))).to_vector(2)
                if _relation_residual(full, h) > tol:
                    return Verdict(Status.NO_MEASURE, certificate=cert + [f"relation {p} not propagated"], diagnostics=diag)
        cert.append("relations propagate")
    Mp = (V[:, keep] / w[keep]) @ V[:, keep].T
    C = B.T @ Mp @ B
    if abs(C[0, 2] - C[1, 1]) > tol:
        return Verdict(Status.NO_MEASURE, certificate=cert + ["degree-4 block of the flat extension is inconsistent"],
                       diagnostics=diag)
    data = y.as_dict()
    data.update({(4, 0): C[0, 0], (3, 1): C[0, 1], (2, 2): 0.5 * (C[0, 2] + C[1, 1]), (1, 3): C[1, 2], (0, 4): C[2, 2]})
    flat = FlatExtension(MomentSequence.from_dict(2, 4, data), 1, rep.rank)
    try:
        mu = extract_atoms(flat, cfg, seed)
    except ExtractionError as exc:
        return Verdict(Status.EXISTS_NONCONSTRUCTIVE, certificate=cert + [str(exc)], diagnostics=diag)
    if not verify_measure(y, mu, cfg).passed:
        return Verdict(Status.EXISTS_NONCONSTRUCTIVE, certificate=cert + ["atoms miss the cubic moments"], diagnostics=diag)
    return Verdict(Status.MEASURE_CONSTRUCTED, mu, cert + ["flat extension M2 built from W = M1^+ B(2)"], diagnostics=diag)


# -- approximation ---------------------------------------------------------------

_QUARTIC = monomial_basis(2, 4)[10:]          # x1^4, x1^3x2, ..., x2^4


def directions_at_infinity(r, cfg: ToleranceConfig = DEFAULT_TOL):
    """Write a binary quartic moment vector r_alpha (|alpha| = 4) as
    sum_j c_j w_j^alpha with c_j > 0 and max|w_j| = 1.  None when impossible.
    """
    r = np.asarray(r, dtype=float)
    if np.abs(r).max() <= cfg.moment_threshold(r) * 1e-4:
        return []
    for flip in (False, True):
        seq = r[::-1] if flip else r
        v = decide_univariate(MomentSequence(1, 4, seq), cfg)
        if v.status is not Status.MEASURE_CONSTRUCTED:
            continue
        out = []
        for t, c in zip(v.measure.atoms[:, 0], v.measure.weights):
            w = np.array([t, 1.0]) if flip else np.array([1.0, t])
            nw = np.abs(w).max()
            out.append((c * nw ** 4, w / nw))
        got = sum(c * np.array([np.prod(w ** np.array(a)) for a in _QUARTIC]) for c, w in out)
        if np.abs(got - r).max() <= cfg.moment_threshold(r):
            return out
    return None


# nine-point grid: no conic passes through all of it, so its M2 is definite
_GRID9 = np.array([(i, j) for i in (-1.0, 0.0, 1.0) for j in (-1.0, 0.0, 1.0)])


def quartic_approx(y: MomentSequence, eps: float, cfg: ToleranceConfig = DEFAULT_TOL, seed: int = 0) -> ApproxStep:
    """Measure-bearing data within O(eps^(1/4)) of bivariate quartic data y.

    First attempt: a measure mu for the cubic part plus point masses running
    off to infinity, eps * c_j at eps^(-1/4) w_j, which carry the leftover
    degree-4 moments r = y_4 - mu_4 in the limit; mu is shrunk by the mass
    they take.  Otherwise y is mixed with a definite grid measure, which
    makes M2 positive definite, and a flat extension is searched for.
    """
    if y.n != 2 or y.k != 4:
        raise DimensionError("quartic_approx expects bivariate degree-4 moments")
    if not eps > 0:
        raise ValueError("eps must be positive")
    rep = psd_status(moment_matrix(y).entries, cfg)
    if not rep.is_psd:
        raise NoMeasureError("M2(y) is not positive semidefinite: y is not approximable")
    m0 = y[(0, 0)]
    cub = cubic_solve(y.truncate(3), cfg, seed)
    if cub.measure is not None:
        mu = cub.measure
        r = np.array([y[a] for a in _QUARTIC]) - np.array([moments_of_measure(mu, 4)[a] for a in _QUARTIC])
        dirs = directions_at_infinity(r, cfg)
        if dirs is not None:
            mass = sum(c for c, _ in dirs)
            if eps * mass < m0:
                atoms = list(mu.atoms) + [eps ** -0.25 * w for _, w in dirs]
                weights = list(mu.weights * (1.0 - eps * mass / m0)) + [eps * c for c, _ in dirs]
                wit = AtomicMeasure(np.array(atoms), np.array(weights), cfg.atom_merge_tol)
                return _step(y, wit, eps, len(dirs))
    grid = AtomicMeasure(_GRID9, np.full(9, m0 / 9.0))
    z = moments_of_measure(grid, 4)
    ye = MomentSequence(2, 4, (1.0 - eps) * y.values + eps * z.values)
    mu = _measure_from_flats(flat_search(ye, cfg, seed, all_solutions=True), cfg, seed)
    if mu is None:
        raise ApproximationError("mixed data is positive definite (a measure exists) but no flat extension was found")
    return _step(y, mu, eps, 0, perturbed=ye)


def _step(y, wit, eps, escaped, perturbed=None) -> ApproxStep:
    pert = moments_of_measure(wit, y.k) if perturbed is None else perturbed
    dev = float(np.abs(pert.values - y.values).max())
    return ApproxStep(eps, pert, wit, dev, dev / eps ** 0.25, escaped)
