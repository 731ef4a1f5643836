"""Degree-2 moment problems on the zero set or superlevel set of a quadratic.

A quadratic q(x) = q0 + 2 q1.x + x^T Q2 x is carried as its bordered
(n+1)x(n+1) matrix Q = [[q0, q1^T], [q1, Q2]], so q(x) = [1;x]^T Q [1;x] and
L_y(q) = Q . M1(y).  Measures are produced by splitting M1(y) into rank-one
terms u u^T with equal Q-values; a term u = (tau, w) with tau != 0 is the
point mass tau^2 at w / tau.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_TOL, AtomicMeasure, DimensionError, MomentError, MomentSequence, NoMeasureError, Polynomial,
    PreconditionError, Status, ToleranceConfig, Verdict, moment_matrix, moments_of_measure, riesz, unit_index,
    verify_measure,
)
from .sturm_zhang import sz_decompose
from .symlin import Definiteness, PencilResult, pencil_feasible, psd_status, sym_eigen


class Mode(str, enum.Enum):
    EQUALITY = "equality"      # support in {q = 0}
    INEQUALITY = "inequality"  # support in {q >= 0}

    def __str__(self) -> str:
        return self.value


class ApproximationError(MomentError):
    """No approximating sequence could be built by the escape-to-infinity construction."""


@dataclass(frozen=True)
class QuadraticConstraint:
    q0: float
    q1: np.ndarray
    Q2: np.ndarray

    def __post_init__(self):
        q1 = np.asarray(self.q1, dtype=float).reshape(-1)
        Q2 = np.asarray(self.Q2, dtype=float).reshape(q1.size, q1.size)
        object.__setattr__(self, "q0", float(self.q0))
        object.__setattr__(self, "q1", q1)
        object.__setattr__(self, "Q2", 0.5 * (Q2 + Q2.T))

    @property
    def n(self) -> int:
        return self.q1.size

    @property
    def matrix(self) -> np.ndarray:
        n = self.n
        Q = np.empty((n + 1, n + 1))
        Q[0, 0] = self.q0
        Q[0, 1:] = Q[1:, 0] = self.q1
        Q[1:, 1:] = self.Q2
        return Q

    @classmethod
    def from_matrix(cls, Q) -> "QuadraticConstraint":
        Q = np.asarray(Q, dtype=float)
        return cls(Q[0, 0], Q[1:, 0], Q[1:, 1:])

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(self.q0 + 2.0 * self.q1 @ x + x @ self.Q2 @ x)

    def __neg__(self) -> "QuadraticConstraint":
        return QuadraticConstraint(-self.q0, -self.q1, -self.Q2)

    def shifted(self, a) -> "QuadraticConstraint":
        """The quadratic x -> q(x + a)."""
        a = np.asarray(a, dtype=float)
        return QuadraticConstraint(self(a), self.q1 + self.Q2 @ a, self.Q2)

    def to_polynomial(self) -> Polynomial:
        n = self.n
        coeffs = {(0,) * n: self.q0}
        for i in range(n):
            coeffs[unit_index(n, i)] = 2.0 * self.q1[i]
            for j in range(i, n):
                a = tuple(int(k == i) + int(k == j) for k in range(n))
                coeffs[a] = self.Q2[i, i] if i == j else 2.0 * self.Q2[i, j]
        return Polynomial(n, coeffs)

    def scale(self) -> float:
        return 1.0 + float(np.abs(self.matrix).max())


def split_quadratic(p: Polynomial) -> QuadraticConstraint:
    """Coefficients (q0, q1, Q2) with p(x) = q0 + 2 q1.x + x^T Q2 x."""
    if p.degree > 2:
        raise DimensionError(f"polynomial has degree {p.degree} > 2")
    n = p.n
    q1 = np.zeros(n)
    Q2 = np.zeros((n, n))
    q0 = 0.0
    for a, c in p.coeffs.items():
        nz = [i for i, e in enumerate(a) if e]
        if not nz:
            q0 = c
        elif sum(a) == 1:
            q1[nz[0]] = c / 2.0
        elif len(nz) == 1:
            Q2[nz[0], nz[0]] = c
        else:
            Q2[nz[0], nz[1]] = Q2[nz[1], nz[0]] = c / 2.0
    return QuadraticConstraint(q0, q1, Q2)


def as_constraint(q) -> QuadraticConstraint:
    if isinstance(q, QuadraticConstraint):
        return q
    if isinstance(q, Polynomial):
        return split_quadratic(q)
    return QuadraticConstraint.from_matrix(q)


def homogenize(q, shift=None) -> np.ndarray:
    """Matrix H of the form (x0, x) -> x0^2 q(x / x0 + shift).

    Without a shift this is just the bordered matrix, so H(1, x) = q(x).
    """
    q = as_constraint(q)
    if shift is not None:
        q = q.shifted(shift)
    return q.matrix


def _m1(y: MomentSequence) -> np.ndarray:
    if y.k != 2:
        raise DimensionError(f"expected degree-2 moments, got k={y.k}")
    return moment_matrix(y).entries


# -- unconstrained and degree-one problems ---------------------------------------


def solve_unconstrained(y: MomentSequence, cfg: ToleranceConfig = DEFAULT_TOL) -> AtomicMeasure:
    """A measure on R^n with rank M1(y) atoms, for PSD M1(y)."""
    M = _m1(y)
    if not psd_status(M, cfg).is_psd:
        raise NoMeasureError("M1(y) is not positive semidefinite")
    y0 = y.values[0]
    if y0 <= cfg.moment_threshold(y.values):
        raise PreconditionError("y_0 must be positive")
    n = y.n
    sigma = sum(y[tuple(2 * e for e in unit_index(n, i))] for i in range(n))
    if sigma <= cfg.moment_threshold(y.values):
        return AtomicMeasure(np.zeros((1, n)), [y0])
    alpha = y0 / sigma
    Q = np.diag([1.0] + [-alpha] * n)
    dec = sz_decompose(M, Q, cfg)
    tau = dec.vectors[0]
    return AtomicMeasure((dec.vectors[1:] / tau).T, tau ** 2)


def naive_unconstrained(y: MomentSequence, cfg: ToleranceConfig = DEFAULT_TOL) -> tuple[AtomicMeasure, bool]:
    """The 2(r-1)-atom measure v1 +- sqrt(r-1) v_i, equal weights.

    Returns the measure and a flag that is True when rank M1 = 1, in which
    case the measure is the single atom v1.
    """
    M = _m1(y)
    if not psd_status(M, cfg).is_psd:
        raise NoMeasureError("M1(y) is not positive semidefinite")
    y0 = y.values[0]
    if y0 <= cfg.moment_threshold(y.values):
        raise PreconditionError("y_0 must be positive")
    Mn = M / y0
    v1 = Mn[0, 1:]
    S = Mn[1:, 1:] - np.outer(v1, v1)
    w, V = sym_eigen(S)
    keep = w > cfg.rank_threshold(np.concatenate([[1.0], w]))
    m = int(keep.sum())
    if m == 0:
        return AtomicMeasure(v1[None, :], [y0]), True
    vs = (V[:, keep] * np.sqrt(w[keep])).T
    c = np.sqrt(m)
    atoms = np.vstack([v1 + c * vs, v1 - c * vs])
    return AtomicMeasure(atoms, np.full(2 * m, y0 / (2 * m))), False


def solve_degree1(y: MomentSequence) -> AtomicMeasure:
    """Degree-one data: a measure exists iff y_0 > 0, namely y_0 at y_e / y_0."""
    if y.k != 1:
        raise DimensionError(f"expected degree-1 moments, got k={y.k}")
    y0 = y.values[0]
    if y0 <= 0:
        raise NoMeasureError("y_0 must be positive")
    return AtomicMeasure((y.values[1:] / y0)[None, :], [y0])


# -- witnesses ------------------------------------------------------------------


def _pinv_stationary(q: QuadraticConstraint, tol: float):
    """Stationary point -Q2^+ q1 if q1 lies in the range of Q2, else the kernel part of q1."""
    w, V = sym_eigen(q.Q2) if q.n else (np.zeros(0), np.zeros((0, 0)))
    big = np.abs(w) > tol
    kern = V[:, ~big]
    k = kern @ (kern.T @ q.q1)
    if np.linalg.norm(k) > tol * (1.0 + np.linalg.norm(q.q1)):
        return None, k
    coef = (V[:, big].T @ q.q1) / w[big]
    return -V[:, big] @ coef, None


def _positive_point(q: QuadraticConstraint, tol: float):
    n = q.n
    vtol = tol * q.scale()
    if q.q0 > vtol:
        return np.zeros(n)
    w, V = sym_eigen(q.Q2)
    if w[0] > tol * q.scale():
        v = V[:, 0]
        lam, b = w[0], q.q1 @ v
        root = (-b + np.sqrt(max(b * b - lam * q.q0, 0.0))) / lam
        for alpha in (root + 1.0, 2.0 * abs(root) + 1.0):
            if q(alpha * v) > vtol:
                return alpha * v
    xs, k = _pinv_stationary(q, tol * q.scale())
    if k is not None:
        alpha = (1.0 + abs(q.q0)) / (2.0 * (q.q1 @ k))
        for _ in range(60):
            if q(alpha * k) > vtol:
                return alpha * k
            alpha *= 2.0
        return None
    if q(xs) > vtol:
        return xs
    return None


def witness_search(q, target: str, tol: float = 1e-12):
    """A point with q > 0 (``'positive'``), q < 0 (``'negative'``) or q = 0
    (``'zero'``), or None when no such point exists."""
    q = as_constraint(q)
    if target == "positive":
        return _positive_point(q, tol)
    if target == "negative":
        return _positive_point(-q, tol)
    if target != "zero":
        raise ValueError("target must be 'positive', 'negative' or 'zero'")
    xp, xn = _positive_point(q, tol), _positive_point(-q, tol)
    if xp is None and xn is None:
        return np.zeros(q.n)
    if xp is not None and xn is not None:
        d = xp - xn
        a = d @ q.Q2 @ d
        b = (q.q1 + q.Q2 @ xn) @ d
        c = q(xn)
        if abs(a) <= 1e-14 * (abs(b) + abs(c)):
            t = -c / (2.0 * b)
        else:
            disc = np.sqrt(max(b * b - a * c, 0.0))
            roots = [(-b + disc) / a, (-b - disc) / a]
            t = min(roots, key=lambda r: abs(r - np.clip(r, 0.0, 1.0)))
        lo, hi = 0.0, 1.0
        x = xn + np.clip(t, 0.0, 1.0) * d
        # polish by bisection if rounding left us off the zero set
        for _ in range(200):
            if abs(q(x)) <= tol * q.scale() * (1.0 + x @ x):
                break
            mid = 0.5 * (lo + hi)
            if q(xn + mid * d) < 0:
                lo = mid
            else:
                hi = mid
            x = xn + 0.5 * (lo + hi) * d
        return x
    # q has one sign: a zero exists only at the optimum
    xs, k = _pinv_stationary(q, tol * q.scale())
    if xs is not None and abs(q(xs)) <= 1e3 * tol * q.scale() * (1.0 + xs @ xs):
        return xs
    return None


# -- compact and general K-moment problems ------------------------------------


def _set_tol(q: QuadraticConstraint, x) -> float:
    return 1e-7 * q.scale() * (1.0 + float(np.dot(x, x)))


def _in_set(q: QuadraticConstraint, x, mode: Mode) -> bool:
    v = q(x)
    tol = _set_tol(q, x)
    return abs(v) <= tol if mode is Mode.EQUALITY else v >= -tol


def _riesz_tol(y: MomentSequence, q: QuadraticConstraint, cfg: ToleranceConfig) -> float:
    return cfg.moment_threshold(y.values) * max(1.0, float(np.abs(q.matrix).max()))


def _check_riesz(L: float, ltol: float, mode: Mode) -> str | None:
    if mode is Mode.EQUALITY and abs(L) > ltol:
        return f"L_y(q) = {L:.6g} is nonzero, but every measure on {{q = 0}} gives 0"
    if mode is Mode.INEQUALITY and L < -ltol:
        return f"L_y(q) = {L:.6g} is negative, but every measure on {{q >= 0}} gives a nonnegative value"
    return None


def _split_terms(vectors: np.ndarray):
    tau = vectors[0]
    norms = np.linalg.norm(vectors, axis=0)
    degenerate = np.abs(tau) <= 1e-6 * norms
    return tau, degenerate


def solve_compact_k(y: MomentSequence, q, mode: Mode = Mode.EQUALITY,
                    cfg: ToleranceConfig = DEFAULT_TOL) -> AtomicMeasure:
    """Measure for degree-2 data on {q = 0} or {q >= 0} when Q2 is negative definite."""
    q = as_constraint(q)
    mode = Mode(mode)
    M = _m1(y)
    if q.n != y.n:
        raise DimensionError("constraint and moments have different dimensions")
    if psd_status(-q.Q2, cfg).status is not Definiteness.POSITIVE_DEFINITE:
        raise PreconditionError("Q2 is not negative definite; use decide_noncompact")
    center = -np.linalg.solve(q.Q2, q.q1)
    if q(center) < -1e-12 * q.scale():
        raise PreconditionError("the constraint set is empty")
    if not psd_status(M, cfg).is_psd:
        raise NoMeasureError("M1(y) is not positive semidefinite")
    L = riesz(y, q.to_polynomial())
    why = _check_riesz(L, _riesz_tol(y, q, cfg), mode)
    if why:
        raise NoMeasureError(why)
    dec = sz_decompose(M, q.matrix, cfg)
    tau, degenerate = _split_terms(dec.vectors)
    if degenerate.any():
        raise ArithmeticError("degenerate rank-one term despite negative definite Q2")
    return AtomicMeasure((dec.vectors[1:] / tau).T, tau ** 2)


def _measure_from_sz(y, q, mode, cfg, attempts: int = 8, seed: int = 0):
    """Try several starting factorizations; return a verified measure or None."""
    M = _m1(y)
    rng = np.random.default_rng(seed)
    base = None
    for attempt in range(attempts):
        if attempt == 0:
            dec = sz_decompose(M, q.matrix, cfg)
            base = dec.vectors.copy()
        else:
            r = base.shape[1]
            R, _ = np.linalg.qr(rng.normal(size=(r, r)))
            dec = sz_decompose(M, q.matrix, cfg, factor=base @ R)
        tau, degenerate = _split_terms(dec.vectors)
        if degenerate.any():
            continue
        try:
            mu = AtomicMeasure((dec.vectors[1:] / tau).T, tau ** 2, cfg.atom_merge_tol)
        except ValueError:
            continue
        if verify_measure(y, mu, cfg).passed and all(_in_set(q, a, mode) for a in mu.atoms):
            return mu
    return None


def decide_noncompact(y: MomentSequence, q, mode: Mode = Mode.EQUALITY,
                      cfg: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Classify degree-2 data on {q = 0} or {q >= 0} for an arbitrary quadratic q."""
    q = as_constraint(q)
    mode = Mode(mode)
    M = _m1(y)
    if q.n != y.n:
        raise DimensionError("constraint and moments have different dimensions")
    zero = witness_search(q, "zero")
    if mode is Mode.EQUALITY and zero is None:
        raise PreconditionError("the set {q = 0} is empty")
    if mode is Mode.INEQUALITY and zero is None and witness_search(q, "positive") is None:
        raise PreconditionError("the set {q >= 0} is empty")
    rep = psd_status(M, cfg)
    diag = {"rank": rep.rank, "psd": str(rep.status)}
    if not rep.is_psd:
        return Verdict(Status.NO_MEASURE, certificate=[f"M1(y) has eigenvalue {rep.min_eig:.6g} < 0"], diagnostics=diag)
    if y.values[0] <= cfg.moment_threshold(y.values):
        return Verdict(Status.NO_MEASURE, certificate=["y_0 = 0: only the zero measure fits"], diagnostics=diag)
    L = riesz(y, q.to_polynomial())
    diag["riesz_q"] = L
    why = _check_riesz(L, _riesz_tol(y, q, cfg), mode)
    if why:
        return Verdict(Status.NO_MEASURE, certificate=[why], diagnostics=diag)
    cert = [f"M1(y) is {rep.status} with rank {rep.rank}", f"L_y(q) = {L:.6g} has the sign every measure requires"]
    if mode is Mode.INEQUALITY and zero is None:
        mu = solve_unconstrained(y, cfg)
        cert.append("q > 0 everywhere, so the unconstrained construction applies")
        return Verdict(Status.MEASURE_CONSTRUCTED, mu, cert, diagnostics=diag)
    if psd_status(-q.Q2, cfg).status is Definiteness.POSITIVE_DEFINITE:
        mu = solve_compact_k(y, q, mode, cfg)
        cert.append("Q2 negative definite: every rank-one term carries a point of the set")
        return Verdict(Status.MEASURE_CONSTRUCTED, mu, cert, diagnostics=diag)
    mu = _measure_from_sz(y, q, mode, cfg)
    if mu is not None:
        cert.append("equal-value rank-one splitting with no term at infinity")
        return Verdict(Status.MEASURE_CONSTRUCTED, mu, cert, approximable=True, diagnostics=diag)
    if rep.status is Definiteness.POSITIVE_DEFINITE:
        cert.append("M1(y) positive definite with admissible L_y(q): a measure exists (existence only)")
        return Verdict(Status.EXISTS_NONCONSTRUCTIVE, None, cert, approximable=True, diagnostics=diag)
    cert.append("M1(y) singular: data lie in the closure of the measure-bearing sequences")
    return Verdict(Status.APPROXIMABLE_ONLY, None, cert, approximable=True, diagnostics=diag)


# -- approximation -------------------------------------------------------------


@dataclass(frozen=True)
class ApproxStep:
    eps: float
    perturbed: MomentSequence
    witness: AtomicMeasure
    deviation: float
    rate_constant: float  # deviation / eps^(1/4)
    escaped_terms: int


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    return v if v[i] >= 0 else -v


def escape_point(q: QuadraticConstraint, w: np.ndarray, rho: float, mode: Mode) -> np.ndarray:
    """A point of the set within o(rho) of +-rho w.

    Tries the ray itself (inequality mode), then moves off rho w along the
    gradient and along eigenvectors of Q2, solving the resulting scalar
    quadratic exactly and keeping the smallest move.
    """
    w = _canonical_sign(np.asarray(w, dtype=float))
    _, E = sym_eigen(q.Q2)
    best = None
    for sgn in (1.0, -1.0):
        p = sgn * rho * w
        qp = q(p)
        if mode is Mode.INEQUALITY and qp >= 0:
            cand = [(0.0, 0.0, p)]
        else:
            g = q.q1 + q.Q2 @ p
            dirs = [E[:, i] for i in range(q.n)]
            if np.linalg.norm(g) > 0:
                dirs.insert(0, g / np.linalg.norm(g))
            cand = []
            for v in dirs:
                v = _canonical_sign(v)
                a, b = v @ q.Q2 @ v, g @ v
                if abs(a) <= 1e-14 * (1.0 + abs(b)):
                    if b != 0:
                        cand.append((abs(qp / (2 * b)), 0.0, p - qp / (2 * b) * v))
                    continue
                disc = b * b - a * qp
                if disc < 0:
                    continue
                for sigma in ((-b + np.sqrt(disc)) / a, (-b - np.sqrt(disc)) / a):
                    cand.append((abs(sigma), -sigma, p + sigma * v))
        for size, pref, x in cand:
            key = (round(size / (1.0 + rho), 12), sgn < 0, pref)
            if best is None or key < best[0]:
                best = (key, size, x)
    # the move is o(rho) as rho grows; at finite rho only require it not to exceed the ray itself
    if best is None or best[1] > rho * np.linalg.norm(w):
        raise ApproximationError("no point of the set stays close to the escaping ray")
    return best[2]


def approx_sequence(y: MomentSequence, q, mode: Mode, eps: float,
                    cfg: ToleranceConfig = DEFAULT_TOL) -> ApproxStep:
    """Measure-bearing data within O(eps^(1/4)) of y, with its measure.

    Rank-one terms u = (tau, w) with tau = 0 have no point mass; each is
    replaced by weight eps at a point of the set near eps^(-1/2) w, while the
    ordinary atoms give up the same total weight so the mass is unchanged.
    """
    q = as_constraint(q)
    mode = Mode(mode)
    if not eps > 0:
        raise ValueError("eps must be positive")
    verdict = decide_noncompact(y, q, mode, cfg)
    if verdict.status is Status.NO_MEASURE:
        raise NoMeasureError("; ".join(verdict.certificate))
    if verdict.measure is not None:
        return ApproxStep(eps, y, verdict.measure, 0.0, 0.0, 0)
    dec = sz_decompose(_m1(y), q.matrix, cfg)
    tau, degenerate = _split_terms(dec.vectors)
    good = ~degenerate
    m0 = float(np.sum(tau[good] ** 2))
    d = int(degenerate.sum())
    if d * eps >= m0:
        raise ValueError(f"eps = {eps} too large: the finite atoms carry mass {m0:.6g}")
    atoms = list((dec.vectors[1:, good] / tau[good]).T)
    weights = list(tau[good] ** 2 * (1.0 - d * eps / m0))
    rho = eps ** -0.5
    for col in np.flatnonzero(degenerate):
        atoms.append(escape_point(q, dec.vectors[1:, col], rho, mode))
        weights.append(eps)
    mu = AtomicMeasure(np.array(atoms), np.array(weights), cfg.atom_merge_tol)
    pert = moments_of_measure(mu, 2)
    dev = float(np.max(np.abs(pert.values - y.values)))
    return ApproxStep(eps, pert, mu, dev, dev / eps ** 0.25, d)


# -- positivity certificates ------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Outcome of a multiplier search for f - t q >= 0 (or f + eps(1+|x|^2) - t q >= 0)."""

    feasible: bool
    t: float
    min_eig: float
    reason: str
    violating_point: np.ndarray | None = None
    pencil: PencilResult | None = None


def _violating(f, q, pencil, mode, shift=None):
    u = pencil.bottom_vector
    cands = []
    if u is not None and abs(u[0]) > 1e-9 * np.linalg.norm(u):
        x = u[1:] / u[0]
        cands.append(x if shift is None else x + shift)
    for x in cands:
        if f(x) < -1e-12 * f.scale() * (1.0 + x @ x) and _in_set(q, x, mode):
            return x
    return None


def _finish(f, q, res, mode, shift=None, slack=False):
    if res.feasible:
        return Certificate(True, res.t, res.min_eig, "multiplier found", None, res)
    x = _violating(f, q, res, mode, shift)
    if x is not None:
        return Certificate(False, res.t, res.min_eig, "negative_on_set", x, res)
    return Certificate(False, res.t, res.min_eig, "tolerance" if slack else "no_multiplier", None, res)


def s_lemma_cert(f, q, cfg: ToleranceConfig = DEFAULT_TOL) -> Certificate:
    """Search t >= 0 with f - t q >= 0 on R^n; needs a point with q > 0."""
    f, q = as_constraint(f), as_constraint(q)
    if witness_search(q, "positive") is None:
        raise PreconditionError("q has no point where it is strictly positive")
    res = pencil_feasible(f.matrix, q.matrix, "nonneg", cfg)
    return _finish(f, q, res, Mode.INEQUALITY)


def eq_lemma_cert(f, q, cfg: ToleranceConfig = DEFAULT_TOL) -> Certificate:
    """Search real t with f - t q >= 0; needs points with q > 0 and q < 0.

    The pencil is set up after translating a zero of q to the origin and
    homogenizing, which leaves the set of admissible t unchanged.
    """
    f, q = as_constraint(f), as_constraint(q)
    if witness_search(q, "positive") is None or witness_search(q, "negative") is None:
        raise PreconditionError("q must take both signs")
    a = witness_search(q, "zero")
    res = pencil_feasible(homogenize(f, a), homogenize(q, a), "real", cfg)
    return _finish(f, q, res, Mode.EQUALITY, shift=a)


def eps_cert(f, q, mode: Mode, eps: float, cfg: ToleranceConfig = DEFAULT_TOL) -> Certificate:
    """Search t with f + eps (1 + |x|^2) - t q >= 0 (t >= 0 in inequality mode)."""
    f, q = as_constraint(f), as_constraint(q)
    mode = Mode(mode)
    if not eps > 0:
        raise ValueError("eps must be positive")
    if mode is Mode.EQUALITY and witness_search(q, "zero") is None:
        raise PreconditionError("the set {q = 0} is empty")
    if mode is Mode.INEQUALITY and witness_search(q, "zero") is None and witness_search(q, "positive") is None:
        raise PreconditionError("the set {q >= 0} is empty")
    F = f.matrix + eps * np.eye(f.n + 1)
    res = pencil_feasible(F, q.matrix, "nonneg" if mode is Mode.INEQUALITY else "real", cfg)
    return _finish(f, q, res, mode, slack=True)
