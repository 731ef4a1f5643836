"""Degree-6 moment data on the cubic curve x2 = x1^3.

The moment matrix M_3 carries the column relation X2 = X1^3, so every
moment y_ij equals the univariate moment g_{i+3j} of the parameter
measure; seventeen letters plus y00 = 1 fill the 10x10 layout.  Deleting
row and column X1^3 leaves a 9x9 matrix J, and the quantity

    psi = (omega * eps - <V, W>^2) / eps,   omega = <P W, W>,

built from the blocks of J^{-1} is the smallest admissible value of y44 in
a positive extension.  Since y44 = y15 = s in any such extension, the data
has a measure on the curve iff s > psi.

All routines accept Fractions and then run in exact arithmetic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .core import (DEFAULT_TOL, AtomicMeasure, MomentMatrix, MomentSequence, PreconditionError,
                   ToleranceConfig, monomial_basis, verify_measure)
from .symlin import fraction_inverse, schur_blocks, sym_eigen

LETTERS = "abcdefghjkrstuvwx"

# the layout of M_3 with rows/columns 1, X1, X2, X1^2, X1X2, X2^2, X1^3, X1^2X2, X1X2^2, X2^3
_GRID = """
1 a b c e d b f g x
a c e b f g e d h j
b e d f g x d h j k
c b f e d h f g x u
e f g d h j g x u v
d g x h j k x u v w
b e d f g x d h j k
f d h g x u h j k r
g h j x u v j k r s
x j k u v w k r s t
"""
GRID = tuple(tuple(row.split()) for row in _GRID.strip().splitlines())

# letter -> exponent of the curve parameter: y_ij = g_{i+3j}
GAMMA = {"1": 0, "a": 1, "c": 2, "b": 3, "e": 4, "f": 5, "d": 6, "g": 7, "h": 8, "x": 9,
         "j": 10, "u": 11, "k": 12, "v": 13, "r": 14, "w": 15, "s": 16, "t": 18}
_BY_GAMMA = {v: k for k, v in GAMMA.items()}

X13 = 6                                     # position of X1^3 in the basis
W_LETTERS = ("h", "x", "u", "j", "k", "r", "v", "w")


class CurveVerdict(str, enum.Enum):
    HAS_MEASURE = "HasMeasure"
    NO_MEASURE = "NoMeasure"
    BOUNDARY = "Boundary"

    def __str__(self) -> str:
        return self.value


def _num(v, exact: bool):
    if exact:
        return v if isinstance(v, Fraction) else Fraction(v)
    return float(v)


@dataclass(frozen=True)
class CubicCurveMoments:
    """The seventeen letter moments (normalized so that y00 = 1)."""

    values: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        unknown = set(self.values) - set(LETTERS)
        if unknown:
            raise ValueError(f"unknown letters: {sorted(unknown)}")
        full = {c: self.values.get(c, 0) for c in LETTERS}
        object.__setattr__(self, "values", full)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.values.values())

    def __getitem__(self, letter: str):
        return 1 if letter == "1" else self.values[letter]

    def with_values(self, **updates) -> "CubicCurveMoments":
        return CubicCurveMoments({**self.values, **updates})

    @property
    def s(self):
        return self.values["s"]

    @property
    def t(self):
        return self.values["t"]

    def gamma(self) -> dict:
        """Parameter moments g_m, m in 0..18 except 17."""
        return {GAMMA[c]: self[c] for c in GAMMA}

    def to_sequence(self, mass: float = 1.0) -> MomentSequence:
        data = {}
        for a in monomial_basis(2, 6):
            data[a] = mass * float(self[_BY_GAMMA[a[0] + 3 * a[1]]])
        return MomentSequence.from_dict(2, 6, data)

    @classmethod
    def from_sequence(cls, y: MomentSequence, tol: float = 1e-12) -> tuple["CubicCurveMoments", float]:
        """Read the letters off a degree-6 bivariate sequence; returns (letters, y00).

        Raises PreconditionError when y is not consistent with X2 = X1^3.
        """
        if (y.n, y.k) != (2, 6):
            raise PreconditionError("curve data needs n = 2, k = 6")
        y00 = y[(0, 0)]
        if y00 <= 0:
            raise PreconditionError("y00 must be positive")
        seen: dict = {}
        scale = 1.0 + np.abs(y.values).max()
        for a in monomial_basis(2, 6):
            m = a[0] + 3 * a[1]
            v = y[a] / y00
            if m in seen and abs(seen[m] - v) > tol * scale:
                raise PreconditionError(f"moment {a} breaks the relation X2 = X1^3")
            seen.setdefault(m, v)
        return cls({_BY_GAMMA[m]: v for m, v in seen.items() if m}), y00


def curve_from_values(values: Mapping, y00=1) -> CubicCurveMoments:
    """Letters from a full exponent -> value map, divided by y00, kept exact."""
    y00 = Fraction(y00)
    if y00 <= 0:
        raise PreconditionError("y00 must be positive")
    seen: dict = {}
    for a, v in values.items():
        g = a[0] + 3 * a[1]
        v = Fraction(v) / y00
        if seen.setdefault(g, v) != v:
            raise PreconditionError(f"moment {a} breaks the relation X2 = X1^3")
    return CubicCurveMoments({_BY_GAMMA[g]: v for g, v in seen.items() if g})


def build_cubic_curve(m: CubicCurveMoments) -> MomentMatrix:
    """The 10x10 moment matrix in the fixed letter layout."""
    entries = np.array([[float(m[c]) for c in row] for row in GRID])
    return MomentMatrix(entries, monomial_basis(2, 3), 3)


def curve_grid(m: CubicCurveMoments, exact: bool | None = None) -> list:
    """Same layout as nested lists (Fractions in exact mode)."""
    exact = m.exact if exact is None else exact
    return [[_num(m[c], exact) for c in row] for row in GRID]


def compression(m: CubicCurveMoments, exact: bool | None = None) -> list:
    """J: the layout with row and column X1^3 removed."""
    rows = curve_grid(m, exact)
    return [[v for j, v in enumerate(row) if j != X13] for i, row in enumerate(rows) if i != X13]


def _is_pd_exact(A: list) -> bool:
    # LDL^T with exact pivots; PD iff every pivot is positive
    A = [row[:] for row in A]
    n = len(A)
    for c in range(n):
        if A[c][c] <= 0:
            return False
        for i in range(c + 1, n):
            f = A[i][c] / A[c][c]
            if f:
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return True


def _is_pd_float(A, cfg: ToleranceConfig) -> bool:
    # equilibrated, and only required not to be indefinite beyond tolerance:
    # at s = psi data of typical scale is definite by a relative margin ~1e-10,
    # far below any float rank threshold; exact mode makes the strict call
    A = np.asarray(A, dtype=float)
    if np.any(np.diag(A) <= 0):
        return False
    d = 1.0 / np.sqrt(np.diag(A))
    w, _ = sym_eigen(A * d[:, None] * d[None, :])
    return bool(w[-1] >= -cfg.psd_threshold(w))


def compression_is_pd(m: CubicCurveMoments, cfg: ToleranceConfig = DEFAULT_TOL, exact: bool | None = None) -> bool:
    """J > 0, equivalently M >= 0 with rank 9 (the X1^3 column repeats X2).

    Float mode only rules out indefiniteness beyond ``cfg.psd_tol``.
    """
    exact = m.exact if exact is None else exact
    J = compression(m, exact)
    return _is_pd_exact(J) if exact else _is_pd_float(J, cfg)


@dataclass(frozen=True)
class PsiReport:
    psi: object
    omega: object
    eps: object
    vw: object                              # <V, W>


def psi_report(m: CubicCurveMoments, cfg: ToleranceConfig = DEFAULT_TOL, exact: bool | None = None) -> PsiReport:
    exact = m.exact if exact is None else exact
    if not compression_is_pd(m, cfg, exact):
        raise PreconditionError("the compression J is not positive definite")
    J = compression(m, exact)
    W = [_num(m[c], exact) for c in W_LETTERS]
    blocks = schur_blocks(J, 8, exact=exact)
    if exact:
        P = blocks.P
        V = [row[0] for row in blocks.V]
        eps = blocks.eps[0][0]
        omega = sum(W[i] * P[i][j] * W[j] for i in range(8) for j in range(8))
        vw = sum(v * w for v, w in zip(V, W))
        return PsiReport((omega * eps - vw * vw) / eps, omega, eps, vw)
    Wv = np.array(W)
    omega = float(Wv @ blocks.P @ Wv)
    vw = float(blocks.V[:, 0] @ Wv)
    eps = float(blocks.eps[0, 0])
    # P - V V^T / eps = N^{-1}, so psi = W^T N^{-1} W.  Near the boundary J is
    # nearly singular (condition ~1e14 on typical data) and the difference
    # omega - <V,W>^2/eps cancels catastrophically; N stays well conditioned.
    N = np.array([row[:8] for row in J[:8]])
    value = float(Wv @ np.linalg.solve(N, Wv))
    return PsiReport(value, omega, eps, vw)


def psi(m: CubicCurveMoments, cfg: ToleranceConfig = DEFAULT_TOL, exact: bool | None = None):
    """Lower bound for y44 in a positive extension; a Fraction in exact mode."""
    return psi_report(m, cfg, exact).psi


def psi_band(value, cfg: ToleranceConfig = DEFAULT_TOL) -> float:
    """Half-width of the float-mode Boundary band around psi.

    Scaled by |psi| rather than by the largest moment: t is ~1e10 on typical
    data and would otherwise swallow any s within hundreds of psi.
    """
    return cfg.moment_tol * (1.0 + abs(float(value)))


def curve_measure_test(m: CubicCurveMoments, cfg: ToleranceConfig = DEFAULT_TOL,
                       exact: bool | None = None) -> tuple[CurveVerdict, object]:
    """Compare s with psi.  Returns (verdict, psi).

    Exact data is compared exactly, so only s == psi is Boundary.
    """
    exact = m.exact if exact is None else exact
    value = psi(m, cfg, exact)              # raises unless J > 0
    s = _num(m.s, exact)
    if exact:
        diff, band = s - value, 0
    else:
        diff, band = s - value, psi_band(value, cfg)
    if diff > band:
        return CurveVerdict.HAS_MEASURE, value
    if diff < -band:
        return CurveVerdict.NO_MEASURE, value
    return CurveVerdict.BOUNDARY, value


# -- positivity window in (s, t) -------------------------------------------


def _split_t(m: CubicCurveMoments):
    J = compression(m, True)
    N = [row[:8] for row in J[:8]]
    U = [row[8] for row in J[:8]]
    return N, U


def t_floor(m: CubicCurveMoments) -> Fraction:
    """Exact infimum of t keeping J > 0 (J > 0 iff N > 0 and t > U^T N^{-1} U)."""
    N, U = _split_t(m)
    if not _is_pd_exact(N):
        raise PreconditionError("leading 8x8 block of J is not positive definite")
    Ni = fraction_inverse(N)
    return sum(U[i] * Ni[i][j] * U[j] for i in range(8) for j in range(8))


def s_window(m: CubicCurveMoments) -> Fraction | float:
    """Largest d such that s + d' keeps J > 0 for all 0 <= d' < d (t fixed).

    U^T N^{-1} U is a convex quadratic in s, so the window is bounded by its
    upper crossing with t.  Returned in floating point (it is a root).
    """
    N, U = _split_t(m)
    Ni = fraction_inverse(N)
    k = 7                                                       # s sits in row X1X2^2
    c = Ni[k][k]
    b = sum(Ni[k][j] * U[j] for j in range(8))
    a = sum(U[i] * Ni[i][j] * U[j] for i in range(8) for j in range(8))
    gap = Fraction(m.t) - a                                     # t - floor
    if gap <= 0:
        return 0.0
    # c d^2 + 2 b d - gap = 0, positive root
    disc = float(b * b + c * gap)
    return float((-b + Fraction(np.sqrt(disc))) / c) if c else float(gap / (2 * b)) if b > 0 else float("inf")


# -- approximation along s + 1/m ------------------------------------------


@dataclass(frozen=True)
class CurveApproxStep:
    m: int
    moments: CubicCurveMoments
    verdict: CurveVerdict | None            # None when J fails to be positive definite
    deviation: object                       # |y^(m) - y| = 1/m
    in_window: bool


def curve_approx_sequence(m: CubicCurveMoments, mlist: Sequence[int], cfg: ToleranceConfig = DEFAULT_TOL,
                          exact: bool | None = None) -> list[CurveApproxStep]:
    """Replace s by s + 1/m for each m, keeping every other moment fixed.

    Steps whose data leave the positivity window (J not > 0) are kept in the
    output with ``in_window=False`` and no verdict.
    """
    exact = m.exact if exact is None else exact
    out = []
    for mm in mlist:
        if int(mm) <= 0:
            raise ValueError("m must be a positive integer")
        step = Fraction(1, int(mm)) if exact else 1.0 / int(mm)
        ym = m.with_values(s=_num(m.s, exact) + step)
        if compression_is_pd(ym, cfg, exact):
            verdict, _ = curve_measure_test(ym, cfg, exact)
            out.append(CurveApproxStep(int(mm), ym, verdict, step, True))
        else:
            out.append(CurveApproxStep(int(mm), ym, None, step, False))
    return out


# -- extension check and constructive witness ------------------------------


def extension_candidate(m: CubicCurveMoments, y44) -> list:
    """J bordered by the column X1^2X2^2 at the optimal free entry, diagonal y44.

    Exact; positive definite iff y44 > psi.
    """
    rep = psi_report(m, exact=True)
    J = compression(m, True)
    W = [Fraction(m[c]) for c in W_LETTERS]
    z = -rep.vw / rep.eps
    col = W + [z]
    rows = [row + [c] for row, c in zip(J, col)]
    rows.append(col + [Fraction(y44)])
    return rows


def extension_schur(m: CubicCurveMoments, y44) -> Fraction:
    """Schur complement of J in :func:`extension_candidate`; equals y44 - psi."""
    A = extension_candidate(m, y44)
    J = [row[:9] for row in A[:9]]
    c = [row[9] for row in A[:9]]
    Ji = fraction_inverse(J)
    return A[9][9] - sum(c[i] * Ji[i][j] * c[j] for i in range(9) for j in range(9))


def _hankel(g: dict, lo: int, size: int) -> list:
    return [[g[lo + i + j] for j in range(size)] for i in range(size)]


def curve_witness(m: CubicCurveMoments, mass: float = 1.0, cfg: ToleranceConfig = DEFAULT_TOL) -> AtomicMeasure:
    """A measure on x2 = x1^3 reproducing the data when s > psi.

    Works on the parameter line: pick the missing g17 at the centre of its
    admissible interval, close the 10x10 Hankel matrix flatly (g19 = 0 and
    g20 from the Schur complement), and read the ten nodes off the kernel
    polynomial.  Atoms are (t_i, t_i^3).  Exact arithmetic up to root finding.
    """
    if not m.exact:
        m = CubicCurveMoments({c: Fraction(v) for c, v in m.values.items()})
    verdict, _ = curve_measure_test(m, cfg, exact=True)
    if verdict is not CurveVerdict.HAS_MEASURE:
        raise PreconditionError(f"no witness: curve test gives {verdict}")
    g = {k: Fraction(v) for k, v in m.gamma().items()}
    H8 = _hankel(g, 0, 9)
    H8i = fraction_inverse(H8)
    # g17 minimizing c^T H8^{-1} c with c = (g9..g17): solve the last coordinate
    base = [g[9 + i] for i in range(8)] + [Fraction(0)]
    num = sum(base[i] * H8i[i][8] for i in range(9))
    g[17] = -num / H8i[8][8]
    c = [g[9 + i] for i in range(9)]
    if g[18] <= sum(c[i] * H8i[i][j] * c[j] for i in range(9) for j in range(9)):
        raise PreconditionError("parameter Hankel matrix cannot be completed positively")
    g[19] = Fraction(0)
    H9 = _hankel(g, 0, 10)
    H9i = fraction_inverse(H9)
    b = [g[10 + i] for i in range(10)]
    phi = [sum(H9i[i][j] * b[j] for j in range(10)) for i in range(10)]
    # flat: t^10 = sum phi_i t^i on the support
    coeffs = [1.0] + [-float(p) for p in reversed(phi)]
    roots = np.roots(coeffs)
    if np.abs(roots.imag).max() > 1e-7 * (1.0 + np.abs(roots.real).max()):
        raise PreconditionError("kernel polynomial has non-real roots")
    nodes = np.sort(roots.real)
    # Gauss-type weights: H9 = V diag(lam) V^T with V square gives lam_i = 1 / v_i^T H9^{-1} v_i
    Hi = np.array([[float(v) for v in row] for row in H9i])
    Vn = np.vander(nodes, 10, increasing=True)
    lam = 1.0 / np.einsum("ij,jk,ik->i", Vn, Hi, Vn)
    if np.any(lam <= 0):
        raise PreconditionError("recovered weights are not positive")
    mu = AtomicMeasure(np.column_stack([nodes, nodes ** 3]), mass * lam, cfg.atom_merge_tol)
    return mu


def verify_curve_witness(m: CubicCurveMoments, mu: AtomicMeasure, mass: float = 1.0,
                         cfg: ToleranceConfig = DEFAULT_TOL):
    return verify_measure(m.to_sequence(mass), mu, cfg)


__all__ = [
    "CubicCurveMoments", "CurveVerdict", "CurveApproxStep", "PsiReport", "GRID", "GAMMA", "W_LETTERS",
    "curve_from_values", "build_cubic_curve", "curve_grid", "compression", "compression_is_pd", "psi", "psi_report", "psi_band",
    "curve_measure_test", "t_floor", "s_window", "curve_approx_sequence", "extension_candidate",
    "extension_schur", "curve_witness", "verify_curve_witness"
]
