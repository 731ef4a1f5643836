"""Named example instances shipped as data files, plus their perturbation families."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import numpy as np

from .core import AtomicMeasure, MomentSequence, Polynomial, add_index, moment_matrix, monomial_basis
from .curve_psi import CubicCurveMoments, build_cubic_curve, compression_is_pd, curve_from_values
from .fileio import ProblemFile, parse_problem
from .symlin import psd_status


@dataclass(frozen=True)
class Fixture:
    name: str
    problem: ProblemFile
    description: str
    expected: dict = field(default_factory=dict)

    @property
    def sequence(self) -> MomentSequence:
        return self.problem.sequence()

    @property
    def curve(self) -> CubicCurveMoments:
        """Exact letter form of a cubic-curve fixture."""
        y00 = self.problem.values[(0, 0)]
        return curve_from_values(self.problem.values, y00)

    @property
    def constraint(self) -> Polynomial | None:
        return self.problem.constraint_poly()

    @property
    def objective(self) -> Polynomial | None:
        return self.problem.objective_poly()


PSI_BOUNDARY = Fraction(526337068574699, 741609900)
ROBINSON_ZEROS = [(0, 1), (0, -1), (-1, 0), (-1, 1), (-1, -1), (1, 0), (1, 1), (1, -1)]

_EXPECTED = {
    "curve_catalan": dict(kind="curve", compression_pd=False, psd="Indefinite"),
    "curve_boundary": dict(kind="curve", compression_pd=True, rank=9, psi=PSI_BOUNDARY, curve="Boundary",
                          t=11319100143),
    "robinson_grid": dict(kind="sequence", psd="PositiveSemidefiniteSingular", rank=8, riesz_objective=0,
                            zeros=ROBINSON_ZEROS),
    "univariate_nonrecursive": dict(kind="sequence", psd="PositiveSemidefiniteSingular", rank=2, recursive=False,
                            status="NoMeasure"),
    "quartic_rank_gap": dict(kind="sequence", psd="PositiveSemidefiniteSingular", rank=4, recursive=True, card=3,
                  status="NoMeasure", approximable=True),
    "quartic_ones_twos": dict(kind="sequence", psd="PositiveSemidefiniteSingular", rank=2, recursive=False,
                  status="NoMeasure", approximable=True),
    "quartic_definite": dict(kind="sequence", psd="PositiveDefinite", rank=6,
                  status=("ExistsNonConstructive", "MeasureConstructed")),
    "parabola_singular": dict(kind="sequence", psd="PositiveSemidefiniteSingular", rank=2, status="ApproximableOnly"),
    "slemma_no_positive_point": dict(kind="polynomials", eq_lemma="precondition", eps_cert_feasible=True),
}

_DESCRIPTIONS = {
    "curve_catalan": "cubic-curve moment data on x2 = x1^3 with Catalan-like entries; its compression is indefinite",
    "curve_boundary": "cubic-curve data x = 1/10, r = 600 with s on the psi boundary",
    "robinson_grid": "eight-point grid measure and the Robinson polynomial vanishing on it",
    "univariate_nonrecursive": "univariate PSD Hankel data that is not recursively generated",
    "quartic_rank_gap": "singular quartic data with more rank than variety points",
    "quartic_ones_twos": "quartic data with X1 = 1 but X1^2 != X1",
    "quartic_definite": "positive definite perturbation of the rank-gap quartic data (m = 10)",
    "parabola_singular": "quadratic data with no measure on the parabola x2 = x1^2, approximable",
    "slemma_no_positive_point": "f = x1*x2, q = -x1^2: the equality S-lemma needs a point with q > 0",
}

NAMES = tuple(_EXPECTED)


def load_fixture(name: str) -> Fixture:
    if name not in _EXPECTED:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(NAMES)}")
    text = resources.files("truncmoment").joinpath(f"data/{name}.txt").read_text()
    return Fixture(name, parse_problem(text, f"{name}.txt"), _DESCRIPTIONS[name], dict(_EXPECTED[name]))


def fixture_path(name: str):
    if name not in _EXPECTED:
        raise KeyError(f"unknown fixture {name!r}")
    return resources.files("truncmoment").joinpath(f"data/{name}.txt")


def classification_mismatches(fx: Fixture) -> list:
    """Recompute PSD status and rank; list every disagreement with the stored expectation."""
    exp, bad = fx.expected, []
    if exp["kind"] == "curve":
        pd = compression_is_pd(fx.curve, exact=True)
        if pd != exp["compression_pd"]:
            bad.append(f"compression positive definite: {pd}, expected {exp['compression_pd']}")
        if "psd" in exp:
            got = str(psd_status(build_cubic_curve(fx.curve).entries).status)
            if got != exp["psd"]:
                bad.append(f"psd {got}, expected {exp['psd']}")
    elif exp["kind"] == "sequence":
        y = fx.sequence
        if y.k % 2 == 0:
            rep = psd_status(moment_matrix(y).entries)
            if str(rep.status) != exp["psd"]:
                bad.append(f"psd {rep.status}, expected {exp['psd']}")
            if rep.rank != exp["rank"]:
                bad.append(f"rank {rep.rank}, expected {exp['rank']}")
    return bad


# -- perturbation families ------------------------------------------------------


def _from_matrix(n: int, d: int, M) -> MomentSequence:
    lab = monomial_basis(n, d)
    data = {}
    for i, a in enumerate(lab):
        for j, b in enumerate(lab):
            data[add_index(a, b)] = M[i][j]
    return MomentSequence.from_dict(n, 2 * d, data)


def ones_twos_instance(eps: float) -> tuple[MomentSequence, AtomicMeasure]:
    """The displayed y(eps) for the ones/twos quartic data and its 2-atomic measure."""
    e = eps
    p1, p2, p3 = 1 + e ** 0.75 - e, 1 + e ** 0.5 - e, 1 + e ** 0.25 - e
    q = 2 - e
    M = [[1, p1, p1, p2, p2, p2],
         [p1, p2, p2, p3, p3, p3],
         [p1, p2, p2, p3, p3, p3],
         [p2, p3, p3, q, q, q],
         [p2, p3, p3, q, q, q],
         [p2, p3, p3, q, q, q]]
    far = e ** -0.25
    return _from_matrix(2, 2, M), AtomicMeasure(np.array([[1.0, 1.0], [far, far]]), np.array([1 - e, e]))


def quartic_ab_instance(a: float, b: float) -> MomentSequence:
    """The quartic_rank_gap matrix pattern with free entries a (y22) and b (y04)."""
    M = [[8, 0, 0, 4, 0, 4], [0, 4, 0, 2, 0, -2], [0, 0, 4, 0, -2, 0],
         [4, 2, 0, 11, 0, a], [0, 0, -2, 0, a, 0], [4, -2, 0, a, 0, b]]
    return _from_matrix(2, 2, M)


def definite_quartic_instance(m: int) -> MomentSequence:
    """a = 1 + 1/m, b = 3 + 1/(4 m^2): M2 becomes positive definite."""
    return quartic_ab_instance(1 + 1 / m, 3 + 1 / (4 * m * m))


def parabola_instance(eps: float) -> tuple[MomentSequence, AtomicMeasure]:
    """The displayed M1(ybar(eps)) for the parabola_singular data and its measure on x2 = x1^2."""
    e = eps
    M = [[1, 1 - e + e ** 0.75, 1 + e ** 0.5 - e],
         [1 - e + e ** 0.75, 1 + e ** 0.5 - e, 1 + e ** 0.25 - e],
         [1 + e ** 0.5 - e, 1 + e ** 0.25 - e, 2 - e]]
    return _from_matrix(2, 1, M), AtomicMeasure(np.array([[1.0, 1.0], [e ** -0.25, e ** -0.5]]), np.array([1 - e, e]))
