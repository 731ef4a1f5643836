"""Moment sequences, Riesz functionals, moment matrices and atomic measures.

Monomials are indexed by exponent tuples (multi-indices) and ordered
degree-lexicographically: lower total degree first, and within a degree
higher powers of earlier variables first, so for two variables the order
is 1, x1, x2, x1^2, x1 x2, x2^2, x1^3, ...
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

MultiIndex = tuple


class MomentError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(MomentError, ValueError):
    """Mismatched number of variables or degree."""


class PreconditionError(MomentError, ValueError):
    """A routine was called outside the hypotheses it relies on."""


class NoMeasureError(MomentError):
    """The data provably admit no representing measure."""


class ExtractionError(MomentError):
    """Atoms could not be recovered from a flat extension."""


@dataclass(frozen=True)
class ToleranceConfig:
    """Relative tolerance factors.

    The absolute thresholds scale with the data they are applied to:
    ``psd_tol * size * max(|lambda|_max, 1)`` for eigenvalue tests,
    ``moment_tol * (1 + max|y|)`` for moment comparisons and
    ``atom_merge_tol * (1 + |u|)`` for merging atoms.
    """

    psd_tol: float = 1e-9
    rank_tol: float = 1e-9
    moment_tol: float = 1e-8
    atom_merge_tol: float = 1e-8

    def __post_init__(self):
        for name in ("psd_tol", "rank_tol", "moment_tol", "atom_merge_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    def psd_threshold(self, eigenvalues) -> float:
        ev = np.asarray(eigenvalues, dtype=float)
        scale = max(float(np.max(np.abs(ev))) if ev.size else 0.0, 1.0)
        return self.psd_tol * max(ev.size, 1) * scale

    def rank_threshold(self, eigenvalues) -> float:
        ev = np.asarray(eigenvalues, dtype=float)
        scale = max(float(np.max(np.abs(ev))) if ev.size else 0.0, 1.0)
        return self.rank_tol * max(ev.size, 1) * scale

    def moment_threshold(self, values) -> float:
        v = np.asarray(values, dtype=float)
        return self.moment_tol * (1.0 + (float(np.max(np.abs(v))) if v.size else 0.0))

    def merge_threshold(self, point) -> float:
        return self.atom_merge_tol * (1.0 + float(np.linalg.norm(point)))


DEFAULT_TOL = ToleranceConfig()


# -- monomials ---------------------------------------------------------------


@lru_cache(maxsize=None)
def _basis(n: int, k: int) -> tuple:
    out = []
    for deg in range(k + 1):
        layer = [a for a in itertools.product(range(deg + 1), repeat=n) if sum(a) == deg]
        out.extend(sorted(layer, reverse=True))
    return tuple(out)


@lru_cache(maxsize=None)
def _index(n: int, k: int) -> dict:
    return {a: i for i, a in enumerate(_basis(n, k))}


def monomial_basis(n: int, k: int) -> list[MultiIndex]:
    """All exponent tuples of total degree <= k in degree-lex order."""
    if n < 1 or k < 0:
        raise DimensionError(f"need n >= 1 and k >= 0, got n={n}, k={k}")
    return list(_basis(n, k))


def basis_size(n: int, k: int) -> int:
    return comb(n + k, k)


def add_index(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(i + j for i, j in zip(a, b))


def unit_index(n: int, i: int) -> MultiIndex:
    return tuple(1 if j == i else 0 for j in range(n))


def monomial_name(alpha: MultiIndex, var: str = "x") -> str:
    parts = []
    for i, e in enumerate(alpha):
        if e == 1:
            parts.append(f"{var}{i + 1}")
        elif e > 1:
            parts.append(f"{var}{i + 1}^{e}")
    return "*".join(parts) if parts else "1"


# -- moment sequences ----------------------------------------------------------


@dataclass(frozen=True)
class MomentSequence:
    """Dense moment data y_alpha, |alpha| <= k, stored in degree-lex order."""

    n: int
    k: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        if vals.size != basis_size(self.n, self.k):
            raise DimensionError(
                f"expected {basis_size(self.n, self.k)} moments for n={self.n}, k={self.k}, got {vals.size}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("moment values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_dict(cls, n: int, k: int, data: Mapping[MultiIndex, float]) -> "MomentSequence":
        idx = _index(n, k)
        vals = np.zeros(len(idx))
        missing = set(idx)
        for a, v in data.items():
            a = tuple(a)
            if a not in idx:
                raise DimensionError(f"exponent {a} out of range for n={n}, k={k}")
            vals[idx[a]] = float(v)
            missing.discard(a)
        if missing:
            raise DimensionError(f"missing moments: {sorted(missing, reverse=True)[:5]}")
        return cls(n, k, vals)

    @property
    def basis(self) -> list[MultiIndex]:
        return list(_basis(self.n, self.k))

    def index(self, alpha: MultiIndex) -> int:
        try:
            return _index(self.n, self.k)[tuple(alpha)]
        except KeyError:
            raise DimensionError(f"no moment {tuple(alpha)} in degree {self.k} data") from None

    def __getitem__(self, alpha: MultiIndex) -> float:
        return float(self.values[self.index(alpha)])

    def as_dict(self) -> dict:
        return {a: float(v) for a, v in zip(_basis(self.n, self.k), self.values)}

    def truncate(self, k: int) -> "MomentSequence":
        if k > self.k:
            raise DimensionError("cannot truncate to a higher degree")
        return MomentSequence(self.n, k, self.values[: basis_size(self.n, k)])

    def scaled(self, c: float) -> "MomentSequence":
        return MomentSequence(self.n, self.k, c * self.values)

    def replace(self, updates: Mapping[MultiIndex, float]) -> "MomentSequence":
        vals = self.values.copy()
        for a, v in updates.items():
            vals[self.index(a)] = v
        return MomentSequence(self.n, self.k, vals)


# -- polynomials ---------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial:
    """Sparse real polynomial {exponent: coefficient} in n variables."""

    n: int
    coeffs: Mapping[MultiIndex, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for a, c in dict(self.coeffs).items():
            a = tuple(int(e) for e in a)
            if len(a) != self.n or min(a, default=0) < 0:
                raise DimensionError(f"bad exponent {a} for {self.n} variables")
            c = float(c)
            if c != 0.0:
                clean[a] = clean.get(a, 0.0) + c
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def constant(cls, n: int, c: float) -> "Polynomial":
        return cls(n, {(0,) * n: c})

    @classmethod
    def monomial(cls, alpha: MultiIndex, c: float = 1.0) -> "Polynomial":
        return cls(len(alpha), {tuple(alpha): c})

    @classmethod
    def from_vector(cls, n: int, d: int, vec) -> "Polynomial":
        return cls(n, dict(zip(_basis(n, d), np.asarray(vec, dtype=float))))

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.coeffs), default=0)

    def to_vector(self, d: int) -> np.ndarray:
        if self.degree > d:
            raise DimensionError(f"degree {self.degree} exceeds {d}")
        idx = _index(self.n, d)
        vec = np.zeros(len(idx))
        for a, c in self.coeffs.items():
            vec[idx[a]] = c
        return vec

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out.get(a, 0.0) + c
        return Polynomial(self.n, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.n, {a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            out: dict = {}
            for a, c in self.coeffs.items():
                for b, e in other.coeffs.items():
                    key = add_index(a, b)
                    out[key] = out.get(key, 0.0) + c * e
            return Polynomial(self.n, out)
        return Polynomial(self.n, {a: float(other) * c for a, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __call__(self, x) -> float:
        return eval_poly(self, x)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for a in sorted(self.coeffs, key=lambda a: (sum(a), a)):
            c = self.coeffs[a]
            name = monomial_name(a)
            if name == "1":
                body = f"{abs(c):.12g}"
            elif abs(abs(c) - 1.0) < 1e-14:
                body = name
            else:
                body = f"{abs(c):.12g}*{name}"
            terms.append(("-" if c < 0 else "+", body))
        first_sign, first = terms[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


def eval_poly(p: Polynomial, x) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != p.n:
        raise DimensionError(f"point has {x.size} coordinates, polynomial has {p.n} variables")
    return float(sum(c * np.prod(x ** np.array(a)) for a, c in p.coeffs.items()))


def riesz(y: MomentSequence, p: Polynomial) -> float:
    """L_y(p) = sum_alpha p_alpha y_alpha."""
    if p.n != y.n:
        raise DimensionError(f"polynomial in {p.n} variables, moments in {y.n}")
    if p.degree > y.k:
        raise DimensionError(f"polynomial degree {p.degree} exceeds moment degree {y.k}")
    return float(sum(c * y[a] for a, c in p.coeffs.items()))


# -- moment matrices -------------------------------------------------------------


@dataclass(frozen=True)
class MomentMatrix:
    """Moment matrix M_d(y) with its row/column monomial labels."""

    entries: np.ndarray
    labels: tuple
    d: int

    @property
    def size(self) -> int:
        return len(self.labels)

    def label_index(self, alpha: MultiIndex) -> int:
        return self.labels.index(tuple(alpha))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def moment_block(y: MomentSequence, rows: Sequence[MultiIndex], cols: Sequence[MultiIndex]) -> np.ndarray:
    """Matrix [y_{a+b}] for a in rows, b in cols."""
    return np.array([[y[add_index(a, b)] for b in cols] for a in rows])


def moment_matrix(y: MomentSequence) -> MomentMatrix:
    if y.k % 2:
        raise DimensionError(f"moment matrix needs even degree, got k={y.k}")
    d = y.k // 2
    labels = _basis(y.n, d)
    return MomentMatrix(moment_block(y, labels, labels), labels, d)


def as_matrix(m) -> np.ndarray:
    if isinstance(m, MomentMatrix):
        return np.array(m.entries, dtype=float)
    return np.asarray(m, dtype=float)


# -- atomic measures ---------------------------------------------------------------


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite positive combination of point masses.

    Atoms closer than the merge tolerance are combined (weighted centroid);
    weights must be strictly positive.
    """

    atoms: np.ndarray
    weights: np.ndarray
    merge_tol: float = field(default=DEFAULT_TOL.atom_merge_tol, compare=False)

    def __post_init__(self):
        atoms = np.atleast_2d(np.asarray(self.atoms, dtype=float))
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if atoms.shape[0] != weights.size:
            raise DimensionError("one weight per atom required")
        if weights.size == 0:
            raise ValueError("a measure needs at least one atom")
        if np.any(weights <= 0) or not np.all(np.isfinite(weights)) or not np.all(np.isfinite(atoms)):
            raise ValueError("weights must be finite and strictly positive")
        merged_a: list = []
        merged_w: list = []
        for u, w in zip(atoms, weights):
            for i, v in enumerate(merged_a):
                if np.linalg.norm(u - v) <= self.merge_tol * (1.0 + np.linalg.norm(u)):
                    tot = merged_w[i] + w
                    merged_a[i] = (merged_w[i] * v + w * u) / tot
                    merged_w[i] = tot
                    break
            else:
                merged_a.append(u.copy())
                merged_w.append(w)
        a = np.array(merged_a)
        w = np.array(merged_w)
        a.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "atoms", a)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.atoms.shape[1]

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def __len__(self) -> int:
        return self.weights.size


def moments_of_measure(mu: AtomicMeasure, k: int) -> MomentSequence:
    """y_alpha = sum_i w_i u_i^alpha for |alpha| <= k."""
    basis = np.array(_basis(mu.n, k))
    powers = np.prod(mu.atoms[:, None, :] ** basis[None, :, :], axis=2)
    return MomentSequence(mu.n, k, mu.weights @ powers)


@dataclass(frozen=True)
class Verification:
    max_abs_deviation: float
    passed: bool
    tolerance: float

    def __bool__(self) -> bool:
        return self.passed


def verify_measure(y: MomentSequence, mu: AtomicMeasure, cfg: ToleranceConfig = DEFAULT_TOL) -> Verification:
    """Compare every moment of mu against y in the max norm."""
    if mu.n != y.n:
        raise DimensionError(f"measure in R^{mu.n}, moments in {y.n} variables")
    dev = float(np.max(np.abs(moments_of_measure(mu, y.k).values - y.values)))
    tol = cfg.moment_threshold(y.values)
    return Verification(dev, dev <= tol, tol)


# -- verdicts ---------------------------------------------------------------------


class Status(str, enum.Enum):
    MEASURE_CONSTRUCTED = "MeasureConstructed"
    EXISTS_NONCONSTRUCTIVE = "ExistsNonConstructive"
    APPROXIMABLE_ONLY = "ApproximableOnly"
    NO_MEASURE = "NoMeasure"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self) -> str:
        return self.value


@dataclass
class Verdict:
    """Outcome of a decision routine with the chain of rules that produced it.

    ``approximable`` is set when the data lie in the closure of the
    measure-bearing sequences even though no measure exists (or none was
    found).
    """

    status: Status
    measure: AtomicMeasure | None = None
    certificate: list = field(default_factory=list)
    approximable: bool = False
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status is Status.MEASURE_CONSTRUCTED and self.measure is None:
            raise ValueError("MeasureConstructed requires a measure")


