"""Plain-text problem and measure files.

Problem file::

    # comments and blank lines are ignored
    moments n=2 k=2
    0 0 1
    1 0 1/2          <- exponents, then the value (decimal or p/q)
    ...
    constraint       <- optional: a polynomial, one term per line
    0 1 1
    2 0 -1

Every multi-index of degree <= k must appear exactly once.  A file may
instead start with ``polynomials n=<n>`` and carry only ``objective`` and
``constraint`` sections; ``objective`` is also allowed after moments.

Measure file: one atom per line, the weight followed by the n coordinates.
Values are kept as Fractions while parsing, so floats written with repr()
and fractions written as p/q both round-trip exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import AtomicMeasure, MomentSequence, Polynomial, monomial_basis


class FileFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<input>"):
        self.line = line
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


_HEADER = re.compile(r"^moments\s+n=(\d+)\s+k=(\d+)$")
_POLY_HEADER = re.compile(r"^polynomials\s+n=(\d+)$")
_SECTIONS = ("constraint", "objective")


def parse_number(tok: str) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a number: {tok!r}") from None


def format_number(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if v.is_integer() and abs(v) < 2 ** 53:
        return str(int(v))
    return repr(v)


@dataclass(frozen=True)
class ProblemFile:
    n: int
    k: int | None                                 # None for polynomial-only files
    values: dict = field(default_factory=dict)    # multi-index -> Fraction (float when built from data)
    constraint: dict | None = None
    objective: dict | None = None
    exact: bool = True                            # no value was written in decimal notation

    def sequence(self) -> MomentSequence:
        if self.k is None:
            raise FileFormatError("file carries no moments")
        return MomentSequence.from_dict(self.n, self.k, {a: float(v) for a, v in self.values.items()})

    def _poly(self, terms):
        return None if terms is None else Polynomial(self.n, {a: float(c) for a, c in terms.items()})

    def constraint_poly(self) -> Polynomial | None:
        return self._poly(self.constraint)

    def objective_poly(self) -> Polynomial | None:
        return self._poly(self.objective)

    @classmethod
    def from_sequence(cls, y: MomentSequence, constraint: Polynomial | None = None) -> "ProblemFile":
        vals = {a: float(v) for a, v in zip(y.basis, y.values)}
        con = None if constraint is None else {a: float(c) for a, c in constraint.coeffs.items()}
        return cls(y.n, y.k, vals, con, exact=False)


def _exponents(toks, n, lineno, source):
    if len(toks) != n + 1:
        raise FileFormatError(f"expected {n} exponents and a value, got {len(toks)} fields", lineno, source)
    try:
        alpha = tuple(int(t) for t in toks[:n])
    except ValueError:
        raise FileFormatError(f"exponents must be integers: {' '.join(toks[:n])}", lineno, source) from None
    if any(a < 0 for a in alpha):
        raise FileFormatError(f"negative exponent in {alpha}", lineno, source)
    try:
        value = parse_number(toks[n])
    except ValueError as exc:
        raise FileFormatError(str(exc), lineno, source) from None
    return alpha, value


def parse_problem(text: str, source: str = "<input>") -> ProblemFile:
    lines = [(i + 1, raw.split("#", 1)[0].strip()) for i, raw in enumerate(text.splitlines())]
    lines = [(i, s) for i, s in lines if s]
    if not lines:
        raise FileFormatError("empty file", None, source)
    lineno, head = lines[0]
    m, mp = _HEADER.match(head), _POLY_HEADER.match(head)
    if m:
        n, k = int(m.group(1)), int(m.group(2))
    elif mp:
        n, k = int(mp.group(1)), None
    else:
        raise FileFormatError("header must be 'moments n=<n> k=<k>' or 'polynomials n=<n>'", lineno, source)
    if n < 1:
        raise FileFormatError("n must be positive", lineno, source)
    sections: dict = {"moments": {}} if k is not None else {}
    current = "moments" if k is not None else None
    seen_at: dict = {}
    exact = True
    for lineno, s in lines[1:]:
        if s in _SECTIONS:
            if s in sections:
                raise FileFormatError(f"section '{s}' given twice", lineno, source)
            sections[s], current = {}, s
            continue
        if current is None:
            raise FileFormatError("expected a section name ('objective' or 'constraint')", lineno, source)
        toks = s.split()
        alpha, value = _exponents(toks, n, lineno, source)
        exact = exact and not any(ch in toks[-1] for ch in ".eE")
        if current == "moments" and sum(alpha) > k:
            raise FileFormatError(f"moment {alpha} has degree above k={k}", lineno, source)
        if alpha in sections[current]:
            raise FileFormatError(f"duplicate entry {alpha} (first on line {seen_at[current, alpha]})", lineno, source)
        sections[current][alpha] = value
        seen_at[current, alpha] = lineno
    if k is not None:
        missing = [a for a in monomial_basis(n, k) if a not in sections["moments"]]
        if missing:
            shown = ", ".join(" ".join(map(str, a)) for a in missing[:5])
            more = f" and {len(missing) - 5} more" if len(missing) > 5 else ""
            raise FileFormatError(f"missing moments: {shown}{more}", lines[-1][0], source)
    return ProblemFile(n, k, sections.get("moments", {}), sections.get("constraint"), sections.get("objective"), exact)


def read_problem(path) -> ProblemFile:
    path = Path(path)
    return parse_problem(path.read_text(), str(path))


def _poly_lines(terms: dict, n: int) -> list:
    keys = sorted(terms, key=lambda a: (sum(a), tuple(-x for x in a)))
    return [" ".join(map(str, a)) + " " + format_number(terms[a]) for a in keys]


def format_problem(pf: ProblemFile) -> str:
    out = [f"moments n={pf.n} k={pf.k}" if pf.k is not None else f"polynomials n={pf.n}"]
    if pf.k is not None:
        for a in monomial_basis(pf.n, pf.k):
            out.append(" ".join(map(str, a)) + " " + format_number(pf.values[a]))
    for name in _SECTIONS:
        terms = getattr(pf, name)
        if terms is not None:
            out.append(name)
            out.extend(_poly_lines(terms, pf.n))
    return "\n".join(out) + "\n"


def format_sequence(y: MomentSequence, constraint: Polynomial | None = None) -> str:
    return format_problem(ProblemFile.from_sequence(y, constraint))


# -- measures -------------------------------------------------------------


def parse_measure(text: str, n: int | None = None, source: str = "<input>") -> AtomicMeasure:
    atoms, weights = [], []
    for i, raw in enumerate(text.splitlines()):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        toks = s.split()
        if n is not None and len(toks) != n + 1:
            raise FileFormatError(f"expected a weight and {n} coordinates", i + 1, source)
        if atoms and len(toks) != len(atoms[0]) + 1:
            raise FileFormatError("atoms have inconsistent dimension", i + 1, source)
        try:
            nums = [float(parse_number(t)) for t in toks]
        except ValueError as exc:
            raise FileFormatError(str(exc), i + 1, source) from None
        if len(nums) < 2:
            raise FileFormatError("a line needs a weight and at least one coordinate", i + 1, source)
        if not nums[0] > 0:
            raise FileFormatError(f"weight must be positive, got {toks[0]}", i + 1, source)
        weights.append(nums[0])
        atoms.append(nums[1:])
    if not atoms:
        raise FileFormatError("no atoms", None, source)
    return AtomicMeasure(np.array(atoms), np.array(weights), merge_tol=0.0)


def read_measure(path, n: int | None = None) -> AtomicMeasure:
    path = Path(path)
    return parse_measure(path.read_text(), n, str(path))


def format_measure(mu: AtomicMeasure) -> str:
    return "".join(" ".join(format_number(v) for v in (w, *u)) + "\n" for w, u in zip(mu.weights, mu.atoms))
