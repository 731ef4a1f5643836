from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from truncmoment.core import AtomicMeasure, MomentSequence, Polynomial
from truncmoment.fileio import (FileFormatError, format_measure, format_number, format_sequence, parse_measure,
                                parse_problem)

GOOD = """# comment
moments n=2 k=1
0 0 1
1 0 1/2   # trailing comment
0 1 -3
constraint
0 1 1
2 0 -1
"""


def test_parse_good_file():
    pf = parse_problem(GOOD)
    assert (pf.n, pf.k) == (2, 1)
    assert pf.values[(1, 0)] == Fraction(1, 2)
    assert pf.exact
    assert pf.constraint == {(0, 1): 1, (2, 0): -1}
    assert pf.sequence().values.tolist() == [1.0, 0.5, -3.0]


def test_decimal_marks_inexact():
    pf = parse_problem("moments n=1 k=1\n0 1.0\n1 2\n")
    assert not pf.exact


@pytest.mark.parametrize("text,line,fragment", [
    ("moments n=1 k=1\n0 1\n0 2\n1 0\n", 3, "duplicate entry (0,) (first on line 2)"),
    ("moments n=2 k=1\n0 0 1\n1 0 1\n", 3, "missing moments: 0 1"),
    ("moments n=1 k=1\n0 1\n2 1\n", 3, "degree above"),
    ("moments n=1 k=1\n0 1\n-1 1\n", 3, "negative exponent"),
    ("moments n=1 k=1\n0 1\n1 abc\n", 3, "not a number"),
    ("moments n=1 k=1\n0 1\n1\n", 3, "expected 1 exponents"),
    ("bogus header\n", 1, "header"),
])
def test_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(FileFormatError) as exc:
        parse_problem(text, "f.txt")
    assert exc.value.line == line
    assert str(exc.value).startswith(f"f.txt:{line}:")
    assert fragment in str(exc.value)


def test_empty_file():
    with pytest.raises(FileFormatError):
        parse_problem("# nothing\n")


def test_polynomial_only_file():
    pf = parse_problem("polynomials n=2\nobjective\n1 1 1\nconstraint\n2 0 -1\n")
    assert pf.k is None and pf.objective == {(1, 1): 1}
    with pytest.raises(FileFormatError):
        pf.sequence()


def test_format_number():
    assert format_number(Fraction(3, 4)) == "3/4"
    assert format_number(Fraction(4)) == "4"
    assert format_number(2.0) == "2"
    assert format_number(0.1) == "0.1"


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(0, 3), st.integers(0, 2 ** 31))
def test_sequence_roundtrip(n, k, seed):
    rng = np.random.default_rng(seed)
    from truncmoment.core import basis_size
    y = MomentSequence(n, k, rng.normal(size=basis_size(n, k)) * 10 ** rng.uniform(-5, 5))
    back = parse_problem(format_sequence(y)).sequence()
    assert np.array_equal(back.values, y.values)


def test_sequence_with_constraint_roundtrip():
    y = MomentSequence(2, 2, [1, 0, 0, 1, 0, 1])
    q = Polynomial(2, {(0, 1): 1.0, (2, 0): -1.0})
    pf = parse_problem(format_sequence(y, q))
    assert pf.constraint == {(0, 1): 1, (2, 0): -1}


def test_measure_roundtrip(rng):
    mu = AtomicMeasure(rng.normal(size=(4, 3)), rng.uniform(0.1, 1.0, 4))
    back = parse_measure(format_measure(mu), 3)
    assert np.array_equal(back.atoms, mu.atoms) and np.array_equal(back.weights, mu.weights)


@pytest.mark.parametrize("text,fragment", [
    ("0 1 2\n", "weight must be positive"),
    ("1 1 2\n1 1\n", "inconsistent dimension"),
    ("", "no atoms"),
    ("1\n", "weight and at least one"),
])
def test_measure_errors(text, fragment):
    with pytest.raises(FileFormatError) as exc:
        parse_measure(text)
    assert fragment in str(exc.value)


def test_measure_dimension_check():
    with pytest.raises(FileFormatError):
        parse_measure("1 0 0\n", n=3)
