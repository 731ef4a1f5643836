import numpy as np
import pytest

from conftest import random_measure
from truncmoment.core import (AtomicMeasure, DimensionError, MomentSequence, NoMeasureError, Status, eval_poly,
                              moment_matrix, moments_of_measure, verify_measure)
from truncmoment.fixtures import definite_quartic_instance, load_fixture, ones_twos_instance, quartic_ab_instance
from truncmoment.quartic import (FlatExtension, column_relations, cubic_solve, decide_quartic, decide_univariate,
                                 directions_at_infinity, extract_atoms, flat_search, quartic_approx, recursive_check,
                                 variety_count, variety_of)
from truncmoment.core import Polynomial


def _poly(d):
    return Polynomial(2, {k: float(v) for k, v in d.items()})


# -- relations and varieties ----------------------------------------------------


def test_column_relations_of_three_points():
    mu = AtomicMeasure([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [1.0, 1.0, 1.0])
    M = moment_matrix(moments_of_measure(mu, 4))
    rels = column_relations(M)
    assert len(rels) == 3
    for p in rels:
        for u in mu.atoms:
            assert abs(eval_poly(p, u)) < 1e-8


def test_recursive_check_passes_on_measure_data(rng):
    mu = random_measure(rng, 2, 4)
    assert recursive_check(moment_matrix(moments_of_measure(mu, 4))).passed


def test_recursive_check_reports_violation():
    fx = load_fixture("quartic_ones_twos")
    rc = recursive_check(moment_matrix(fx.sequence))
    assert not rc.passed
    p, q = rc.violation
    assert {a: round(c, 9) for a, c in p.coeffs.items() if abs(c) > 1e-12} == {(1, 0): 1.0, (0, 0): -1.0}
    assert q.degree == 1


def test_variety_of_line_and_circle():
    line = _poly({(1, 0): 1, (0, 1): -1})
    circle = _poly({(2, 0): 1, (0, 2): 1, (0, 0): -1})
    v = variety_of([line, circle])
    assert v.kind == "Finite" and v.card == 2
    np.testing.assert_allclose(np.sort(np.abs(v.points[:, 0])), [2 ** -0.5] * 2, atol=1e-9)


def test_variety_of_two_conics_four_points():
    p = _poly({(2, 0): 1, (0, 0): -1})
    q = _poly({(0, 2): 1, (0, 0): -4})
    v = variety_of([p, q])
    assert v.card == 4
    assert {tuple(np.round(np.abs(u), 9)) for u in v.points} == {(1.0, 2.0)}


def test_variety_single_conic():
    assert variety_of([_poly({(2, 0): 1, (0, 2): 1, (0, 0): -1})]).kind == "Infinite"
    assert variety_of([_poly({(2, 0): 1, (0, 2): 1, (0, 0): 1})]).kind == "Empty"
    pt = variety_of([_poly({(2, 0): 1, (0, 2): 1})])
    assert pt.kind == "Finite" and pt.card == 1


def test_variety_count_needs_bivariate_m2():
    with pytest.raises(DimensionError):
        variety_count(moment_matrix(MomentSequence(1, 4, [1, 0, 1, 0, 3])))


# -- univariate -------------------------------------------------------------------


def test_univariate_definite_and_singular(rng):
    mu = AtomicMeasure([[-1.0], [0.5], [2.0]], [1.0, 2.0, 0.5])
    for k in (4, 6):
        v = decide_univariate(moments_of_measure(mu, k))
        assert v.status is Status.MEASURE_CONSTRUCTED
        assert verify_measure(moments_of_measure(mu, k), v.measure).passed


def test_univariate_not_recursive():
    v = decide_univariate(load_fixture("univariate_nonrecursive").sequence)
    assert v.status is Status.NO_MEASURE and v.diagnostics["recursive"] is False


def test_univariate_indefinite():
    assert decide_univariate(MomentSequence(1, 2, [1.0, 2.0, 1.0])).status is Status.NO_MEASURE


# -- flat extensions ------------------------------------------------------------------


def test_extract_atoms_from_known_flat(rng):
    mu = random_measure(rng, 2, 3)
    y = moments_of_measure(mu, 4)
    got = extract_atoms(FlatExtension(y, 1, 3))
    assert len(got) == 3
    assert verify_measure(y, got).passed


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_flat_search_six_atoms(seed):
    mu = random_measure(np.random.default_rng(seed), 2, 6)
    y = moments_of_measure(mu, 4)
    flat = flat_search(y, seed=0)
    assert flat is not None and flat.rank == 6
    got = extract_atoms(flat)
    assert len(got) == 6 and verify_measure(y, got).passed


# -- quartic decisions ---------------------------------------------------------------


def test_quartic_singular_rank_exceeds_variety():
    v = decide_quartic(load_fixture("quartic_rank_gap").sequence)
    assert v.status is Status.NO_MEASURE
    assert v.diagnostics["rank"] == 4 and v.diagnostics["card"] == 3 and v.diagnostics["recursive"]
    assert any("rank 4 > card V = 3" in c for c in v.certificate)


def test_quartic_a_b_pattern():
    assert quartic_ab_instance(1.0, 3.0).values[0] == 8.0
    v = decide_quartic(definite_quartic_instance(10))
    assert v.status in (Status.MEASURE_CONSTRUCTED, Status.EXISTS_NONCONSTRUCTIVE)
    if v.measure is not None:
        assert verify_measure(definite_quartic_instance(10), v.measure).passed


def test_quartic_measure_on_few_points(rng):
    mu = random_measure(rng, 2, 3)
    y = moments_of_measure(mu, 4)
    v = decide_quartic(y)
    assert v.status is Status.MEASURE_CONSTRUCTED and verify_measure(y, v.measure).passed


def test_quartic_indefinite():
    y = moments_of_measure(AtomicMeasure([[1.0, 0.0]], [1.0]), 4).replace({(0, 0): -1.0})
    assert decide_quartic(y).status is Status.NO_MEASURE


# -- cubic -----------------------------------------------------------------------------


@pytest.mark.parametrize("r", [1, 2, 3, 5])
def test_cubic_round_trip(r, rng):
    mu = random_measure(rng, 2, r)
    y = moments_of_measure(mu, 3)
    v = cubic_solve(y)
    assert v.status is Status.MEASURE_CONSTRUCTED
    assert verify_measure(y, v.measure).passed


@pytest.mark.parametrize("r", [1, 2])
def test_cubic_range_violation(r, rng):
    y = moments_of_measure(random_measure(rng, 2, r), 3)
    bad = y.replace({(3, 0): y[(3, 0)] + 0.5, (0, 3): y[(0, 3)] - 0.25})
    assert cubic_solve(bad).status is Status.NO_MEASURE


# -- approximation -----------------------------------------------------------------------


def test_directions_at_infinity_single_direction():
    r = np.array([1.0, 1.0, 1.0, 1.0, 1.0])
    out = directions_at_infinity(r)
    assert len(out) == 1
    c, w = out[0]
    assert c == pytest.approx(1.0) and np.allclose(w, [1.0, 1.0])


def test_directions_at_infinity_impossible():
    assert directions_at_infinity(np.array([1.0, 0.0, -1.0, 0.0, 1.0])) is None


@pytest.mark.parametrize("eps", [1 / 16, 1 / 256])
def test_ones_twos_approximation(eps):
    y = load_fixture("quartic_ones_twos").sequence
    step = quartic_approx(y, eps)
    ref, wit = ones_twos_instance(eps)
    np.testing.assert_allclose(step.perturbed.values, ref.values, atol=1e-12, rtol=0)
    assert verify_measure(ref, step.witness).max_abs_deviation <= 1e-12
    assert step.deviation == pytest.approx(eps ** 0.25 - eps)


def test_quartic_approx_rank_exceeds_variety():
    y = load_fixture("quartic_rank_gap").sequence
    step = quartic_approx(y, 1 / 16)
    assert verify_measure(step.perturbed, step.witness).passed
    assert step.deviation <= 1.0


def test_quartic_approx_rejects_indefinite():
    y = moments_of_measure(AtomicMeasure([[1.0, 0.0]], [1.0]), 4).replace({(4, 0): -3.0})
    with pytest.raises(NoMeasureError):
        quartic_approx(y, 0.1)


def test_constructed_atoms_lie_on_variety(rng):
    mu = random_measure(rng, 2, 4)
    y = moments_of_measure(mu, 4)
    v = decide_quartic(y)
    assert v.status is Status.MEASURE_CONSTRUCTED
    M = moment_matrix(y)
    assert len(v.measure) >= v.diagnostics["rank"]
    scale = 1 + np.abs(y.values).max()
    for p in column_relations(M):
        for u in v.measure.atoms:
            assert abs(eval_poly(p, u)) <= 1e-6 * scale


def test_variety_points_do_not_fit_rank_gap_data():
    from truncmoment.quartic import _fit_on_points
    from truncmoment.core import DEFAULT_TOL
    y = load_fixture("quartic_rank_gap").sequence
    var = variety_count(moment_matrix(y))
    assert var.card == 3
    assert _fit_on_points(y, var.points, DEFAULT_TOL) is None
