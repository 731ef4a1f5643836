from fractions import Fraction
import time

import numpy as np
import pytest

from oracles import is_pd_sympy, psi_sympy
from truncmoment.core import PreconditionError, moment_matrix
from truncmoment.curve_psi import (GAMMA, CubicCurveMoments, CurveVerdict, build_cubic_curve, compression,
                                   compression_is_pd, curve_approx_sequence, curve_measure_test, curve_witness,
                                   extension_candidate, extension_schur, psi, psi_band, s_window, t_floor,
                                   verify_curve_witness)
from truncmoment.fixtures import PSI_BOUNDARY, load_fixture
from truncmoment.symlin import Definiteness, psd_status

BIG_T = 12 * 10 ** 9


@pytest.fixture(scope="module")
def variant():
    return load_fixture("curve_boundary").curve


def _gamma(m):
    return {k: Fraction(v) for k, v in m.gamma().items()}


def test_grid_matches_moment_matrix(variant):
    # the letter layout equals M3 of the degree-6 sequence
    y = variant.to_sequence()
    np.testing.assert_allclose(build_cubic_curve(variant).entries, moment_matrix(y).entries)


def test_from_sequence_roundtrip(variant):
    m, y00 = CubicCurveMoments.from_sequence(variant.to_sequence(3.0))
    assert y00 == 3.0
    assert m.values["k"] == pytest.approx(float(variant.values["k"]))


def test_from_sequence_rejects_broken_relation(variant):
    y = variant.to_sequence().replace({(3, 0): 0.5})
    with pytest.raises(PreconditionError):
        CubicCurveMoments.from_sequence(y)


def test_unknown_letter():
    with pytest.raises(ValueError):
        CubicCurveMoments({"z": 1})


def test_psi_matches_oracle(variant):
    ref, J = psi_sympy(_gamma(variant))
    assert ref == PSI_BOUNDARY
    assert psi(variant, exact=True) == ref


def test_psi_float_relative_error(variant):
    val = psi(variant, exact=False)
    assert abs(val - float(PSI_BOUNDARY)) <= 1e-9 * float(PSI_BOUNDARY)


def test_psi_exact_is_fast(variant):
    t0 = time.perf_counter()
    psi(variant, exact=True)
    assert time.perf_counter() - t0 < 1.0


def test_compression_pd_agrees_with_oracle(variant):
    _, J = psi_sympy(_gamma(variant))
    assert compression_is_pd(variant, exact=True) == is_pd_sympy(J) is True
    low = variant.with_values(t=variant.t - 10 ** 6)
    _, J2 = psi_sympy(_gamma(low))
    assert compression_is_pd(low, exact=True) == is_pd_sympy(J2) is False


def test_base_data_is_indefinite():
    m = load_fixture("curve_catalan").curve
    assert not compression_is_pd(m, exact=True)
    assert psd_status(build_cubic_curve(m).entries).status is Definiteness.INDEFINITE
    with pytest.raises(PreconditionError):
        psi(m)


@pytest.mark.parametrize("ds,t,expect", [
    (0, None, CurveVerdict.BOUNDARY),
    (-1, None, CurveVerdict.NO_MEASURE),
    (1, BIG_T, CurveVerdict.HAS_MEASURE),
])
def test_curve_verdicts(variant, ds, t, expect):
    m = variant.with_values(s=PSI_BOUNDARY + ds, **({} if t is None else {"t": t}))
    assert curve_measure_test(m)[0] is expect
    mf = CubicCurveMoments({c: float(v) for c, v in m.values.items()})
    assert curve_measure_test(mf)[0] is expect


def test_psi_band_scales_with_psi():
    assert psi_band(1e6) == pytest.approx(1e-8 * (1 + 1e6))


def test_t_floor_and_window(variant):
    floor = t_floor(variant)
    assert 11319100142 < floor < 11319100143
    assert compression_is_pd(variant.with_values(t=11319100143), exact=True)
    assert not compression_is_pd(variant.with_values(t=11319100142), exact=True)
    w = s_window(variant)
    assert 2e-5 < w < 4e-5
    inside = variant.with_values(s=PSI_BOUNDARY + Fraction(1, 10 ** 5))
    outside = variant.with_values(s=PSI_BOUNDARY + Fraction(1, 10 ** 4))
    assert compression_is_pd(inside, exact=True) and not compression_is_pd(outside, exact=True)


def test_extension_schur_is_y44_minus_psi(variant):
    for y44 in (PSI_BOUNDARY, PSI_BOUNDARY + Fraction(1, 2), PSI_BOUNDARY + 7):
        assert extension_schur(variant, y44) == y44 - PSI_BOUNDARY
    assert len(extension_candidate(variant, PSI_BOUNDARY)) == 10


def test_approx_sequence_at_larger_t(variant):
    m = variant.with_values(t=BIG_T)
    steps = curve_approx_sequence(m, [10, 100, 1000])
    assert [s.verdict for s in steps] == [CurveVerdict.HAS_MEASURE] * 3
    assert [s.deviation for s in steps] == [Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000)]
    assert all(psi(s.moments) == PSI_BOUNDARY for s in steps)


def test_approx_sequence_window_flag(variant):
    steps = curve_approx_sequence(variant, [10, 10 ** 5])
    assert [s.in_window for s in steps] == [False, True]
    assert steps[1].verdict is CurveVerdict.HAS_MEASURE
    with pytest.raises(ValueError):
        curve_approx_sequence(variant, [0])


def test_curve_witness_reproduces_data(variant):
    m = variant.with_values(s=PSI_BOUNDARY + 1, t=BIG_T)
    mu = curve_witness(m)
    assert np.allclose(mu.atoms[:, 1], mu.atoms[:, 0] ** 3)
    assert verify_curve_witness(m, mu).passed


def test_curve_witness_refuses_boundary(variant):
    with pytest.raises(PreconditionError):
        curve_witness(variant)


def test_gamma_map_is_injective():
    assert len(set(GAMMA.values())) == len(GAMMA)


def test_point_mass_at_origin_has_rank_one():
    m = CubicCurveMoments({})
    assert np.linalg.matrix_rank(build_cubic_curve(m).entries) == 1


def test_psi_at_most_omega(variant):
    from truncmoment.curve_psi import psi_report
    rep = psi_report(variant, exact=True)
    assert rep.eps > 0 and rep.psi <= rep.omega


def test_midpoint_extension_is_positive(variant):
    m = variant.with_values(s=PSI_BOUNDARY + 1, t=BIG_T)
    mid = (PSI_BOUNDARY + m.s) / 2
    assert extension_schur(m, mid) > 0
    from truncmoment.curve_psi import _is_pd_exact
    assert _is_pd_exact(extension_candidate(m, mid))


def test_empty_m_list(variant):
    assert curve_approx_sequence(variant, []) == []
