from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cjl.algebra import QQ, HomogeneousPoly, fermat
from cjl.curvespace import RationalCurve
from cjl.incidence import IncidencePoint, quintics_through, sample_incidence
from cjl.normalbundle import (BinaryForm, GradedMap, SingularCurveError, _mult_matrix, check_jf,
                              homogenize, immersion_check, infer_from_h1, jf_kernel, jf_row,
                              normal_sheaf, serre_dual_h1, torsion_length)
from cjl.rng import make_rng, rand_int


def curve(d, *coeffs):
    return RationalCurve.from_coeffs(QQ, d, coeffs)


FERMAT_LINE = IncidencePoint(curve(1, [1], [-1], [0, 1], [0, -1], []), fermat(QQ))


def test_homogenize_examples():
    assert homogenize(curve(2, [-1, 0, 1], [0, 1], [1], [1], [1]))[0].coeffs == (-1, 0, 1)
    assert homogenize(curve(2, [0, 1], [1], [0, 0, 1], [1], [1]))[0].coeffs == (0, 1, 0)


@given(st.lists(st.lists(st.integers(-9, 9), min_size=4, max_size=4), min_size=5, max_size=5),
       st.fractions(-5, 5, max_denominator=5))
@settings(max_examples=30, deadline=None)
def test_homogenize_roundtrip_at_s_equal_one(coeffs, t):
    coeffs[0][3] = coeffs[0][3] or 1
    try:
        c = curve(3, *coeffs)
    except ValueError:
        return
    for C, comp in zip(homogenize(c), c.components):
        assert C.dehomogenize() == comp
        assert C(Fraction(1), t) == comp(t)


def test_binary_form_derivatives():
    f = BinaryForm(QQ, 3, [1, 2, 0, 5])  # s^3 + 2 s^2 t + 5 t^3
    assert f.ds().coeffs == (3, 4, 0)
    assert f.dt().coeffs == (2, 0, 15)
    with pytest.raises(ValueError):
        BinaryForm(QQ, 1, [1, 2, 3])


def test_graded_map_checks_entry_degrees():
    e = BinaryForm(QQ, 2, [1, 0, 1])
    GradedMap(QQ, (0,), (2,), ((e,),))
    with pytest.raises(ValueError):
        GradedMap(QQ, (1,), (2,), ((e,),))


@pytest.fixture(scope="module", params=[1, 2])
def sampled(request):
    return sample_incidence(request.param, make_rng(50 + request.param))


def _apply(J, v):
    acc = J[0] * v[0]
    for a, b in zip(J[1:], v[1:]):
        acc = acc + a * b
    return acc


def test_euler_and_t_derivative_columns_lie_in_kernel(sampled):
    J = jf_row(sampled)
    C = homogenize(sampled.curve)
    assert _apply(J, C).is_zero()
    assert _apply(J, [x.dt() for x in C]).is_zero()
    assert _apply(J, [x.ds() for x in C]).is_zero()


def test_kernel_presentation_rank_four_degree_zero(sampled):
    K = jf_kernel(sampled)
    assert len(K.source) == 4 and sum(K.source) == 0
    J = jf_row(sampled)
    for i in range(4):
        assert _apply(J, K.column(i)).is_zero()


def test_sampled_normal_bundle_is_balanced(sampled):
    S = normal_sheaf(sampled)
    assert S.degrees == (-1, -1) and S.torsion == 0 and S.h1[0] == 0
    assert S.total_degree == -2 and S.riemann_roch_ok()
    assert serre_dual_h1(jf_kernel(sampled)) == 0
    assert infer_from_h1(S.total_degree, S.h1[0]).degrees == S.degrees
    assert immersion_check(sampled.curve)[0]


def test_fermat_line_golden():
    S = normal_sheaf(FERMAT_LINE)
    assert S.degrees == (1, -3)
    assert S.torsion == 0 and S.total_degree == -2
    assert S.h1[0] == 2 and S.h0[0] == 2
    assert S.riemann_roch_ok()
    assert sorted(jf_kernel(FERMAT_LINE).source) == [-3, 1, 1, 1]
    assert serre_dual_h1(jf_kernel(FERMAT_LINE)) == 2
    assert infer_from_h1(-2, 2).degrees == S.degrees


def test_fermat_line_h1_against_sympy_rank():
    # h1(N) = (5d + 1) - rank of multiplication by JF in degree d
    J = jf_row(FERMAT_LINE)
    M = _mult_matrix(J, 1, QQ)
    r = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in M.rows]).rank()
    assert 6 - r == 2


def test_singular_locus_rejected():
    # z0^2 * (anything) is singular along z0 = 0, which contains this line
    c = curve(1, [], [1], [0, 1], [1, 1], [2, 1])
    f = HomogeneousPoly.monomial(QQ, (2, 1, 1, 1, 0))
    p = IncidencePoint(c, f)
    with pytest.raises(SingularCurveError):
        check_jf(jf_row(p))


@pytest.mark.parametrize("d,coeffs,immersed,tau", [
    (4, ([1], [0, 1], [0, 0, 1], [0, 0, 0, 1], [0, 0, 0, 0, 1]), True, 0),
    (5, ([1], [0, 0, 1], [0, 0, 0, 1], [0, 0, 0, 0, 1], [0, 0, 0, 0, 0, 1]), False, 1),
    (6, ([1], [0, 0, 0, 1], [0, 0, 0, 0, 1], [0, 0, 0, 0, 0, 1], [0, 0, 0, 0, 0, 0, 1]), False, 2),
    (3, ([0, 0, 0, 1], [0, 1], [1], [1, 0, 0, 1], [1, 1]), False, 1),
])
def test_immersion_and_torsion(d, coeffs, immersed, tau):
    c = curve(d, *coeffs)
    ok, (g, inf) = immersion_check(c)
    assert ok == immersed
    assert g.degree + inf == tau
    assert torsion_length(c) == tau


def test_cusp_on_a_quintic():
    c = curve(5, [1], [0, 0, 1], [0, 0, 0, 1], [0, 0, 0, 0, 1], [0, 0, 0, 0, 0, 1])
    rng = make_rng(0)
    f = HomogeneousPoly(QQ, 5)
    for b in quintics_through(c):
        f = f + b * rand_int(rng, -5, 5)
    p = IncidencePoint(c, f)
    S = normal_sheaf(p)
    assert S.torsion == 1 and not immersion_check(c)[0]
    assert S.total_degree == -2 and S.riemann_roch_ok()
    assert S.h1[0] == serre_dual_h1(jf_kernel(p))


@pytest.mark.parametrize("h1,degrees", [(0, (-1, -1)), (2, (1, -3)), (1, (0, -2))])
def test_infer_from_h1_examples(h1, degrees):
    assert infer_from_h1(-2, h1).degrees == degrees


def test_infer_from_h1_rejects_negative():
    with pytest.raises(ValueError):
        infer_from_h1(-2, -1)


@given(st.integers(0, 6))
def test_infer_from_h1_matches_line_bundle_cohomology(h1):
    S = infer_from_h1(-2, h1)
    assert sum(S.degrees) == -2
    assert S.predicted_h1(0) == h1
