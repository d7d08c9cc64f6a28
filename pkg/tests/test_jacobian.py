import dataclasses
from fractions import Fraction

import numpy as np
import pytest

from cjl.algebra import CC, GF, QQ, HomogeneousPoly, Matrix, UniPoly, fermat, hom_eval
from cjl.curvespace import ChartKind, PolarChart, base_gradient
from cjl.incidence import Pullbacks, build_config, sample_incidence, sample_plane
from cjl.jacobian import (assemble_A, assemble_with_escalation, block_column_order, det3_value,
                          extract_blocks, fermat_scan, function_labels, random_tpoints, rank_A,
                          reduced_matrices, structure_check, tangent_dim)
from cjl.rng import make_rng

F2 = HomogeneousPoly.monomial(QQ, (1, 1, 1, 1, 1))


@pytest.fixture(scope="module", params=[1, 2, 3])
def instance(request):
    d = request.param
    rng = make_rng(20 + d)
    point = sample_incidence(d, rng)
    plane, _ = sample_plane(point, rng)
    cfg = build_config(point, plane, rng)
    return point, plane, cfg


def test_labels_and_block_order():
    assert len(function_labels(1)) == 10
    order = block_column_order(ChartKind.PRIME, 2)
    assert len(order) == 15 and order[-7:] == [("theta", 0, 0), ("theta", 1, 0), ("r", 0), ("r", 1),
                                                ("r", 2), ("r", 3), ("xi",)]


def test_d1_matrix_is_square_with_six_points(instance):
    point, plane, cfg = instance
    A = assemble_A(point, plane, cfg)
    d = point.degree
    assert A.matrix.shape == (5 * d + 5, 5 * d + 5)
    assert len(A.points) == 5 * d + 1
    blocks = extract_blocks(A)
    n = 5 * d - 2
    assert [b.shape for b in blocks] == [(n, n), (n, 7), (7, n), (7, 7)]


def test_f2_gradient_matches_closed_form_and_finite_differences():
    rng = make_rng(4)
    d = 2
    leads = tuple(complex(*rng.normal(size=2)) for _ in range(5))
    roots = tuple(tuple(complex(*rng.normal(size=2)) for _ in range(d)) for _ in range(5))
    ch = PolarChart(CC, leads, roots)
    t = 0.4 - 0.3j
    g = base_gradient(ch, F2, t)
    f2 = np.prod([ch.component(i, t) for i in range(5)])
    for i in range(5):
        for j in range(d):
            assert abs(g[i * d + j] + f2 / (t - roots[i][j])) <= 1e-12 * abs(f2)
    x0 = [r for rs in roots for r in rs] + list(leads)

    def value(x):
        c = PolarChart(CC, tuple(x[5 * d:]), tuple(tuple(x[i * d:(i + 1) * d]) for i in range(5)))
        return hom_eval(F2.to_domain(CC), c.point(t))

    for k in range(len(x0)):
        h = 1e-6 * max(1.0, abs(x0[k]))
        xp, xm = list(x0), list(x0)
        xp[k] += h
        xm[k] -= h
        fd = (value(xp) - value(xm)) / (2 * h)
        assert abs(fd - g[k]) <= 1e-6 * max(abs(v) for v in g)


def test_structure_passes_on_sampled_instance(instance):
    rep = structure_check(assemble_A(*instance))
    assert rep.passed and rep.margin > 0


def test_structure_fails_on_misordered_columns(instance):
    A = assemble_A(*instance)
    n = A.matrix.ncols
    perm = list(range(n))
    perm[0], perm[n - 1] = perm[n - 1], perm[0]
    bad = dataclasses.replace(A, matrix=A.matrix.submatrix(range(A.matrix.nrows), perm),
                              col_labels=tuple(A.col_labels[k] for k in perm))
    assert not structure_check(bad).passed


def test_diagonal_is_minus_t_derivative_of_f3(instance):
    # at a root of c0 c1 c2 h, the entry for that root equals -(d/dt) f3(c(t))
    point, plane, cfg = instance
    A = assemble_A(point, plane, cfg)
    pb = Pullbacks.of(plane, point.curve)
    f3 = pb.values[1] * A.chart.delta1 + pb.values[2] * A.chart.delta2
    df3 = f3.derivative()
    A11 = extract_blocks(A)[0]
    for k in range(A11.nrows):
        role = cfg.roles[2 + k]
        want = -df3(A.points[2 + k])
        assert A.col_labels[k] == role
        assert abs(A11[k, k] - want) <= 1e-7 * abs(want)


def test_rank_full_and_chart_invariant(instance):
    point, plane, cfg = instance
    d = point.degree
    r1 = rank_A(assemble_A(point, plane, cfg, ChartKind.PRIME))
    r2 = rank_A(assemble_A(point, plane, cfg, ChartKind.DOUBLE_PRIME))
    assert r1.full and r1.rank == 5 * d + 5
    assert r2.rank == r1.rank


def test_duplicate_point_makes_rank_deficient(instance):
    point, plane, cfg = instance
    k = cfg.roles.index(next(r for r in cfg.roles if r[0] == "eps"))
    dup = dataclasses.replace(cfg, points=cfg.points[:-1] + (cfg.points[k],))
    rep = rank_A(assemble_A(point, plane, dup))
    assert not rep.full and rep.rank < 5 * point.degree + 5


def test_rank_report_on_plain_matrix():
    assert rank_A(Matrix(CC, np.eye(7).tolist())).rank == 7
    M = np.eye(4)
    M[3] = M[2]
    assert rank_A(Matrix(CC, M.tolist())).verdict == "DEFICIENT"


def test_escalation_reports_level(instance):
    A, k = assemble_with_escalation(*instance, accept=lambda A: False, max_escalations=1)
    assert k == 1 and A.matrix.domain.prec == 106
    assert structure_check(A).passed


def test_reduced_matrices_identity(instance):
    A = assemble_A(*instance, kind=ChartKind.DOUBLE_PRIME)
    red = reduced_matrices(A)
    assert red.B.shape == (6, 6) and red.M4.shape == (4, 4)
    assert red.identity_residual <= 1e-9
    assert red.lam != 0


def test_reduced_matrices_need_double_prime_chart(instance):
    with pytest.raises(ValueError):
        reduced_matrices(assemble_A(*instance))


def test_det3_fermat_worked_example():
    c = [UniPoly(QQ, cs) for cs in ([1], [1], [0, 1], [1, 1], [-1, 1])]
    p1 = [x(Fraction(0)) for x in c]
    p2 = [x(Fraction(1)) for x in c]
    assert det3_value(fermat(QQ), p1, p2) == 750
    assert det3_value(fermat(GF(10007)), p1, p2, GF(10007)) == GF(10007).convert(750)


def test_det3_vanishes_for_proportional_components():
    c = [UniPoly(QQ, cs) for cs in ([1, 2], [3, 1], [0, 1], [0, 2], [0, 3])]
    assert det3_value(fermat(QQ), [x(Fraction(2)) for x in c], [x(Fraction(5)) for x in c]) == 0


def test_det3_vanishes_without_z2_z3_z4():
    f = HomogeneousPoly.monomial(QQ, (5, 0, 0, 0, 0))
    assert det3_value(f, [1, 2, 3, 4, 5], [5, 1, 2, 7, 1]) == 0


def test_fermat_scan_prime_field():
    scan = fermat_scan(2, 200, make_rng(1), GF())
    assert scan.nonzero == scan.trials == 200


@pytest.mark.parametrize("d", [1, 2])
def test_tangent_dimension_six(d):
    rng = make_rng(30 + d)
    point = sample_incidence(d, rng)
    plane, _ = sample_plane(point, rng)
    rep = tangent_dim(point, plane, random_tpoints(d, rng, QQ, point.curve))
    assert (rep.kernel_dim, rep.rank, rep.nrows) == (6, 5 * d - 1, 5 * d - 1)


def test_tangent_dimension_prime_field_matches_rational():
    rng = make_rng(40)
    point = sample_incidence(1, rng)
    plane, _ = sample_plane(point, rng)
    rep = tangent_dim(point, plane, random_tpoints(1, rng, GF(), point.curve), GF())
    assert rep.kernel_dim == 6
