from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cjl.algebra import CC, QQ, HomogeneousPoly, Matrix, fermat, monomials, pullback, rank
from cjl.curvespace import RationalCurve
from cjl.incidence import (IncidencePoint, Pullbacks, build_config, f3_root_residual, forms_through,
                           pair_determinant, quintics_through, random_curve, sample_incidence,
                           sample_plane, select_t12, special_plane, weights)
from cjl.rng import make_rng
from cjl.serialize import dumps_incidence

DATA = Path(__file__).parent / "data"
Z1Z2 = HomogeneousPoly.monomial(QQ, (0, 1, 1, 0, 0))


def test_dimension_of_quintics_through_generic_line_and_conic():
    rng = make_rng(0)
    assert len(quintics_through(random_curve(1, rng))) == 120
    assert len(quintics_through(random_curve(2, rng))) == 115


def test_fermat_quintic_in_span_for_its_line():
    c = RationalCurve.from_coeffs(QQ, 1, [[0, 1], [0, -1], [1], [-1], []])
    basis = quintics_through(c)
    mons = monomials(5)
    rows = [[b.coefficient(m) for m in mons] for b in basis]
    F = fermat(QQ)
    assert rank(Matrix(QQ, rows + [[F.coefficient(m) for m in mons]])) == len(basis)


def test_forms_through_vanish_exactly():
    c = random_curve(2, make_rng(3))
    for Q in forms_through(c, 2):
        assert pullback(Q, c.components).is_zero()


def test_incidence_point_checks_vanishing():
    c = random_curve(1, make_rng(5))
    with pytest.raises(ValueError):
        IncidencePoint(c, fermat(QQ))


@given(st.integers(1, 3), st.integers(0, 2**20))
@settings(max_examples=8, deadline=None)
def test_sampled_pullback_is_identically_zero(d, seed):
    p = sample_incidence(d, make_rng(seed))
    assert not p.quintic.is_zero()
    assert pullback(p.quintic, p.curve.components).is_zero()


def test_golden_sample_d1_seed42():
    p = sample_incidence(1, make_rng(42))
    assert dumps_incidence(p) == (DATA / "incidence_d1_seed42.txt").read_text()


def test_special_plane_shapes():
    f0 = sample_incidence(1, make_rng(1)).quintic
    pl = special_plane(f0, Z1Z2)
    assert pl.f1 == HomogeneousPoly.monomial(QQ, (1, 2, 2, 0, 0))
    assert pl.f2 == HomogeneousPoly.monomial(QQ, (1, 1, 1, 1, 1))
    with pytest.raises(ValueError):
        special_plane(HomogeneousPoly.monomial(QQ, (1, 1, 1, 1, 1)), Z1Z2)


@pytest.fixture(scope="module", params=[1, 2, 3])
def sampled(request):
    d = request.param
    rng = make_rng(10 + d)
    point = sample_incidence(d, rng)
    plane, ab = sample_plane(point, rng)
    return point, plane, ab, rng


def test_weights_factor_through_pencil_determinant(sampled):
    # on c, f0 = -a f1 - b f2, so delta1 = -a D and delta2 = -b D with D = |f1 f2|
    point, plane, (a, b), _ = sampled
    pb = Pullbacks.of(plane, point.curve)
    t1, t2 = 0.3 + 0.7j, -1.1 + 0.2j
    d1, d2 = weights(plane.to_domain(CC), pb, t1, t2)
    g, k = [pb.value(l, t1) for l in range(3)], [pb.value(l, t2) for l in range(3)]
    D = g[1] * k[2] - g[2] * k[1]
    assert abs(d1 + a * D) <= 1e-9 * abs(a * D)
    assert abs(d2 + b * D) <= 1e-9 * abs(b * D)


def test_constrained_t12_collapses_weights(sampled):
    point, plane, _, rng = sampled
    t1, t2 = select_t12(point.curve, plane, rng)
    pb = Pullbacks.of(plane, point.curve)
    val, scale = pair_determinant(plane.to_domain(CC), pb, t1, t2)
    assert abs(val) <= 1e-9 * scale
    d1, d2 = weights(plane.to_domain(CC), pb, t1, t2)
    vals = [abs(pb.value(l, t)) for l in range(3) for t in (t1, t2)]
    assert max(abs(d1), abs(d2)) <= 1e-8 * max(vals) ** 2


def test_configuration_counts_and_distinct(sampled):
    point, plane, _, rng = sampled
    cfg = build_config(point, plane, rng)
    d = point.degree
    assert len(cfg.points) == 5 * d + 1
    pts = np.array(cfg.points)
    gaps = np.abs(pts[:, None] - pts[None, :]) + np.eye(len(pts))
    assert gaps.min() > 1e-8
    assert cfg.delta1 != 0 and cfg.delta2 != 0
    assert sum(1 for r in cfg.roles if r[0] == "eps") == 2 * d


def test_f3_roots_are_the_configuration_points(sampled):
    point, plane, _, rng = sampled
    cfg = build_config(point, plane, rng)
    assert f3_root_residual(cfg, point.curve) <= 1e-8


def test_weights_nonzero_on_sampled_points():
    for seed in range(25):
        rng = make_rng(seed, salt=1)
        point = sample_incidence(1, rng)
        plane, _ = sample_plane(point, rng)
        cfg = build_config(point, plane, rng)
        assert abs(cfg.delta1) > 0 and abs(cfg.delta2) > 0
