"""Incidence points (c, f) with f(c(t)) == 0, the special plane of quintics, and
the evaluation-point configuration used to assemble the Jacobian."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from math import lcm

import numpy as np

from .algebra import (CC, QQ, ComplexField, Domain, HomogeneousPoly, Matrix, UniPoly, hom_eval,
                      kernel, monomial_pullbacks, monomials, pullback, pullback_many, rank, uni_eval,
                      uni_roots)
from .curvespace import (ChartError, ChartKind, PolarChart, RationalCurve, derive_chart,
                         is_birational, to_polar)
from .rng import rand_disk, rand_disk_avoiding, rand_int, rand_nonzero_int

QUINTIC = 5
COEFF_HEIGHT = 20
T_RADIUS = 2.0
T_GAP = 1e-3
ROOT_MATCH_TOL = 1e-8


class SamplingError(RuntimeError):
    """A sampler exhausted its resampling budget."""


class ConfigurationError(ValueError):
    """The point configuration is degenerate (vanishing weights, repeated points, ...)."""


@dataclass(frozen=True)
class IncidencePoint:
    """Exact pair (c, f) with the pullback of f along c identically zero."""

    curve: RationalCurve
    quintic: HomogeneousPoly

    def __post_init__(self):
        if not self.curve.domain.exact or self.quintic.domain != self.curve.domain:
            raise ValueError("incidence points are exact and share one domain")
        if self.quintic.degree != QUINTIC or self.quintic.is_zero():
            raise ValueError("f must be a nonzero quintic")
        if not pullback(self.quintic, self.curve.components).is_zero():
            raise ValueError("f does not vanish on c")

    @property
    def degree(self) -> int:
        return self.curve.degree


@dataclass(frozen=True)
class QuinticPlane:
    f0: HomogeneousPoly
    f1: HomogeneousPoly
    f2: HomogeneousPoly
    q: HomogeneousPoly
    special: bool = True

    def __post_init__(self):
        for f in (self.f0, self.f1, self.f2):
            if f.degree != QUINTIC:
                raise ValueError("plane members must be quintics")
        if self.q.degree != 2:
            raise ValueError("q must be a quadric")
        if self.special:
            dom = self.q.domain
            z012 = HomogeneousPoly.monomial(dom, (1, 1, 1, 0, 0))
            if self.f2 != HomogeneousPoly.monomial(dom, (1, 1, 1, 1, 1)) or self.f1 != z012 * self.q:
                raise ValueError("special plane needs f1 = z0 z1 z2 q and f2 = z0 z1 z2 z3 z4")
        if not self.f0.domain.exact:
            return  # independence is certified on the exact plane before lifting
        mons = monomials(QUINTIC)
        M = Matrix(self.f0.domain, [[f.coefficient(m) for m in mons] for f in self.members])
        if rank(M) < 3:
            raise ValueError("f0, f1, f2 are linearly dependent")

    @property
    def members(self) -> tuple[HomogeneousPoly, ...]:
        return (self.f0, self.f1, self.f2)

    def to_domain(self, domain: Domain) -> QuinticPlane:
        return QuinticPlane(*(f.to_domain(domain) for f in (self.f0, self.f1, self.f2, self.q)),
                            special=self.special)


# --------------------------------------------------------------------------
# sampling


def forms_through(c: RationalCurve, k: int) -> list[HomogeneousPoly]:
    """Basis of the degree-k forms vanishing on c (integer-primitive over Q)."""
    dom = c.domain
    if not dom.exact:
        raise ValueError("forms_through needs an exact domain")
    mons = monomials(k)
    pulls = monomial_pullbacks(c.components, k)
    n = k * c.degree + 1
    M = Matrix(dom, [[pulls[m].coeff(i) for m in mons] for i in range(n)])
    K = kernel(M)
    basis = []
    for j in range(K.ncols):
        col = list(K.col(j))
        if dom == QQ:
            den = lcm(*(x.denominator for x in col))
            col = [x * den for x in col]
        basis.append(HomogeneousPoly(dom, k, {m: v for m, v in zip(mons, col) if v != 0}))
    return basis


def quintics_through(c: RationalCurve) -> list[HomogeneousPoly]:
    """Basis of the quintics vanishing on c."""
    return forms_through(c, QUINTIC)


def random_form(k: int, rng: np.random.Generator, domain: Domain = QQ,
                height: int = COEFF_HEIGHT) -> HomogeneousPoly:
    return HomogeneousPoly(domain, k, {m: rand_int(rng, -height, height) for m in monomials(k)})


def random_curve(d: int, rng: np.random.Generator, domain: Domain = QQ,
                 height: int = COEFF_HEIGHT) -> RationalCurve:
    """Five random integer polynomials of degree exactly d (nonzero leading coefficients)."""
    comps = []
    for _ in range(5):
        cs = [rand_int(rng, -height, height) for _ in range(d)] + [rand_nonzero_int(rng, height)]
        comps.append(UniPoly(domain, cs))
    return RationalCurve(d, tuple(comps))


def random_quadric(rng: np.random.Generator, domain: Domain = QQ,
                   height: int = COEFF_HEIGHT) -> HomogeneousPoly:
    return random_form(2, rng, domain, height)


QUADRIC_CUT_MAX_DEGREE = 4


def sample_incidence(d: int, rng: np.random.Generator, height: int = COEFF_HEIGHT,
                     max_tries: int = 100) -> IncidencePoint:
    """Random birational c of degree d and a random integer quintic through it.

    For d <= 4 the curve is a rational normal curve in its span, cut out by
    quadrics, so f = sum_k Q_k C_k (Q_k a basis of quadrics through c, C_k
    random cubics) is a generic element of quintics_through(c) with far smaller
    coefficients than a combination of the echelon basis.  Larger d combines
    the quintic basis directly.
    """
    if d < 1:
        raise ValueError("degree must be >= 1")
    for _ in range(max_tries):
        try:
            c = random_curve(d, rng, QQ, height)
        except ValueError:
            continue
        if not is_birational(c, rng)[0]:
            continue
        basis = quintics_through(c)
        if len(basis) != 125 - 5 * d:
            continue
        f = HomogeneousPoly(QQ, QUINTIC)
        if d <= QUADRIC_CUT_MAX_DEGREE:
            for Q in forms_through(c, 2):
                f = f + Q * random_form(3, rng, QQ, height)
        else:
            for b in basis:
                f = f + b * rand_int(rng, -height, height)
        if f.is_zero():
            continue
        return IncidencePoint(c, f)
    raise SamplingError(f"no incidence point of degree {d} after {max_tries} tries")


def special_plane(f0: HomogeneousPoly, q: HomogeneousPoly) -> QuinticPlane:
    """Plane spanned by f0, f1 = z0 z1 z2 q and f2 = z0 z1 z2 z3 z4."""
    dom = f0.domain
    q = q.to_domain(dom) if q.domain != dom else q
    f1 = HomogeneousPoly.monomial(dom, (1, 1, 1, 0, 0)) * q
    f2 = HomogeneousPoly.monomial(dom, (1, 1, 1, 1, 1))
    return QuinticPlane(f0, f1, f2, q, special=True)


def plane_through(point: IncidencePoint, q: HomogeneousPoly, a, b) -> QuinticPlane:
    """Special plane whose member f0 + a f1 + b f2 is the quintic of ``point``.

    The curve then lies on a member of the plane but on none of the pencils
    span(f0, f1), span(f0, f2) as long as a, b != 0.
    """
    if a == 0 or b == 0:
        raise ValueError("shift coefficients must be nonzero")
    base = special_plane(point.quintic, q)
    return special_plane(point.quintic - base.f1 * a - base.f2 * b, q)


def sample_plane(point: IncidencePoint, rng: np.random.Generator,
                 height: int = COEFF_HEIGHT) -> tuple[QuinticPlane, tuple[int, int]]:
    for _ in range(100):
        q = random_quadric(rng, point.curve.domain, height)
        a, b = rand_nonzero_int(rng, height), rand_nonzero_int(rng, height)
        try:
            return plane_through(point, q, a, b), (a, b)
        except ValueError:
            continue
    raise SamplingError("no admissible plane")


# --------------------------------------------------------------------------
# exact pullbacks along the curve


@lru_cache(maxsize=16)
def _exact_pullbacks(plane: QuinticPlane, c: RationalCurve) -> tuple:
    """Per member f: (f(c), df/dz_0(c), ..., df/dz_4(c)) over the exact domain."""
    polys = [g for f in plane.members for g in [f] + [f.partial(i) for i in range(5)]]
    pulled = pullback_many(polys, c.components)
    return tuple(tuple(pulled[6 * l: 6 * l + 6]) for l in range(3))


@dataclass(frozen=True)
class Pullbacks:
    """Exact f_l(c(t)) and (d f_l / d z_i)(c(t)) for the plane members, lifted to C.

    Evaluating these univariate polynomials avoids the cancellation of evaluating
    large-coefficient quintics at numerical points of the curve.
    """

    domain: Domain
    values: tuple
    partials: tuple

    @classmethod
    def of(cls, plane: QuinticPlane, c: RationalCurve, domain: Domain = CC) -> Pullbacks:
        if not c.domain.exact or plane.f0.domain != c.domain:
            raise ValueError("exact pullbacks need an exact curve and plane")
        exact = _exact_pullbacks(plane, c)
        vals = tuple(exact[l][0].to_domain(domain) for l in range(3))
        parts = tuple(tuple(p.to_domain(domain) for p in exact[l][1:]) for l in range(3))
        return cls(domain, vals, parts)

    def value(self, l: int, t):
        return uni_eval(self.values[l], self.domain.convert(t))

    def partial(self, l: int, i: int, t):
        return uni_eval(self.partials[l][i], self.domain.convert(t))


# --------------------------------------------------------------------------
# point configuration


@dataclass(frozen=True)
class PointConfiguration:
    """Evaluation points t_1..t_{5d+1} and the combined quintic f3 = delta1 f1 + delta2 f2.

    ``roles[i]`` names what t_{i+1} is: ``("t1",)``, ``("t2",)``, a root
    ``("theta", i, j)`` of c_i, a root ``("eps", l)`` of h, or ``("generic",)``.
    """

    degree: int
    points: tuple
    roles: tuple
    delta1: complex
    delta2: complex
    f3: HomogeneousPoly
    base_chart: PolarChart
    chart: PolarChart

    def __post_init__(self):
        if len(self.points) != 5 * self.degree + 1:
            raise ConfigurationError("a configuration has 5d+1 points")
        if self.delta1 == 0 or self.delta2 == 0:
            raise ConfigurationError("delta1 and delta2 must be nonzero")

    def point(self, role: tuple):
        return self.points[self.roles.index(role)]

    def chart_double_prime(self) -> PolarChart:
        return derive_chart(self.base_chart, self.chart.q, self.delta1, self.delta2,
                            ChartKind.DOUBLE_PRIME)


def _values(plane: QuinticPlane, chart, t) -> list:
    if isinstance(chart, Pullbacks):
        return [chart.value(l, t) for l in range(3)]
    pt = chart.point(t)
    return [hom_eval(f, pt) for f in plane.members]


def pair_determinant(plane: QuinticPlane, chart, t1, t2) -> tuple:
    """(value, scale) of |f2(c(t1)) f1(c(t1)); f2(c(t2)) f1(c(t2))|."""
    _, a1, a2 = _values(plane, chart, t1)
    _, b1, b2 = _values(plane, chart, t2)
    return a2 * b1 - a1 * b2, abs(a2 * b1) + abs(a1 * b2)


def select_t12(c: RationalCurve, plane: QuinticPlane, rng: np.random.Generator,
               max_tries: int = 20, gap: float = T_GAP) -> tuple[complex, complex]:
    """t1 random, t2 a root of f2(c(t1)) f1(c(t)) - f1(c(t1)) f2(c(t)) away from t1 and the theta's."""
    cc = c if isinstance(c.domain, ComplexField) else c.to_domain(CC)
    chart = to_polar(cc)
    pl = plane.to_domain(cc.domain)
    thetas = [r for rs in chart.roots for r in rs]
    for _ in range(max_tries):
        t1 = rand_disk_avoiding(rng, thetas, T_RADIUS, gap)
        _, a1, a2 = _values(pl, chart, t1)
        P = pullback(pl.f1, cc.components) * a2 - pullback(pl.f2, cc.components) * a1
        if P.degree < 1:
            continue
        for t2 in uni_roots(P):
            if abs(t2 - t1) <= gap or any(abs(t2 - th) <= gap for th in thetas):
                continue
            val, scale = pair_determinant(pl, chart, t1, t2)
            if abs(val) <= 1e-9 * max(scale, 1e-300):
                return complex(t1), complex(t2)
    raise SamplingError("no admissible (t1, t2)")


def weights(plane: QuinticPlane, chart, t1, t2) -> tuple:
    """(delta1, delta2) = (|f0 f2|, |f1 f0|) evaluated on the rows c(t1), c(t2).

    ``chart`` is a PolarChart (numerical evaluation) or exact :class:`Pullbacks`.
    """
    g0, g1, g2 = _values(plane, chart, t1)
    k0, k1, k2 = _values(plane, chart, t2)
    return g0 * k2 - g2 * k0, g1 * k0 - g0 * k1


def build_config(point: IncidencePoint, plane: QuinticPlane, rng: np.random.Generator,
                 t12: tuple | None = None, weight_tol: float = 1e-12) -> PointConfiguration:
    """Assemble t_1..t_{5d+1}.

    ``t12`` fixes (t1, t2); by default both are sampled generically in the
    disk of radius 2 (see :func:`select_t12` for the constrained choice).
    """
    d = point.degree
    cc = point.curve.to_domain(CC)
    base = to_polar(cc)
    pl = plane.to_domain(CC)
    thetas = [r for rs in base.roots for r in rs]
    if t12 is None:
        t1 = rand_disk_avoiding(rng, thetas, T_RADIUS, T_GAP)
        t2 = rand_disk_avoiding(rng, thetas + [t1], T_RADIUS, T_GAP)
    else:
        t1, t2 = (complex(t) for t in t12)
    pb = Pullbacks.of(plane, point.curve)
    d1, d2 = weights(pl, pb, t1, t2)
    scale = max(abs(v) for t in (t1, t2) for v in _values(pl, pb, t)) ** 2
    if abs(d1) <= weight_tol * scale or abs(d2) <= weight_tol * scale:
        raise ConfigurationError("delta1 or delta2 vanishes (c lies on a pencil)")
    try:
        chart = derive_chart(base, pl.q, d1, d2, ChartKind.PRIME)
    except ChartError as e:
        raise ConfigurationError(str(e)) from e
    pts, roles = [t1, t2], [("t1",), ("t2",)]
    for i in range(3):
        for j in range(d):
            if (i, j) in ((0, 0), (1, 0)):
                continue
            pts.append(base.roots[i][j])
            roles.append(("theta", i, j))
    for l, e in enumerate(chart.eps):
        pts.append(e)
        roles.append(("eps", l))
    pts.append(rand_disk_avoiding(rng, pts + thetas, T_RADIUS, T_GAP))
    roles.append(("generic",))
    allpts = pts + [base.roots[0][0], base.roots[1][0]]
    sep = min(abs(allpts[a] - allpts[b]) for a in range(len(allpts)) for b in range(a + 1, len(allpts)))
    if sep <= 1e-8 * max(1.0, max(abs(p) for p in allpts)):
        raise ConfigurationError("evaluation points are not distinct")
    f3 = pl.f1 * d1 + pl.f2 * d2
    return PointConfiguration(d, tuple(complex(p) for p in pts), tuple(roles), d1, d2, f3, base, chart)


def f3_root_residual(config: PointConfiguration, curve: RationalCurve) -> float:
    """Max distance from each of t_3..t_{5d}, theta_0^1, theta_1^1 to the nearest unused
    root of f3(c(t)) (greedy matching)."""
    cc = curve.to_domain(CC)
    roots = list(uni_roots(pullback(config.f3, cc.components)))
    targets = list(config.points[2:-1]) + [config.base_chart.roots[0][0], config.base_chart.roots[1][0]]
    if len(roots) != len(targets):
        return float("inf")
    worst = 0.0
    for t in targets:
        k = min(range(len(roots)), key=lambda i: abs(roots[i] - t))
        worst = max(worst, abs(roots[k] - t) / max(1.0, abs(t)))
        roots.pop(k)
    return worst
