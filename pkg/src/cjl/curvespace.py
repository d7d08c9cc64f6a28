"""The linear model of degree-d maps P^1 -> P^4 and its root ("polar") charts.

A point of the model is five polynomials of degree <= d.  Near a curve whose
components have distinct roots, each component is ``r_i * prod_j (t - theta_i^j)``
and the roots/leading coefficients are local coordinates (the BASE chart).
The derived charts trade the roots of components 3 and 4 for the roots
``eps`` of the quadric pullback ``h(c, t) = delta1 q(c(t)) + delta2 c3(t) c4(t)``,
and, for ``C_M'``, trade ``r_4`` for the leading coefficient ``xi`` of ``h``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import (CC, QQ, ComplexField, Domain, DomainError, HomogeneousPoly, Matrix, equilibrate,
                      RankPolicy, UniPoly, det, hom_eval, hom_partial, pullback, rank,
                      uni_eval, uni_from_roots, uni_gcd, uni_gcd_many, uni_roots)
from .algebra.poly import NVARS
from .rng import make_rng, rand_fraction

ROUNDTRIP_TOL = 1e-10


class ChartError(ValueError):
    """The requested chart is undefined at this curve (repeated/zero roots, xi = 0, ...)."""


class ChartKind(str, enum.Enum):
    BASE = "base"
    PRIME = "C_M'"
    DOUBLE_PRIME = "C_M''"


@dataclass(frozen=True)
class RationalCurve:
    """Five polynomials of degree <= ``degree`` over a single domain.

    Zero components are allowed here (lines inside coordinate hyperplanes are
    legitimate curves); polar charts require them to be nonzero.
    """

    degree: int
    components: tuple[UniPoly, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != NVARS:
            raise ValueError(f"a curve in P^4 needs 5 components, got {len(comps)}")
        dom = comps[0].domain
        for c in comps:
            if c.domain != dom:
                raise DomainError("curve components over different domains")
            if c.degree > self.degree:
                raise ValueError(f"component of degree {c.degree} > {self.degree}")
        if all(c.is_zero() for c in comps):
            raise ValueError("all components vanish")
        if max(c.degree for c in comps) != self.degree:
            raise ValueError(f"no component has degree exactly {self.degree}")
        if dom.exact and uni_gcd_many(comps).degree > 0:
            raise ValueError("components share a common factor (base point)")

    @classmethod
    def from_coeffs(cls, domain: Domain, degree: int, coeffs: Sequence[Sequence]) -> RationalCurve:
        return cls(degree, tuple(UniPoly(domain, cs) for cs in coeffs))

    @property
    def domain(self) -> Domain:
        return self.components[0].domain

    def __call__(self, t) -> tuple:
        return tuple(uni_eval(c, t) for c in self.components)

    def to_domain(self, domain: Domain) -> RationalCurve:
        return RationalCurve(self.degree, tuple(c.to_domain(domain) for c in self.components))

    def coefficient_vector(self) -> list:
        """Coordinates in M = C^{5d+5}: component-major, low degree first."""
        return [c.coeff(m) for c in self.components for m in range(self.degree + 1)]


# --------------------------------------------------------------------------
# polar charts


def base_labels(d: int) -> list[tuple]:
    return [("theta", i, j) for i in range(NVARS) for j in range(d)] + [("r", i) for i in range(NVARS)]


def chart_labels(kind: ChartKind, d: int) -> list[tuple]:
    if kind == ChartKind.BASE:
        return base_labels(d)
    labels = [("theta", i, j) for i in range(3) for j in range(d)]
    labels += [("eps", l) for l in range(2 * d)]
    if kind == ChartKind.PRIME:
        labels += [("r", i) for i in range(4)] + [("xi",)]
    else:
        labels += [("r", i) for i in range(5)]
    return labels


@dataclass(frozen=True)
class PolarChart:
    """Leading coefficients and roots of the five components, plus the derived block."""

    domain: ComplexField
    leads: tuple
    roots: tuple[tuple, ...]
    kind: ChartKind = ChartKind.BASE
    q: HomogeneousPoly | None = None
    delta1: object = None
    delta2: object = None
    eps: tuple = ()
    xi: object = None

    @property
    def degree(self) -> int:
        return len(self.roots[0])

    def component(self, i: int, t):
        """``c_i(t)`` in product form (exact zero at its own roots)."""
        v = self.leads[i]
        for th in self.roots[i]:
            v = v * (t - th)
        return v

    def point(self, t) -> tuple:
        return tuple(self.component(i, t) for i in range(NVARS))

    def cofactor(self, i: int, j: int, t):
        """``c_i(t) / (t - theta_i^j)`` without dividing."""
        v = self.leads[i]
        for k, th in enumerate(self.roots[i]):
            if k != j:
                v = v * (t - th)
        return v

    def monic_part(self, i: int, t):
        """``c_i(t) / r_i``."""
        v = self.domain.one
        for th in self.roots[i]:
            v = v * (t - th)
        return v

    def coordinates(self) -> list:
        """Values of the chart coordinates, in :func:`chart_labels` order."""
        vals = {("theta", i, j): self.roots[i][j] for i in range(NVARS) for j in range(self.degree)}
        vals.update({("r", i): self.leads[i] for i in range(NVARS)})
        vals.update({("eps", l): e for l, e in enumerate(self.eps)})
        vals[("xi",)] = self.xi
        return [vals[lab] for lab in chart_labels(self.kind, self.degree)]

    def quadric(self) -> HomogeneousPoly:
        """``H = delta1 q + delta2 z3 z4`` so that ``h(c, t) = H(c(t))``."""
        z3z4 = HomogeneousPoly.monomial(self.domain, (0, 0, 0, 1, 1))
        return self.q * self.delta1 + z3z4 * self.delta2


def _min_separation(values: Sequence) -> float:
    best = float("inf")
    for a in range(len(values)):
        for b in range(a + 1, len(values)):
            best = min(best, float(abs(values[a] - values[b])))
    return best


def to_polar(c: RationalCurve, sep_tol: float = 1e-8) -> PolarChart:
    """BASE chart of ``c``; every component must have degree d and all 5d roots be distinct."""
    dom = c.domain
    if not isinstance(dom, ComplexField):
        raise DomainError("polar charts need a complex domain; lift with to_domain(CC)")
    d = c.degree
    leads, roots = [], []
    for i, comp in enumerate(c.components):
        if comp.is_zero():
            raise ChartError(f"component {i} is zero")
        if comp.degree != d:
            raise ChartError(f"component {i} has degree {comp.degree} < {d} (root at infinity)")
        leads.append(comp.lead)
        roots.append(tuple(uni_roots(comp)) if d else ())
    flat = [r for rs in roots for r in rs]
    scale = max([1.0] + [float(abs(r)) for r in flat])
    if len(flat) > 1 and _min_separation(flat) <= sep_tol * scale:
        raise ChartError("component roots are not distinct")
    chart = PolarChart(dom, tuple(leads), tuple(roots))
    back = from_polar(chart)
    for a, b in zip(back.components, c.components):
        err = (a - b).max_abs()
        if err > ROUNDTRIP_TOL * max(b.max_abs(), 1e-300):
            raise ChartError(f"polar reconstruction error {err:.3g}")
    return chart


def from_polar(chart: PolarChart) -> RationalCurve:
    d = chart.degree
    comps = tuple(uni_from_roots(chart.domain, chart.leads[i], chart.roots[i]) for i in range(NVARS))
    return RationalCurve(d, comps)


def leading_form_value(c: RationalCurve, q: HomogeneousPoly, delta1, delta2):
    """``delta1 q(a) + delta2 a3 a4`` where ``a_i`` is the t^d coefficient of ``c_i``."""
    a = [comp.coeff(c.degree) for comp in c.components]
    return delta1 * hom_eval(q, a) + delta2 * a[3] * a[4]


def h_poly(c: RationalCurve, q: HomogeneousPoly, delta1, delta2, zero_tol: float = 1e-12) -> UniPoly:
    """``h(c, t) = delta1 q(c(t)) + delta2 c3(t) c4(t)``, required to have degree exactly 2d."""
    dom = c.domain
    if q.degree != 2:
        raise ValueError("q must be a quadric")
    delta1, delta2 = dom.convert(delta1), dom.convert(delta2)
    if delta1 == 0 or delta2 == 0:
        raise ValueError("delta1 and delta2 must be nonzero")
    h = pullback(q.to_domain(dom) if q.domain != dom else q, c.components) * delta1
    h = h + c.components[3] * c.components[4] * delta2
    xi = leading_form_value(c, q.to_domain(dom) if q.domain != dom else q, delta1, delta2)
    scale = (float(abs(delta1)) * q.max_abs() + float(abs(delta2))) * max(
        comp.max_abs() for comp in c.components) ** 2
    if xi == 0 or (not dom.exact and float(abs(xi)) <= zero_tol * scale):
        raise ChartError("leading coefficient xi of h vanishes")
    return h


def _sorted_roots(roots: Sequence) -> tuple:
    # by real part, then imaginary part; stable so discovery order breaks ties
    return tuple(sorted(roots, key=lambda z: (float(complex(z).real), float(complex(z).imag))))


def derive_chart(chart: PolarChart, q: HomogeneousPoly, delta1, delta2,
                 kind: ChartKind = ChartKind.PRIME, sep_tol: float = 1e-8) -> PolarChart:
    if chart.kind != ChartKind.BASE:
        raise ChartError("derive_chart starts from a BASE chart")
    if kind == ChartKind.BASE:
        return chart
    dom = chart.domain
    q = q.to_domain(dom) if q.domain != dom else q
    c = from_polar(chart)
    h = h_poly(c, q, delta1, delta2)
    eps = _sorted_roots(uni_roots(h))
    scale = max([1.0] + [float(abs(e)) for e in eps])
    if min(float(abs(e)) for e in eps) <= sep_tol * scale:
        raise ChartError("h(c, t) has a zero root")
    if _min_separation(eps) <= sep_tol * scale:
        raise ChartError("h(c, t) has repeated roots")
    d1, d2 = dom.convert(delta1), dom.convert(delta2)
    r = chart.leads
    xi = d1 * hom_eval(q, r) + d2 * r[3] * r[4]
    return PolarChart(dom, chart.leads, chart.roots, kind, q, d1, d2, eps, xi)


# --------------------------------------------------------------------------
# gradients in BASE coordinates


def gradient_from_partials(chart: PolarChart, t, partials: Sequence) -> list:
    """BASE gradient of F(c(t)) given ``partials[i] = (dF/dz_i)(c(t))``.

    d/d theta_i^j = -(c_i(t)/(t - theta_i^j)) F_i(c(t)),   d/d r_i = (c_i(t)/r_i) F_i(c(t)).
    """
    d = chart.degree
    grad = []
    for i in range(NVARS):
        for j in range(d):
            grad.append(-chart.cofactor(i, j, t) * partials[i])
    for i in range(NVARS):
        grad.append(chart.monic_part(i, t) * partials[i])
    return grad


def base_gradient(chart: PolarChart, F: HomogeneousPoly, t) -> list:
    """Gradient of ``F(c(t))`` (t fixed) with respect to the BASE coordinates."""
    dom = chart.domain
    F = F.to_domain(dom) if F.domain != dom else F
    t = dom.convert(t)
    pt = chart.point(t)
    return gradient_from_partials(chart, t, [hom_eval(hom_partial(F, i), pt) for i in range(NVARS)])


def _h_tderivative(chart: PolarChart, H: HomogeneousPoly, t):
    c = from_polar(chart)
    pt = chart.point(t)
    return sum((hom_eval(hom_partial(H, i), pt) * uni_eval(c.components[i].derivative(), t)
                for i in range(NVARS)), chart.domain.zero)


@dataclass(frozen=True)
class ChartJacobian:
    """d(target coordinates) / d(BASE coordinates); rows = target, columns = BASE."""

    matrix: Matrix
    source: ChartKind
    target: ChartKind
    row_labels: tuple
    col_labels: tuple


def chart_jacobian(chart: PolarChart, policy: RankPolicy = RankPolicy(tol=1e-12)) -> ChartJacobian:
    dom = chart.domain
    d = chart.degree
    cols = base_labels(d)
    rows = chart_labels(chart.kind, d)
    n = len(cols)
    if chart.kind == ChartKind.BASE:
        return ChartJacobian(Matrix.identity(dom, n), ChartKind.BASE, ChartKind.BASE,
                             tuple(rows), tuple(cols))
    idx = {lab: k for k, lab in enumerate(cols)}
    H = chart.quadric()
    r = chart.leads
    out = []
    for lab in rows:
        if lab[0] in ("theta", "r"):
            e = [dom.zero] * n
            e[idx[lab]] = dom.one
            out.append(e)
        elif lab[0] == "eps":
            beta = chart.eps[lab[1]]
            g = base_gradient(chart, H, beta)
            hp = _h_tderivative(chart, H, beta)
            out.append([-x / hp for x in g])
        else:
            e = [dom.zero] * n
            for i in range(NVARS):
                e[idx[("r", i)]] = hom_eval(hom_partial(H, i), r)
            out.append(e)
    M = Matrix(dom, out)
    if rank(equilibrate(M), policy) < n:
        raise ChartError("chart differential is singular at this curve")
    return ChartJacobian(M, ChartKind.BASE, chart.kind, tuple(rows), tuple(cols))


def chart_det_factorization(chart: PolarChart) -> dict:
    """Determinant of the chart differential in the (theta_0..2, r_0..r_3, xi, eps) /
    (theta_0..2, r_0..r_4, theta_3, theta_4) ordering, and its factors.

    Returns ``det``, ``a = 1/prod_l h'(beta_l)``, ``dxi_dr4`` and ``J``, with
    ``det == a * dxi_dr4 * J`` for C_M' (``dxi_dr4`` is 1 for C_M'').
    """
    d = chart.degree
    jac = chart_jacobian(chart)
    row_idx = {lab: k for k, lab in enumerate(jac.row_labels)}
    col_idx = {lab: k for k, lab in enumerate(jac.col_labels)}
    first = [("theta", i, j) for i in range(3) for j in range(d)]
    if chart.kind == ChartKind.PRIME:
        new_order = first + [("r", i) for i in range(4)] + [("xi",)] + [("eps", l) for l in range(2 * d)]
    else:
        new_order = first + [("r", i) for i in range(5)] + [("eps", l) for l in range(2 * d)]
    old_order = first + [("r", i) for i in range(5)] + [("theta", i, j) for i in (3, 4) for j in range(d)]
    M = jac.matrix.submatrix([row_idx[l] for l in new_order], [col_idx[l] for l in old_order])
    H = chart.quadric()
    prod_hp = chart.domain.one
    for beta in chart.eps:
        prod_hp = prod_hp * _h_tderivative(chart, H, beta)
    dxi = hom_eval(hom_partial(H, 4), chart.leads) if chart.kind == ChartKind.PRIME else chart.domain.one
    J = J_brute(chart, chart.eps, q=chart.q, delta1=chart.delta1, delta2=chart.delta2)
    return {"det": det(M), "a": chart.domain.one / prod_hp, "dxi_dr4": dxi, "J": J}


# --------------------------------------------------------------------------
# determinant identities


def _guess_domain(values: Sequence) -> Domain:
    if all(isinstance(v, (int, Fraction)) for v in values):
        return QQ
    for v in values:
        if hasattr(v, "context"):
            return ComplexField(v.context.prec)
    return CC


def vandermonde_T(betas: Sequence, i: int, d: int, domain: Domain | None = None):
    """det of the d x d matrix with rows (b, b^2, ..., b^d) for b = betas[i], ..., betas[i+d-1]."""
    domain = domain or _guess_domain(betas)
    rows = [[betas[i + k] ** p for p in range(1, d + 1)] for k in range(d)]
    return det(Matrix(domain, rows))


def _c34(c, t):
    if isinstance(c, PolarChart):
        return c.component(3, t), c.component(4, t)
    return uni_eval(c.components[3], t), uni_eval(c.components[4], t)


def J_closed_form(c, betas: Sequence, domain: Domain | None = None):
    """(-1)^d T_0 T_d prod_i (c3(b_{d+i}) c4(b_i) - c3(b_i) c4(b_{d+i}))."""
    d = len(betas) // 2
    domain = domain or (c.domain if isinstance(c, (PolarChart, RationalCurve)) else _guess_domain(betas))
    betas = [domain.convert(b) for b in betas]
    acc = domain.convert((-1) ** d) * vandermonde_T(betas, 0, d, domain) * vandermonde_T(betas, d, d, domain)
    for i in range(d):
        c3a, c4a = _c34(c, betas[i])
        c3b, c4b = _c34(c, betas[d + i])
        acc = acc * (c3b * c4a - c3a * c4b)
    return acc


def arrange_betas(c, betas: Sequence) -> list:
    """Order the 2d values so that pairs (b_i, b_{d+i}) greedily maximise
    |c3(b_{d+i}) c4(b_i) - c3(b_i) c4(b_{d+i})|."""
    d = len(betas) // 2
    remaining = list(range(len(betas)))
    first, second = [], []
    for _ in range(d):
        best = None
        for x in remaining:
            for y in remaining:
                if x == y:
                    continue
                c3a, c4a = _c34(c, betas[x])
                c3b, c4b = _c34(c, betas[y])
                v = float(abs(c3b * c4a - c3a * c4b))
                if best is None or v > best[0]:
                    best = (v, x, y)
        _, x, y = best
        first.append(betas[x])
        second.append(betas[y])
        remaining.remove(x)
        remaining.remove(y)
    return first + second


def J_brute(chart: PolarChart, betas: Sequence, q: HomogeneousPoly | None = None,
            delta1=1, delta2=1, sep_tol: float = 1e-12):
    """det of d h(c, b_l) / d theta_i^j for i in {3, 4}; rows l, columns (theta_3^*, theta_4^*)."""
    dom = chart.domain
    d = chart.degree
    if q is None:
        q = HomogeneousPoly.monomial(dom, (0, 1, 1, 0, 0))
    q = q.to_domain(dom) if q.domain != dom else q
    H = q * dom.convert(delta1) + HomogeneousPoly.monomial(dom, (0, 0, 0, 1, 1)) * dom.convert(delta2)
    th34 = list(chart.roots[3]) + list(chart.roots[4])
    scale = max([1.0] + [float(abs(x)) for x in th34])
    rows = []
    for b in betas:
        b = dom.convert(b)
        if any(float(abs(b - th)) <= sep_tol * scale for th in th34):
            raise ChartError("a beta coincides with a root of c3 or c4")
        g = base_gradient(chart, H, b)
        rows.append(g[3 * d: 5 * d])
    return det(Matrix(dom, rows))


# --------------------------------------------------------------------------
# birationality


def is_birational(c: RationalCurve, rng=None, votes: int = 3,
                  max_resample: int = 50) -> tuple[bool, int]:
    """Fiber degree m of c through c(t0): degree of gcd of the 2x2 minors
    c_i(t) c_j(t0) - c_j(t) c_i(t0) at random rational t0 (majority of ``votes``)."""
    if not c.domain.exact:
        raise DomainError("birationality test needs an exact domain")
    rng = rng if rng is not None else make_rng(0)
    ms = []
    for _ in range(votes):
        for _ in range(max_resample):
            t0 = c.domain.convert(rand_fraction(rng))
            vals = c(t0)
            if any(v != 0 for v in vals):
                break
        else:
            raise ValueError("could not find a non-degenerate t0")
        minors = []
        for i in range(NVARS):
            for j in range(i + 1, NVARS):
                minors.append(c.components[i] * vals[j] - c.components[j] * vals[i])
        minors = [m for m in minors if not m.is_zero()]
        if not minors:
            raise ValueError("constant map")
        ms.append(uni_gcd_many(minors).degree)
    m = max(set(ms), key=ms.count)
    return m == 1, m


# --------------------------------------------------------------------------
# finite-difference oracle


def _coords_from_base(chart: PolarChart, base_values: Sequence) -> list:
    """Target coordinates of the chart kind of ``chart`` at perturbed BASE values,
    re-solving for eps with roots matched to ``chart.eps`` by proximity."""
    d = chart.degree
    dom = chart.domain
    roots = tuple(tuple(base_values[i * d + j] for j in range(d)) for i in range(NVARS))
    leads = tuple(base_values[NVARS * d + i] for i in range(NVARS))
    base = PolarChart(dom, leads, roots)
    vals = {("theta", i, j): roots[i][j] for i in range(NVARS) for j in range(d)}
    vals.update({("r", i): leads[i] for i in range(NVARS)})
    if chart.kind != ChartKind.BASE:
        H = chart.quadric()
        h = pullback(H, from_polar(base).components)
        pool = list(uni_roots(h))
        for l, e in enumerate(chart.eps):
            k = min(range(len(pool)), key=lambda i: abs(pool[i] - e))
            vals[("eps", l)] = pool.pop(k)
        vals[("xi",)] = hom_eval(H, leads)
    return [vals[lab] for lab in chart_labels(chart.kind, d)]


def finite_difference_jacobian(chart: PolarChart, step: float = 1e-6) -> Matrix:
    """Central differences of the chart coordinates with respect to each BASE coordinate."""
    d = chart.degree
    x0 = [chart.roots[i][j] for i in range(NVARS) for j in range(d)] + list(chart.leads)
    cols = []
    for k in range(len(x0)):
        h = step * max(1.0, float(abs(x0[k])))
        xp, xm = list(x0), list(x0)
        xp[k] = x0[k] + h
        xm[k] = x0[k] - h
        fp, fm = _coords_from_base(chart, xp), _coords_from_base(chart, xm)
        cols.append([(a - b) / (2 * h) for a, b in zip(fp, fm)])
    return Matrix(chart.domain, list(zip(*cols)))


def roundtrip_error(c: RationalCurve) -> float:
    """max coefficient error of from_polar(to_polar(c)) relative to the largest coefficient."""
    back = from_polar(to_polar(c))
    scale = max(comp.max_abs() for comp in c.components)
    return max((a - b).max_abs() for a, b in zip(back.components, c.components)) / scale
