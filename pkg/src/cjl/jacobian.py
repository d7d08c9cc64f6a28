"""Jacobian of the incidence functions in the root charts, its block structure,
rank, the reduced 6x6 / 4x4 / 3x3 matrices, the Fermat scan and the tangent
dimension."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .algebra import (CC, QQ, ComplexField, Domain, HomogeneousPoly, Matrix, RankPolicy,
                      UniPoly, det, equilibrate, fermat, hom_eval, hom_partial, inverse, rank,
                      singular_values, uni_eval, uni_roots)
from .curvespace import (ChartKind, PolarChart, RationalCurve, chart_jacobian, chart_labels,
                         derive_chart, gradient_from_partials, to_polar)
from .incidence import (ConfigurationError, IncidencePoint, PointConfiguration, Pullbacks,
                        QuinticPlane, weights)
from .rng import rand_fraction, rand_int

ZERO_TOL = 1e-8
RANK_TOL = 1e-8


def function_labels(d: int) -> list[tuple]:
    rows = [("f3", i) for i in range(3, 5 * d + 2)]
    rows += [("f2", 1), ("f2", 2), ("f1", 1), ("f1", 2), ("f0", 1), ("f0", 2)]
    return rows


def block_column_order(kind: ChartKind, d: int) -> list[tuple]:
    """(theta_{0..2} minus theta_0^1, theta_1^1; eps | theta_0^1, theta_1^1, r..., [xi])."""
    first = [("theta", i, j) for i in range(3) for j in range(d) if (i, j) not in ((0, 0), (1, 0))]
    first += [("eps", l) for l in range(2 * d)]
    last = [("theta", 0, 0), ("theta", 1, 0)]
    if kind == ChartKind.PRIME:
        last += [("r", i) for i in range(4)] + [("xi",)]
    elif kind == ChartKind.DOUBLE_PRIME:
        last += [("r", i) for i in range(5)]
    else:
        raise ValueError("block ordering is defined for the derived charts")
    return first + last


@dataclass(frozen=True)
class JacobianAssembly:
    degree: int
    matrix: Matrix
    row_labels: tuple
    col_labels: tuple
    kind: ChartKind
    chart: PolarChart
    points: tuple
    point: IncidencePoint | None = None
    plane: QuinticPlane | None = None
    config: PointConfiguration | None = None

    def column(self, label: tuple) -> int:
        return self.col_labels.index(label)

    def row(self, label: tuple) -> int:
        return self.row_labels.index(label)


def _match(new: list, old: list) -> list:
    """Reorder ``new`` so that entry k is the one closest to ``old[k]``."""
    pool = list(new)
    out = []
    for o in old:
        k = min(range(len(pool)), key=lambda i: abs(complex(pool[i]) - complex(o)))
        out.append(pool.pop(k))
    return out


def refined_charts(point: IncidencePoint, config: PointConfiguration, kind: ChartKind,
                   domain: ComplexField, pb: Pullbacks) -> tuple[PolarChart, dict]:
    """Chart of ``kind`` and evaluation points at ``domain`` precision, with roots in the
    same order as the 53-bit configuration."""
    if domain == config.base_chart.domain:
        base = config.base_chart
    else:
        cc = point.curve.to_domain(domain)
        lo = config.base_chart
        roots = tuple(tuple(_match(uni_roots(cc.components[i]), lo.roots[i])) for i in range(5))
        base = PolarChart(domain, tuple(c.lead for c in cc.components), roots)
    t1 = domain.convert(config.point(("t1",)))
    t2 = domain.convert(config.point(("t2",)))
    d1, d2 = weights(None, pb, t1, t2)
    q = config.chart.q.to_domain(domain)
    chart = derive_chart(base, q, d1, d2, kind)
    if domain != config.base_chart.domain:
        chart = PolarChart(domain, chart.leads, chart.roots, chart.kind, chart.q, chart.delta1,
                           chart.delta2, tuple(_match(chart.eps, config.chart.eps)), chart.xi)
    pts = {}
    for role, t in zip(config.roles, config.points):
        if role[0] == "theta":
            pts[role] = base.roots[role[1]][role[2]]
        elif role[0] == "eps":
            pts[role] = chart.eps[role[1]]
        else:
            pts[role] = domain.convert(t)
    return chart, pts


def assemble_A(point: IncidencePoint, plane: QuinticPlane, config: PointConfiguration,
               kind: ChartKind = ChartKind.PRIME, domain: ComplexField = CC) -> JacobianAssembly:
    """Jacobian of the function list (f3 at t_3..t_{5d+1}, f2, f1, f0 at t1, t2) in chart ``kind``.

    Gradients are taken in BASE coordinates from exact pulled-back partials,
    then transported by the inverse chart differential.
    """
    d = point.degree
    pb = Pullbacks.of(plane, point.curve, domain)
    chart, pts = refined_charts(point, config, kind, domain, pb)
    d1, d2 = chart.delta1, chart.delta2
    rows = function_labels(d)
    role_of = [r for r in config.roles]
    grads = []
    for lab in rows:
        if lab[0] == "f3":
            t = pts[role_of[lab[1] - 1]]
            partials = [d1 * pb.partial(1, i, t) + d2 * pb.partial(2, i, t) for i in range(5)]
        else:
            l = int(lab[0][1])
            t = pts[("t1",)] if lab[1] == 1 else pts[("t2",)]
            partials = [pb.partial(l, i, t) for i in range(5)]
        grads.append(gradient_from_partials(chart, t, partials))
    G = Matrix(domain, grads)
    jac = chart_jacobian(chart)
    Gc = G @ inverse(jac.matrix)
    order = block_column_order(kind, d)
    idx = {lab: k for k, lab in enumerate(jac.row_labels)}
    A = Gc.submatrix(range(len(rows)), [idx[lab] for lab in order])
    tvals = tuple(pts[r] for r in config.roles)
    return JacobianAssembly(d, A, tuple(rows), tuple(order), kind, chart, tvals, point, plane, config)


def extract_blocks(A: JacobianAssembly) -> tuple[Matrix, Matrix, Matrix, Matrix]:
    if A.kind != ChartKind.PRIME:
        raise ValueError("blocks are defined in the C_M' chart")
    n = 5 * A.degree - 2
    N = A.matrix.nrows
    top, bot = range(n), range(n, N)
    left, right = range(n), range(n, N)
    M = A.matrix
    return (M.submatrix(top, left), M.submatrix(top, right),
            M.submatrix(bot, left), M.submatrix(bot, right))


@dataclass(frozen=True)
class StructureReport:
    """Block-structure measurements; all ratios are relative to each row's largest entry."""

    offdiag_max: float
    a12_max: float
    diag_min: float
    diag_abs_min: float
    tol: float
    passed: bool

    @property
    def margin(self) -> float:
        """Smallest log10 gap between a measured ratio and the threshold (positive = pass)."""
        worst_zero = max(self.offdiag_max, self.a12_max)
        zero_gap = np.log10(self.tol / worst_zero) if worst_zero > 0 else np.inf
        diag_gap = np.log10(self.diag_min / self.tol) if self.diag_min > 0 else -np.inf
        return float(min(zero_gap, diag_gap))


def structure_check(A: JacobianAssembly, tol: float = ZERO_TOL) -> StructureReport:
    """A11 diagonal with nonzero diagonal and A12 = 0.

    Each top row is the gradient of f3 at a different point and rows differ in
    magnitude by many orders, so every entry is compared with ``tol`` times the
    largest entry of its own row.  Rescaling rows does not change the claim.
    """
    A11, A12, _, _ = extract_blocks(A)
    n = A11.nrows
    offdiag = a12 = 0.0
    diag = diag_abs = np.inf
    for i in range(n):
        row = [float(abs(x)) for x in A11.row(i)] + [float(abs(x)) for x in A12.row(i)]
        rs = max(row)
        if rs == 0:
            return StructureReport(np.inf, np.inf, 0.0, 0.0, tol, False)
        offdiag = max([offdiag] + [row[j] / rs for j in range(n) if j != i])
        a12 = max([a12] + [v / rs for v in row[n:]])
        diag = min(diag, row[i] / rs)
        diag_abs = min(diag_abs, row[i])
    passed = offdiag <= tol and a12 <= tol and diag > tol
    return StructureReport(offdiag, a12, float(diag), float(diag_abs), tol, passed)


@dataclass(frozen=True)
class RankReport:
    shape: tuple
    rank: int
    min_retained: float
    tol: float
    escalations: int
    verdict: str

    @property
    def full(self) -> bool:
        return self.verdict == "FULL"


def rank_A(A: JacobianAssembly | Matrix, policy: RankPolicy = RankPolicy(tol=RANK_TOL),
           escalations: int = 0) -> RankReport:
    M = A.matrix if isinstance(A, JacobianAssembly) else A
    E = equilibrate(M)
    sv = singular_values(E)
    r = rank(E, policy)
    retained = float(sv[r - 1] / sv[0]) if r else 0.0
    full = r == M.nrows == M.ncols
    return RankReport(M.shape, r, retained, policy.tol, escalations, "FULL" if full else "DEFICIENT")


def assemble_with_escalation(point, plane, config, kind=ChartKind.PRIME, accept=None,
                             max_escalations: int = 2):
    """Assemble at 53 bits; if ``accept(A)`` is false, redo at 106, 212, ... bits."""
    dom = CC
    for k in range(max_escalations + 1):
        A = assemble_A(point, plane, config, kind, dom)
        if accept is None or accept(A) or k == max_escalations:
            return A, k
        dom = ComplexField(dom.prec * 2)


# --------------------------------------------------------------------------
# reduced matrices


def euler_terms(f: HomogeneousPoly, pt) -> list:
    """(z_i df/dz_i)(pt) for i = 0..4."""
    return [pt[i] * hom_eval(hom_partial(f, i), pt) for i in range(5)]


def det3_value(f0: HomogeneousPoly, p1, p2, domain: Domain | None = None):
    """det [[1,1,1], (z_i df0/dz_i)(p1) for i = 2,3,4, (same)(p2)]."""
    domain = domain or f0.domain
    e1, e2 = euler_terms(f0, p1)[2:], euler_terms(f0, p2)[2:]
    return det(Matrix(domain, [[1, 1, 1], e1, e2]))


@dataclass(frozen=True)
class ReducedMatrices:
    B: Matrix
    M4: Matrix
    det3: object
    lam: object
    jac4_det: object
    identity_residual: float


def reduced_matrices(A: JacobianAssembly, lam_tol: float = 1e-300) -> ReducedMatrices:
    """B (6x6), the 4x4 matrix with the explicit two-row structure, and det3.

    ``A`` must be assembled in C_M''.  ``lam`` is the nonzero normalizing scalar,
    taken as f2(c(t1)); ``jac4_det = lam * det(M4)`` and
    ``det(M4) = (1/(t1 - theta_0^1) - 1/(t2 - theta_0^1)) * det3`` exactly.
    """
    if A.kind != ChartKind.DOUBLE_PRIME:
        raise ValueError("reduced matrices are taken in the C_M'' chart")
    dom = A.matrix.domain
    rows = [A.row(l) for l in (("f2", 1), ("f2", 2), ("f1", 1), ("f1", 2), ("f0", 1), ("f0", 2))]
    cols = [A.column(l) for l in (("theta", 0, 0), ("theta", 1, 0)) + tuple(("r", i) for i in range(1, 5))]
    B = A.matrix.submatrix(rows, cols)
    chart = A.chart
    th = chart.roots[0][0]
    t1 = A.points[A.config.roles.index(("t1",))]
    t2 = A.points[A.config.roles.index(("t2",))]
    pb = Pullbacks.of(A.plane, A.point.curve, dom)
    e = [[chart.component(i, t) * pb.partial(0, i, t) for i in (2, 3, 4)] for t in (t1, t2)]
    dth = [A.matrix[A.row(("f0", k)), A.column(("theta", 0, 0))] for k in (1, 2)]
    M4 = Matrix(dom, [[1 / (t1 - th), 1, 1, 1], [1 / (t2 - th), 1, 1, 1],
                      [dth[0]] + e[0], [dth[1]] + e[1]])
    d3 = det(Matrix(dom, [[1, 1, 1], e[0], e[1]]))
    lam = pb.value(2, t1)
    if abs(lam) <= lam_tol:
        raise ConfigurationError("normalizing scalar vanishes")
    dm4 = det(M4)
    pred = (1 / (t1 - th) - 1 / (t2 - th)) * d3
    resid = float(abs(dm4 - pred) / max(abs(pred), 1e-300))
    return ReducedMatrices(B, M4, d3, lam, lam * dm4, resid)


# --------------------------------------------------------------------------
# Fermat scan


@dataclass(frozen=True)
class FermatScan:
    degree: int
    trials: int
    nonzero: int

    @property
    def fraction(self) -> float:
        return self.nonzero / self.trials if self.trials else float("nan")


def fermat_scan(d: int, trials: int, rng: np.random.Generator, domain: Domain) -> FermatScan:
    """Count random (c, t1, t2) with det3 != 0 for the Fermat quintic over an exact domain."""
    F = fermat(domain)
    nonzero = 0
    for _ in range(trials):
        comps = [UniPoly(domain, [domain.random(rng_py(rng)) for _ in range(d + 1)]) for _ in range(5)]
        t1, t2 = domain.random(rng_py(rng)), domain.random(rng_py(rng))
        p1 = [uni_eval(c, t1) for c in comps]
        p2 = [uni_eval(c, t2) for c in comps]
        if det3_value(F, p1, p2, domain) != 0:
            nonzero += 1
    return FermatScan(d, trials, nonzero)


class _PyRandomAdapter:
    """``random.Random``-like view (randint/randrange) of a numpy Generator."""

    def __init__(self, gen: np.random.Generator):
        self.gen = gen

    def randrange(self, n: int) -> int:
        # exact for n up to 2**64 via two 32-bit draws
        if n <= 2**63:
            return int(self.gen.integers(0, n))
        hi, lo = (int(x) for x in self.gen.integers(0, 2**32, size=2))
        return ((hi << 32) | lo) % n

    def randint(self, a: int, b: int) -> int:
        return a + self.randrange(b - a + 1)


def rng_py(gen: np.random.Generator) -> _PyRandomAdapter:
    return _PyRandomAdapter(gen)


# --------------------------------------------------------------------------
# tangent dimension


@dataclass(frozen=True)
class TangentReport:
    rank: int
    kernel_dim: int
    nrows: int
    ncols: int


def _value_row(pb: Pullbacks, t) -> list:
    return [pb.value(2, t), pb.value(1, t), pb.value(0, t)]


def _coeff_grad_row(pb: Pullbacks, t, d: int) -> list[list]:
    """For each of f2, f1, f0: gradient of f_l(c(t)) in coefficient coordinates a_{i,m}."""
    powers = [t**m for m in range(d + 1)]
    out = []
    for l in (2, 1, 0):
        parts = [pb.partial(l, i, t) for i in range(5)]
        out.append([powers[m] * parts[i] for i in range(5) for m in range(d + 1)])
    return out


def tangent_dim(point: IncidencePoint, plane: QuinticPlane, tpoints, domain: Domain = QQ) -> TangentReport:
    """Rank and kernel dimension of the gradients of D_i = det[(f2, f1, f0)(c(t_i)); (t1); (t2)],
    i = 3..5d+1, in the 5d+5 coefficient coordinates of the curve."""
    d = point.degree
    pb = Pullbacks.of(plane, point.curve, domain)
    ts = [domain.convert(t) for t in tpoints]
    if len(ts) != 5 * d + 1:
        raise ValueError("tangent_dim needs 5d+1 points")
    V1, V2 = _value_row(pb, ts[0]), _value_row(pb, ts[1])
    G1, G2 = _coeff_grad_row(pb, ts[0], d), _coeff_grad_row(pb, ts[1], d)
    n = 5 * (d + 1)
    rows = []
    for t in ts[2:]:
        Vi, Gi = _value_row(pb, t), _coeff_grad_row(pb, t, d)
        row = []
        for k in range(n):
            acc = det(Matrix(domain, [[g[k] for g in Gi], V1, V2]))
            acc = acc + det(Matrix(domain, [Vi, [g[k] for g in G1], V2]))
            acc = acc + det(Matrix(domain, [Vi, V1, [g[k] for g in G2]]))
            row.append(acc)
        rows.append(row)
    M = Matrix(domain, rows)
    r = rank(M) if domain.exact else rank(equilibrate(M))
    return TangentReport(r, n - r, M.nrows, n)


def random_tpoints(d: int, rng: np.random.Generator, domain: Domain = QQ,
                   curve: RationalCurve | None = None) -> list:
    """5d+1 distinct random points, avoiding roots of the components of ``curve``."""
    pts: list = []
    comps = curve.to_domain(domain).components if curve is not None else ()
    while len(pts) < 5 * d + 1:
        t = domain.convert(rand_fraction(rng, 50)) if domain == QQ else domain.random(rng_py(rng))
        if t in pts or any(uni_eval(c, t) == 0 for c in comps):
            continue
        pts.append(t)
    return pts
