"""Normal sheaf of a rational curve on a quintic, by exact graded linear algebra.

Conventions.  C = (C_0..C_4) are the homogenized components (binary forms of
degree d in s, t) and JF = ((df/dz_i)(C))_i, forms of degree 4d.  The kernel
K = ker(JF : O(d)^5 -> O(5d)) is the pullback of the tangent sheaf of the
quintic plus the Euler line, and

    N = K / (O(1)^2 -> K,  (a, b) -> a dC/ds + b dC/dt).

Global sections of twists are read coordinate-wise: an element of K(m) is a
vector of five forms of degree d + m.  For m >= -2 nothing in H^1(O(1+m)^2)
interferes, so

    h0(N(m)) = dim K_m - 2(m + 2),   h1(N(m)) = (5d + m + 1) - rank(JF in degree d + m).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import QQ, Domain, HomogeneousPoly, Matrix, UniPoly, echelon, kernel, pullback, rank
from .algebra import uni_gcd_many
from .curvespace import RationalCurve
from .incidence import IncidencePoint

NVARS = 5


class SingularCurveError(ValueError):
    """JF vanishes identically or has a common zero on the curve."""


# --------------------------------------------------------------------------
# binary forms


@dataclass(frozen=True)
class BinaryForm:
    """sum_k coeffs[k] s^(degree-k) t^k."""

    domain: Domain
    degree: int
    coeffs: tuple

    def __post_init__(self):
        cs = tuple(self.domain.convert(c) for c in self.coeffs)
        if self.degree < 0:
            if any(c != 0 for c in cs):
                raise ValueError("nonzero form of negative degree")
            cs = ()
        elif len(cs) > self.degree + 1:
            if any(c != 0 for c in cs[self.degree + 1:]):
                raise ValueError("coefficient beyond the form degree")
            cs = cs[: self.degree + 1]
        else:
            cs = cs + (self.domain.zero,) * (self.degree + 1 - len(cs))
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def zero(cls, domain: Domain, degree: int) -> BinaryForm:
        return cls(domain, degree, ())

    @classmethod
    def from_uni(cls, p: UniPoly, degree: int) -> BinaryForm:
        if p.degree > degree:
            raise ValueError(f"polynomial of degree {p.degree} does not fit in a degree-{degree} form")
        return cls(p.domain, degree, p.coeffs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __add__(self, other: BinaryForm) -> BinaryForm:
        if other.degree != self.degree:
            raise ValueError("adding forms of different degrees")
        return BinaryForm(self.domain, self.degree, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: BinaryForm) -> BinaryForm:
        return self + other.scale(-1)

    def scale(self, c) -> BinaryForm:
        return BinaryForm(self.domain, self.degree, [c * a for a in self.coeffs])

    def __mul__(self, other: BinaryForm) -> BinaryForm:
        n = self.degree + other.degree
        out = [self.domain.zero] * (n + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return BinaryForm(self.domain, n, out)

    def ds(self) -> BinaryForm:
        n = self.degree
        return BinaryForm(self.domain, n - 1, [a * (n - k) for k, a in enumerate(self.coeffs)][: max(n, 0)])

    def dt(self) -> BinaryForm:
        return BinaryForm(self.domain, self.degree - 1, [a * k for k, a in enumerate(self.coeffs)][1:])

    def dehomogenize(self) -> UniPoly:
        """Value at s = 1."""
        return UniPoly(self.domain, self.coeffs)

    def __call__(self, s, t):
        return sum((a * s ** (self.degree - k) * t**k for k, a in enumerate(self.coeffs)), self.domain.zero)

    def order_at_infinity(self) -> int:
        """Multiplicity of the root s = 0, i.e. degree minus the dehomogenized degree."""
        return self.degree - self.dehomogenize().degree


def homogenize(c: RationalCurve) -> list[BinaryForm]:
    """C_i(s, t) = s^d c_i(t/s)."""
    return [BinaryForm.from_uni(comp, c.degree) for comp in c.components]


def form_gcd(forms: Sequence[BinaryForm]) -> tuple[UniPoly, int]:
    """Homogeneous gcd of nonzero forms as (finite part at s = 1, multiplicity at s = 0)."""
    nz = [f for f in forms if not f.is_zero()]
    if not nz:
        raise ValueError("gcd of zero forms")
    g = uni_gcd_many([f.dehomogenize() for f in nz])
    return g, min(f.order_at_infinity() for f in nz)


# --------------------------------------------------------------------------
# graded maps


@dataclass(frozen=True)
class GradedMap:
    """Map of free sheaves  sum O(a_i) -> sum O(b_j)  given by binary forms.

    ``entries[j][i]`` has degree b_j - a_i (zero if negative).
    """

    domain: Domain
    source: tuple
    target: tuple
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != len(self.target):
            raise ValueError("one entry row per target summand")
        for j, row in enumerate(self.entries):
            if len(row) != len(self.source):
                raise ValueError("one entry per source summand")
            for i, e in enumerate(row):
                want = self.target[j] - self.source[i]
                if (want < 0 and not e.is_zero()) or (want >= 0 and e.degree != want):
                    raise ValueError(f"entry ({j},{i}) has degree {e.degree}, expected {want}")

    def column(self, i: int) -> list[BinaryForm]:
        return [row[i] for row in self.entries]


def jf_row(point: IncidencePoint) -> list[BinaryForm]:
    d = point.degree
    f = point.quintic
    return [BinaryForm.from_uni(pullback(f.partial(i), point.curve.components), 4 * d) for i in range(NVARS)]


def _mult_matrix(J: Sequence[BinaryForm], n: int, domain: Domain) -> Matrix:
    """Matrix of (a_0..a_4) -> sum a_i J_i with deg a_i = n; columns (i, k), k = t-exponent."""
    out_deg = n + J[0].degree
    rows = [[domain.zero] * (NVARS * (n + 1)) for _ in range(out_deg + 1)]
    for i, Ji in enumerate(J):
        for k in range(n + 1):
            col = i * (n + 1) + k
            for j, a in enumerate(Ji.coeffs):
                if a != 0:
                    rows[j + k][col] = a
    return Matrix(domain, rows)


def _vec_to_forms(v: Sequence, n: int, domain: Domain) -> list[BinaryForm]:
    return [BinaryForm(domain, n, v[i * (n + 1):(i + 1) * (n + 1)]) for i in range(NVARS)]


def _forms_to_vec(forms: Sequence[BinaryForm]) -> list:
    return [c for f in forms for c in f.coeffs]


def _monomials(domain: Domain, k: int) -> list[BinaryForm]:
    return [BinaryForm(domain, k, [0] * j + [1]) for j in range(k + 1)]


def check_jf(J: Sequence[BinaryForm]) -> None:
    if all(j.is_zero() for j in J):
        raise SingularCurveError("JF vanishes identically: the curve lies in the singular locus")
    g, inf = form_gcd(J)
    if g.degree > 0 or inf > 0:
        raise SingularCurveError("JF has a common zero on the curve (meets the singular locus)")


def kernel_in_degree(J: Sequence[BinaryForm], n: int, domain: Domain) -> list[list[BinaryForm]]:
    if n < 0:
        return []
    K = kernel(_mult_matrix(J, n, domain))
    return [_vec_to_forms(K.col(j), n, domain) for j in range(K.ncols)]


def jf_kernel(point: IncidencePoint, max_twist: int | None = None) -> GradedMap:
    """Free presentation  sum O(k_j) -> O(d)^5  of ker(JF), generators by minimal-degree search."""
    d = point.degree
    dom = point.curve.domain
    J = jf_row(point)
    check_jf(J)
    max_twist = 5 * d + 2 if max_twist is None else max_twist
    gens: list[tuple[int, list[BinaryForm]]] = []
    for m in range(-d, max_twist + 1):
        n = d + m
        basis = kernel_in_degree(J, n, dom)
        if not basis:
            continue
        span = []
        for mg, g in gens:
            for mono in _monomials(dom, m - mg):
                span.append(_forms_to_vec([mono * x for x in g]))
        r = rank(Matrix(dom, span)) if span else 0
        for v in basis:
            vec = _forms_to_vec(v)
            r2 = rank(Matrix(dom, span + [vec]))
            if r2 > r:
                span.append(vec)
                r = r2
                gens.append((m, v))
        if len(gens) >= 4 and r == len(basis):
            break
    if len(gens) != 4:
        raise ValueError(f"kernel presentation has {len(gens)} generators, expected 4")
    source = tuple(-m for m, _ in gens)
    if sum(source) != 0:
        raise ValueError(f"kernel generators have twists {source} (degree {sum(source)} != 0)")
    entries = tuple(tuple(g[i] for _, g in gens) for i in range(NVARS))
    return GradedMap(dom, source, (d,) * NVARS, entries)


# --------------------------------------------------------------------------
# immersion and torsion


def tangent_columns(c: RationalCurve) -> tuple[list[BinaryForm], list[BinaryForm]]:
    C = homogenize(c)
    return [x.ds() for x in C], [x.dt() for x in C]


def immersion_check(c: RationalCurve) -> tuple[bool, tuple[UniPoly, int]]:
    """True iff (dC/ds | dC/dt) has rank 2 on all of P^1; witness = gcd of the 2x2 minors
    as (finite part, multiplicity at infinity)."""
    if not c.domain.exact:
        raise ValueError("immersion_check needs an exact domain")
    S, T = tangent_columns(c)
    minors = [S[i] * T[j] - S[j] * T[i] for i in range(NVARS) for j in range(i + 1, NVARS)]
    if all(m.is_zero() for m in minors):
        return False, (UniPoly(c.domain, []), -1)
    g, inf = form_gcd(minors)
    return g.degree == 0 and inf == 0, (g, inf)


def _wedge3_matrix(S: Sequence[BinaryForm], T: Sequence[BinaryForm], n: int, domain: Domain) -> Matrix:
    """Linear map v -> all 3x3 minors of (v | S | T), v of degree n."""
    pairs = {}
    for j in range(NVARS):
        for k in range(j + 1, NVARS):
            pairs[(j, k)] = S[j] * T[k] - S[k] * T[j]
    blocks = []
    for a in range(NVARS):
        for b in range(a + 1, NVARS):
            for e in range(b + 1, NVARS):
                # expansion along the v column: v_a m_bc - v_b m_ac + v_c m_ab
                terms = [(a, pairs[(b, e)], 1), (b, pairs[(a, e)], -1), (e, pairs[(a, b)], 1)]
                deg = n + terms[0][1].degree
                rows = [[domain.zero] * (NVARS * (n + 1)) for _ in range(deg + 1)]
                for idx, mform, sign in terms:
                    for k in range(n + 1):
                        for j, x in enumerate(mform.coeffs):
                            if x != 0:
                                rows[j + k][idx * (n + 1) + k] = rows[j + k][idx * (n + 1) + k] + sign * x
                blocks.extend(rows)
    return Matrix(domain, blocks)


def torsion_length(c: RationalCurve, m: int = 0) -> int:
    """dim(saturation of the tangent image in twist m) - 2(m + 2)."""
    dom = c.domain
    S, T = tangent_columns(c)
    n = c.degree + m
    sat = NVARS * (n + 1) - rank(_wedge3_matrix(S, T, n, dom))
    return sat - 2 * (m + 2)


def serre_dual_h1(K: GradedMap) -> int:
    """h1(N) through the dual side, from the presentation K = sum O(a_j) alone.

    H1(N) = H1(K) because the image O(1)^2 has no H1, and Serre duality gives
    H1(K) = H0(K^dual(-2)) = sum_j h0(O(-a_j - 2)).  No rank of JF enters, so
    this is independent of the cokernel count used by :func:`normal_sheaf`.
    """
    return sum(max(0, -a - 1) for a in K.source)


# --------------------------------------------------------------------------
# splitting type


@dataclass(frozen=True)
class SplittingDescriptor:
    rank: int
    degrees: tuple
    torsion: int
    h0: dict = field(default_factory=dict)
    h1: dict = field(default_factory=dict)

    @property
    def total_degree(self) -> int:
        return sum(self.degrees) + self.torsion

    @property
    def h1_zero(self) -> int:
        return self.h1.get(0, self.predicted_h1(0))

    def predicted_h0(self, m: int) -> int:
        return sum(max(0, a + m + 1) for a in self.degrees) + self.torsion

    def predicted_h1(self, m: int) -> int:
        return sum(max(0, -a - m - 1) for a in self.degrees)

    def riemann_roch_ok(self) -> bool:
        return all(self.h0[m] - self.h1[m] == self.total_degree + self.rank * (m + 1) for m in self.h0)

    def to_dict(self) -> dict:
        return {"rank": self.rank, "degrees": list(self.degrees), "torsion": self.torsion,
                "h0": {str(k): v for k, v in sorted(self.h0.items())},
                "h1": {str(k): v for k, v in sorted(self.h1.items())}}


def _profile(J, d: int, dom: Domain, m: int) -> tuple[int, int]:
    """(h0, h1) of N(m) for m >= -2."""
    n = d + m
    r = rank(_mult_matrix(J, n, dom))
    dimK = NVARS * (n + 1) - r
    return dimK - 2 * (m + 2), (5 * d + m + 1) - r


def normal_sheaf(point: IncidencePoint, window: tuple[int, int] | None = None) -> SplittingDescriptor:
    """Splitting type, torsion and cohomology table of the normal sheaf.

    h0/h1 are computed for twists m in [-2, top]: the formulas in the module
    docstring need m >= -2, so of ``window`` (default (-d-3, 2d+3)) only the
    upper end is used.  Splitting degrees come from the jumps
    h0(m) - h0(m-1) = #{a_i >= -m}; a summand of degree >= 1 is recovered from
    total degree -2 and the torsion length.
    """
    d = point.degree
    dom = point.curve.domain
    J = jf_row(point)
    check_jf(J)
    hi = (window or (-d - 3, 2 * d + 3))[1]
    lo = -2
    tau = torsion_length(point.curve)
    for attempt in range(2):
        h0, h1 = {}, {}
        for m in range(lo, hi + 1):
            h0[m], h1[m] = _profile(J, d, dom, m)
        jumps = {m: h0[m] - h0[m - 1] for m in range(lo + 1, hi + 1)}
        if jumps[hi] == 2 and (hi - 1 not in jumps or jumps[hi - 1] == 2):
            break
        if attempt == 1:
            raise ValueError("h0 profile did not stabilize in the widened window")
        hi = 2 * hi
    degs: list[int] = []
    positive = jumps[lo + 1]  # #{a_i >= -(lo+1)} = #{a_i >= 1} for lo = -2
    prev = positive
    for m in range(lo + 2, hi + 1):
        degs += [-m] * (jumps[m] - prev)
        prev = jumps[m]
    if positive == 1:
        degs.append(-2 - tau - sum(degs))
    elif positive > 1:
        raise ValueError("two summands of positive degree contradict total degree -2")
    if len(degs) != 2:
        raise ValueError(f"rank {len(degs)} after quotient, expected 2")
    return SplittingDescriptor(2, tuple(sorted(degs, reverse=True)), tau, h0, h1)


def infer_from_h1(deg: int, h1: int) -> SplittingDescriptor:
    """Splitting {k, deg - k} of a torsion-free rank-2 sheaf of degree ``deg`` from h1 alone.

    h1 = 0 forces both summands >= -1, which for deg = -2 is {-1, -1}; h1 > 0
    puts it all on the lower summand, O(-1 - h1).
    """
    if h1 < 0:
        raise ValueError("h1 must be non-negative")
    if h1 == 0:
        if deg != -2:
            raise ValueError("h1 = 0 determines the splitting only in degree -2")
        return SplittingDescriptor(2, (-1, -1), 0, {}, {0: 0})
    low = -1 - h1
    high = deg - low
    if high < low:
        raise ValueError("inconsistent degree and h1")
    return SplittingDescriptor(2, (high, low), 0, {}, {0: h1})
