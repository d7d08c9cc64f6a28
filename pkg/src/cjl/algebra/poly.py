"""Univariate polynomials in ``t`` and homogeneous polynomials in ``z0..z4``."""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from itertools import combinations_with_replacement
from math import lcm
from typing import Iterable, Mapping, Sequence

from .scalars import Domain, DomainError, check_same

NVARS = 5


class UniPoly:
    """Polynomial in ``t`` with coefficients stored low to high.

    The zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("domain", "coeffs")

    def __init__(self, domain: Domain, coeffs: Iterable = ()):
        cs = [domain.convert(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.domain = domain
        self.coeffs = tuple(cs)

    @classmethod
    def constant(cls, domain: Domain, c) -> UniPoly:
        return cls(domain, [c])

    @classmethod
    def monomial(cls, domain: Domain, k: int, c=1) -> UniPoly:
        return cls(domain, [0] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self):
        if not self.coeffs:
            return self.domain.zero
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self.domain.zero

    def _check(self, other: UniPoly) -> None:
        check_same(self.domain, other.domain)

    def __add__(self, other: UniPoly) -> UniPoly:
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(self.domain, [self.coeff(k) + other.coeff(k) for k in range(n)])

    def __neg__(self) -> UniPoly:
        return UniPoly(self.domain, [-c for c in self.coeffs])

    def __sub__(self, other: UniPoly) -> UniPoly:
        return self + (-other)

    def __mul__(self, other) -> UniPoly:
        if not isinstance(other, UniPoly):
            c = self.domain.convert(other)
            return UniPoly(self.domain, [a * c for a in self.coeffs])
        self._check(other)
        if self.is_zero() or other.is_zero():
            return UniPoly(self.domain)
        out = [self.domain.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return UniPoly(self.domain, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> UniPoly:
        out = UniPoly.constant(self.domain, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __call__(self, t):
        return uni_eval(self, t)

    def __eq__(self, other) -> bool:
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.domain == other.domain and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.domain, self.coeffs))

    def __repr__(self) -> str:
        if self.is_zero():
            return "UniPoly(0)"
        terms = [f"({c})*t^{k}" for k, c in enumerate(self.coeffs) if c != 0]
        return "UniPoly(" + " + ".join(terms) + ")"

    def derivative(self) -> UniPoly:
        return UniPoly(self.domain, [k * c for k, c in enumerate(self.coeffs)][1:])

    def divmod(self, other: UniPoly) -> tuple[UniPoly, UniPoly]:
        """Euclidean division; requires an exact domain or an invertible lead."""
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        q = [self.domain.zero] * max(len(rem) - len(other.coeffs) + 1, 0)
        inv_lead = self.domain.one / other.lead
        dv = other.degree
        for k in range(len(rem) - 1, dv - 1, -1):
            c = rem[k] * inv_lead
            q[k - dv] = c
            if c == 0:
                continue
            for j, b in enumerate(other.coeffs):
                rem[k - dv + j] = rem[k - dv + j] - c * b
        return UniPoly(self.domain, q), UniPoly(self.domain, rem[:dv])

    def monic(self) -> UniPoly:
        if self.is_zero():
            return self
        return self * (self.domain.one / self.lead)

    def to_domain(self, domain: Domain) -> UniPoly:
        return UniPoly(domain, self.coeffs)

    def max_abs(self) -> float:
        return max((float(abs(c)) for c in self.coeffs), default=0.0)


def uni_eval(p: UniPoly, t):
    """Horner evaluation of ``p`` at ``t``."""
    t = p.domain.convert(t)
    acc = p.domain.zero
    for c in reversed(p.coeffs):
        acc = acc * t + c
    return acc


def uni_from_roots(domain: Domain, lead, roots: Sequence) -> UniPoly:
    """Expand ``lead * prod(t - root)``."""
    lead = domain.convert(lead)
    if lead == 0:
        raise ValueError("leading coefficient must be nonzero")
    coeffs = [lead]
    for r in roots:
        r = domain.convert(r)
        new = [domain.zero] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            new[k + 1] = new[k + 1] + c
            new[k] = new[k] - r * c
        coeffs = new
    return UniPoly(domain, coeffs)


def uni_gcd(p: UniPoly, q: UniPoly) -> UniPoly:
    """Monic gcd over an exact domain (the zero pair gives zero)."""
    check_same(p.domain, q.domain)
    if not p.domain.exact:
        raise DomainError("gcd over approximate complex numbers is ill-posed")
    a, b = p, q
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


def uni_gcd_many(polys: Iterable[UniPoly]) -> UniPoly:
    return reduce(uni_gcd, polys)


def monomials(g: int, nvars: int = NVARS) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree ``g``, in a fixed deterministic order."""
    out = []
    for combo in combinations_with_replacement(range(nvars), g):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


class HomogeneousPoly:
    """Sparse homogeneous polynomial of total degree ``degree`` in ``z0..z4``."""

    __slots__ = ("domain", "degree", "terms", "nvars")

    def __init__(self, domain: Domain, degree: int, terms: Mapping[tuple[int, ...], object] = (),
                 nvars: int = NVARS):
        clean = {}
        for e, c in dict(terms).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars or sum(e) != degree or min(e) < 0:
                raise ValueError(f"exponent {e} does not have total degree {degree}")
            c = domain.convert(c)
            if c != 0:
                clean[e] = clean.get(e, domain.zero) + c
                if clean[e] == 0:
                    del clean[e]
        self.domain = domain
        self.degree = degree
        self.terms = clean
        self.nvars = nvars

    @classmethod
    def variable(cls, domain: Domain, i: int, nvars: int = NVARS) -> HomogeneousPoly:
        e = [0] * nvars
        e[i] = 1
        return cls(domain, 1, {tuple(e): 1}, nvars)

    @classmethod
    def monomial(cls, domain: Domain, exps: Sequence[int], coef=1) -> HomogeneousPoly:
        return cls(domain, sum(exps), {tuple(exps): coef}, len(exps))

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: HomogeneousPoly) -> None:
        check_same(self.domain, other.domain)
        if self.nvars != other.nvars:
            raise ValueError("different numbers of variables")

    def __add__(self, other: HomogeneousPoly) -> HomogeneousPoly:
        self._check(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError("adding forms of different degrees")
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, self.domain.zero) + c
        return HomogeneousPoly(self.domain, self.degree, terms, self.nvars)

    def __neg__(self) -> HomogeneousPoly:
        return HomogeneousPoly(self.domain, self.degree,
                               {e: -c for e, c in self.terms.items()}, self.nvars)

    def __sub__(self, other: HomogeneousPoly) -> HomogeneousPoly:
        return self + (-other)

    def __mul__(self, other) -> HomogeneousPoly:
        if not isinstance(other, HomogeneousPoly):
            c = self.domain.convert(other)
            return HomogeneousPoly(self.domain, self.degree,
                                   {e: v * c for e, v in self.terms.items()}, self.nvars)
        self._check(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, self.domain.zero) + c1 * c2
        return HomogeneousPoly(self.domain, self.degree + other.degree, terms, self.nvars)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomogeneousPoly):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.domain == other.domain
        return (self.domain == other.domain and self.degree == other.degree
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.domain, self.degree, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"HomogeneousPoly(deg={self.degree}, terms={len(self.terms)})"

    def coefficient(self, exps: Sequence[int]):
        return self.terms.get(tuple(exps), self.domain.zero)

    def partial(self, i: int) -> HomogeneousPoly:
        return hom_partial(self, i)

    def __call__(self, point: Sequence):
        return hom_eval(self, point)

    def to_domain(self, domain: Domain) -> HomogeneousPoly:
        return HomogeneousPoly(domain, self.degree, self.terms, self.nvars)

    def max_abs(self) -> float:
        return max((float(abs(c)) for c in self.terms.values()), default=0.0)


def hom_partial(F: HomogeneousPoly, i: int) -> HomogeneousPoly:
    """Formal partial derivative with respect to ``z_i``."""
    if not 0 <= i < F.nvars:
        raise IndexError(f"variable index {i} out of range")
    terms = {}
    for e, c in F.terms.items():
        if e[i]:
            e2 = list(e)
            e2[i] -= 1
            terms[tuple(e2)] = c * e[i]
    return HomogeneousPoly(F.domain, max(F.degree - 1, 0), terms, F.nvars)


def hom_eval(F: HomogeneousPoly, point: Sequence):
    point = [F.domain.convert(x) for x in point]
    acc = F.domain.zero
    for e, c in F.terms.items():
        term = c
        for x, k in zip(point, e):
            if k:
                term = term * x**k
        acc = acc + term
    return acc


def fermat(domain: Domain, degree: int = 5, nvars: int = NVARS) -> HomogeneousPoly:
    terms = {}
    for i in range(nvars):
        e = [0] * nvars
        e[i] = degree
        terms[tuple(e)] = 1
    return HomogeneousPoly(domain, degree, terms, nvars)


def _power_table(components: Sequence[UniPoly], g: int) -> list[list[UniPoly]]:
    domain = components[0].domain
    table = []
    for c in components:
        check_same(domain, c.domain)
        pw = [UniPoly.constant(domain, 1)]
        for _ in range(g):
            pw.append(pw[-1] * c)
        table.append(pw)
    return table


def _mono_pullback(powers, e) -> UniPoly:
    p = powers[0][0]
    for i, k in enumerate(e):
        if k:
            p = p * powers[i][k]
    return p


def _imul(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _int_monomial_table(comps: list[list[int]], g: int) -> dict[tuple[int, ...], list[int]]:
    """Pullbacks of all degree-g monomials along integer components, built by
    multiplying a degree-(g-1) monomial by one variable."""
    table = {(0,) * len(comps): [1]}
    for k in range(1, g + 1):
        nxt = {}
        for e in monomials(k, len(comps)):
            i = next(j for j, x in enumerate(e) if x)
            prev = e[:i] + (e[i] - 1,) + e[i + 1:]
            nxt[e] = _imul(table[prev], comps[i]) if comps[i] else [0]
        table = nxt
    return table


def _rational_pullbacks(Fs: Sequence[HomogeneousPoly], components: Sequence[UniPoly]) -> list[UniPoly]:
    # c_i = p_i / D with integer p_i, so F(c) = D^-g sum_e n_e p^e / L
    domain = components[0].domain
    D = lcm(*(x.denominator for c in components for x in c.coeffs)) if any(c.coeffs for c in components) else 1
    comps = [[int(x * D) for x in c.coeffs] for c in components]
    tables: dict[int, dict] = {}
    out = []
    for F in Fs:
        if F.is_zero():
            out.append(UniPoly(domain))
            continue
        if F.degree not in tables:
            tables[F.degree] = _int_monomial_table(comps, F.degree)
        table = tables[F.degree]
        L = lcm(*(Fraction(c).denominator for c in F.terms.values()))
        acc: list[int] = []
        for e, c in F.terms.items():
            n = int(Fraction(c) * L)
            poly = table[e]
            if len(poly) > len(acc):
                acc += [0] * (len(poly) - len(acc))
            for k, x in enumerate(poly):
                acc[k] += n * x
        scale = Fraction(1, L * D**F.degree)
        out.append(UniPoly(domain, [scale * x for x in acc]))
    return out


def monomial_pullbacks(components: Sequence[UniPoly], g: int) -> dict[tuple[int, ...], UniPoly]:
    """Pull back every degree-``g`` monomial along ``t -> (c_0(t), ..., c_4(t))``."""
    mons = monomials(g, len(components))
    if components[0].domain.name == "rational":
        return dict(zip(mons, _rational_pullbacks([HomogeneousPoly.monomial(components[0].domain, e)
                                                   for e in mons], components)))
    powers = _power_table(components, g)
    return {e: _mono_pullback(powers, e) for e in mons}


def pullback_many(Fs: Sequence[HomogeneousPoly], components: Sequence[UniPoly]) -> list[UniPoly]:
    """``F(c(t))`` for several F along the same curve, sharing the monomial table."""
    domain = components[0].domain
    for F in Fs:
        if len(components) != F.nvars:
            raise ValueError(f"need {F.nvars} components, got {len(components)}")
        check_same(domain, F.domain)
    for c in components:
        check_same(domain, c.domain)
    if domain.name == "rational":
        return _rational_pullbacks(Fs, components)
    out = []
    for F in Fs:
        if F.is_zero():
            out.append(UniPoly(domain))
            continue
        powers = _power_table(components, F.degree)
        acc = UniPoly(domain)
        for e, c in F.terms.items():
            acc = acc + _mono_pullback(powers, e) * c
        out.append(acc)
    return out


def pullback(F: HomogeneousPoly, components: Sequence[UniPoly]) -> UniPoly:
    """``F(c(t))`` as a univariate polynomial."""
    if len(components) != F.nvars:
        raise ValueError(f"need {F.nvars} components, got {len(components)}")
    return pullback_many([F], components)[0]
