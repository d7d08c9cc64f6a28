"""Scalar domains: exact rationals, a prime field, and approximate complex numbers.

Values are plain Python objects supporting the arithmetic operators
(``Fraction``, :class:`Fp`, ``complex`` or ``mpmath.mpc``).  A :class:`Domain`
is the tag that travels with every polynomial and matrix; operations between
objects with different tags raise :class:`DomainError`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import mpmath
from mpmath.libmp import isprime

DEFAULT_PRIME = 2**61 - 1


class DomainError(ValueError):
    """Raised when values from incompatible scalar domains are combined."""


class Fp:
    """Element of the prime field Z/pZ."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, Fp):
            if other.p != self.p:
                raise DomainError(f"mixing GF({self.p}) and GF({other.p})")
            return other.v
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p) % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Fp(-self.v, self.p)

    def inverse(self) -> Fp:
        if self.v == 0:
            raise ZeroDivisionError("inverse of 0 in prime field")
        return Fp(pow(self.v, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o == 0:
            raise ZeroDivisionError("division by 0 in prime field")
        return Fp(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(o, self.p) / self

    def __pow__(self, n: int):
        return Fp(pow(self.v, n, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, Fp):
            return self.p == other.p and self.v == other.v
        if isinstance(other, int):
            return self.v == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return f"Fp({self.v}, {self.p})"


class Domain:
    """Base class of the scalar domain tags."""

    name: str = "abstract"
    exact: bool = True

    def convert(self, x):
        raise NotImplementedError

    @property
    def zero(self):
        return self.convert(0)

    @property
    def one(self):
        return self.convert(1)

    def is_zero(self, x) -> bool:
        return x == 0


@dataclass(frozen=True)
class RationalField(Domain):
    name: str = field(default="rational", init=False)

    def convert(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, (int, str)):
            return Fraction(x)
        if isinstance(x, Fp):
            raise DomainError("cannot lift a prime-field element to Q")
        if isinstance(x, float):
            return Fraction(x)
        raise DomainError(f"cannot convert {type(x).__name__} to an exact rational")

    def random(self, rng: random.Random, height: int = 20):
        return Fraction(rng.randint(-height, height))


@dataclass(frozen=True)
class PrimeField(Domain):
    p: int = DEFAULT_PRIME
    name: str = field(default="prime", init=False)

    def __post_init__(self):
        if self.p < 2 or not isprime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def convert(self, x):
        if isinstance(x, Fp):
            if x.p != self.p:
                raise DomainError(f"mixing GF({self.p}) and GF({x.p})")
            return x
        if isinstance(x, int):
            return Fp(x, self.p)
        if isinstance(x, Fraction):
            return Fp(x.numerator, self.p) / Fp(x.denominator, self.p)
        raise DomainError(f"cannot convert {type(x).__name__} to GF({self.p})")

    def random(self, rng: random.Random):
        return Fp(rng.randrange(self.p), self.p)


@dataclass(frozen=True)
class ComplexField(Domain):
    """Approximate complex numbers carrying their working precision in bits."""

    prec: int = 53
    name: str = field(default="complex", init=False)
    exact = False

    @cached_property
    def ctx(self):
        if self.prec == 53:
            return None
        ctx = mpmath.MPContext()
        ctx.prec = self.prec
        return ctx

    def convert(self, x):
        if isinstance(x, Fp):
            raise DomainError("cannot embed a prime-field element in C")
        if self.ctx is None:
            return complex(x)
        if isinstance(x, Fraction):
            return self.ctx.mpc(self.ctx.mpf(x.numerator) / x.denominator)
        return self.ctx.mpc(x)

    def escalate(self) -> ComplexField:
        return ComplexField(self.prec * 2)

    @property
    def eps(self) -> float:
        return 2.0 ** (1 - self.prec)

    def abs(self, x) -> float:
        return float(abs(x))


QQ = RationalField()
CC = ComplexField()


def GF(p: int = DEFAULT_PRIME) -> PrimeField:
    return PrimeField(p)


def domain_from_name(name: str, prime: int = DEFAULT_PRIME, precision: int = 53) -> Domain:
    if name == "rational":
        return QQ
    if name == "prime":
        return PrimeField(prime)
    if name == "complex":
        return ComplexField(precision)
    raise ValueError(f"unknown field {name!r}")


def check_same(a: Domain, b: Domain) -> Domain:
    if a != b:
        raise DomainError(f"domain mismatch: {a} vs {b}")
    return a
