"""Dense matrices over a scalar domain: rank, kernel, determinant, inverse.

Exact domains use Gaussian elimination.  Complex matrices use singular
values (numpy at 53 bits, mpmath above) with a relative zero threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .scalars import ComplexField, Domain, check_same


@dataclass(frozen=True)
class RankPolicy:
    """Singular values below ``tol * sigma_max`` count as zero."""

    tol: float = 1e-8
    max_escalations: int = 4


DEFAULT_POLICY = RankPolicy()


class Matrix:
    __slots__ = ("domain", "rows")

    def __init__(self, domain: Domain, rows: Iterable[Iterable]):
        self.domain = domain
        self.rows = tuple(tuple(domain.convert(x) for x in r) for r in rows)
        if self.rows and len({len(r) for r in self.rows}) != 1:
            raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, domain: Domain, n: int) -> Matrix:
        return cls(domain, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, domain: Domain, m: int, n: int) -> Matrix:
        return cls(domain, [[0] * n for _ in range(m)])

    @classmethod
    def from_numpy(cls, domain: Domain, arr) -> Matrix:
        return cls(domain, arr.tolist())

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    @property
    def nrows(self) -> int:
        return self.shape[0]

    @property
    def ncols(self) -> int:
        return self.shape[1]

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> tuple:
        return self.rows[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def transpose(self) -> Matrix:
        return Matrix(self.domain, zip(*self.rows)) if self.rows else self

    @property
    def T(self) -> Matrix:
        return self.transpose()

    def __matmul__(self, other: Matrix) -> Matrix:
        check_same(self.domain, other.domain)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if _is_float(self.domain):
            return Matrix.from_numpy(self.domain, self.to_numpy() @ other.to_numpy())
        cols = other.transpose().rows
        zero = self.domain.zero
        return Matrix(self.domain, [[sum((a * b for a, b in zip(r, c)), zero) for c in cols]
                                    for r in self.rows])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
        return Matrix(self.domain, [[self.rows[i][j] for j in cols] for i in rows])

    def to_numpy(self) -> np.ndarray:
        return np.array([[complex(x) for x in r] for r in self.rows], dtype=complex)

    def to_domain(self, domain: Domain) -> Matrix:
        return Matrix(domain, self.rows)

    def max_abs(self) -> float:
        return max((float(abs(x)) for r in self.rows for x in r), default=0.0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.domain == other.domain and self.rows == other.rows

    def __hash__(self):
        return hash((self.domain, self.rows))

    def __repr__(self) -> str:
        return f"Matrix({self.domain.name}, {self.nrows}x{self.ncols})"


def _is_float(domain: Domain) -> bool:
    return isinstance(domain, ComplexField) and domain.ctx is None


def _is_mp(domain: Domain) -> bool:
    return isinstance(domain, ComplexField) and domain.ctx is not None


def echelon(M: Matrix) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over an exact domain; returns (rows, pivot columns)."""
    if not M.domain.exact:
        raise ValueError("exact elimination needs an exact domain")
    rows = [list(r) for r in M.rows]
    m, n = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = M.domain.one / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def singular_values(M: Matrix) -> list[float]:
    if _is_float(M.domain):
        if M.nrows == 0 or M.ncols == 0:
            return []
        return [float(s) for s in np.linalg.svd(M.to_numpy(), compute_uv=False)]
    if _is_mp(M.domain):
        ctx = M.domain.ctx
        s = ctx.svd_c(ctx.matrix([list(r) for r in M.rows]), compute_uv=False)
        return sorted((float(abs(x)) for x in s), reverse=True)
    raise ValueError("singular values need a complex domain")


def rank(M: Matrix, policy: RankPolicy = DEFAULT_POLICY) -> int:
    if M.domain.exact:
        return len(echelon(M)[1])
    sv = singular_values(M)
    if not sv or sv[0] == 0:
        return 0
    return sum(1 for s in sv if s > policy.tol * sv[0])


def kernel(M: Matrix, policy: RankPolicy = DEFAULT_POLICY) -> Matrix:
    """Basis of the right kernel, one basis vector per column."""
    m, n = M.shape
    if M.domain.exact:
        rows, pivots = echelon(M)
        free = [j for j in range(n) if j not in pivots]
        basis = []
        for f in free:
            v = [M.domain.zero] * n
            v[f] = M.domain.one
            for r, p in zip(rows, pivots):
                v[p] = -r[f]
            basis.append(v)
        return Matrix(M.domain, list(zip(*basis)) if basis else [[] for _ in range(n)])
    if _is_float(M.domain):
        a = M.to_numpy()
        if m == 0:
            return Matrix.identity(M.domain, n)
        _, s, vh = np.linalg.svd(a)
        r = int(np.sum(s > policy.tol * s[0])) if s.size and s[0] > 0 else 0
        null = vh[r:].conj().T
        return Matrix.from_numpy(M.domain, null) if null.shape[1] else Matrix(M.domain, [[] for _ in range(n)])
    ctx = M.domain.ctx
    u, s, v = ctx.svd_c(ctx.matrix([list(r) for r in M.rows]), full_matrices=True)
    sv = [abs(s[i]) for i in range(len(s))]
    r = sum(1 for x in sv if sv and x > policy.tol * sv[0])
    basis = [[ctx.conj(v[i, j]) for i in range(r, v.rows)] for j in range(v.cols)]
    return Matrix(M.domain, basis)


def equilibrate(M: Matrix) -> Matrix:
    """Scale rows, then columns, to unit max-norm (rank preserving)."""
    a = M.to_numpy() if _is_float(M.domain) else None
    if a is not None:
        r = np.abs(a).max(axis=1, keepdims=True)
        r[r == 0] = 1
        a = a / r
        c = np.abs(a).max(axis=0, keepdims=True)
        c[c == 0] = 1
        return Matrix.from_numpy(M.domain, a / c)
    rows = []
    for row in M.rows:
        s = max((abs(x) for x in row), default=0) or 1
        rows.append([x / s for x in row])
    cols = list(zip(*rows))
    cs = [max((abs(x) for x in col), default=0) or 1 for col in cols]
    return Matrix(M.domain, [[x / s for x, s in zip(row, cs)] for row in rows])


def det(M: Matrix):
    m, n = M.shape
    if m != n:
        raise ValueError(f"determinant of a non-square {m}x{n} matrix")
    if n == 0:
        return M.domain.one
    if _is_float(M.domain):
        return complex(np.linalg.det(M.to_numpy()))
    if _is_mp(M.domain):
        ctx = M.domain.ctx
        return ctx.mpc(ctx.det(ctx.matrix([list(r) for r in M.rows])))
    rows = [list(r) for r in M.rows]
    out = M.domain.one
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if piv is None:
            return M.domain.zero
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            out = -out
        out = out * rows[c][c]
        inv = M.domain.one / rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] * inv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return out


def inverse(M: Matrix) -> Matrix:
    m, n = M.shape
    if m != n:
        raise ValueError("inverse of a non-square matrix")
    if _is_float(M.domain):
        return Matrix.from_numpy(M.domain, np.linalg.inv(M.to_numpy()))
    if _is_mp(M.domain):
        ctx = M.domain.ctx
        inv = ctx.inverse(ctx.matrix([list(r) for r in M.rows]))
        return Matrix(M.domain, [[inv[i, j] for j in range(n)] for i in range(n)])
    aug = Matrix(M.domain, [list(r) + [1 if i == j else 0 for j in range(n)]
                            for i, r in enumerate(M.rows)])
    rows, pivots = echelon(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ZeroDivisionError("matrix is singular")
    return Matrix(M.domain, [r[n:] for r in rows])

