"""Complex root finding: companion eigenvalues, Newton polish, precision escalation."""

from __future__ import annotations

import numpy as np
from mpmath.libmp.libhyper import NoConvergence

from .poly import UniPoly, uni_eval
from .scalars import ComplexField, DomainError

MAX_ESCALATIONS = 4


class RootFindingError(ArithmeticError):
    """Residuals stayed above tolerance after every precision escalation."""


def residual_scale(p: UniPoly, r) -> float:
    """Backward-error scale sum_k |a_k| |r|^k for judging |p(r)|."""
    ar = float(abs(r))
    return sum(float(abs(c)) * ar**k for k, c in enumerate(p.coeffs))


def _companion_roots(cs: list[complex]) -> np.ndarray:
    # cs low to high, last nonzero
    n = len(cs) - 1
    lead = cs[-1]
    comp = np.zeros((n, n), dtype=complex)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = [-c / lead for c in cs[:-1]]
    return np.linalg.eigvals(comp)


def _polish(cs: list[complex], roots: np.ndarray, steps: int = 3) -> np.ndarray:
    p = np.array(cs[::-1])
    dp = np.polyder(p)
    out = roots.copy()
    for _ in range(steps):
        val = np.polyval(p, out)
        der = np.polyval(dp, out)
        ok = der != 0
        step = np.zeros_like(out)
        step[ok] = val[ok] / der[ok]
        cand = out - step
        # keep a Newton step only where it lowers the residual (guards clustered roots)
        better = np.abs(np.polyval(p, cand)) <= np.abs(val)
        out = np.where(better, cand, out)
    return out


def _residual_ok(p: UniPoly, roots, tol: float) -> bool:
    for r in roots:
        if float(abs(uni_eval(p, r))) > tol * residual_scale(p, r):
            return False
    return True


def uni_roots(p: UniPoly, tol: float = 1e-10, max_escalations: int = MAX_ESCALATIONS) -> list:
    """All complex roots of ``p`` with multiplicity.

    Every returned root r satisfies |p(r)| <= tol * sum_k |a_k||r|^k; when the
    53-bit path misses that, the computation is redone with mpmath at 2x, 4x, ...
    the working precision.
    """
    dom = p.domain
    if not isinstance(dom, ComplexField):
        raise DomainError("uni_roots needs a complex domain")
    if p.is_zero():
        raise ValueError("roots of the zero polynomial")
    if p.degree < 1:
        raise ValueError("roots of a constant polynomial")
    if dom.ctx is None:
        cs = [complex(c) for c in p.coeffs]
        roots = _polish(cs, _companion_roots(cs))
        roots = [complex(r) for r in roots]
        if _residual_ok(p, roots, tol):
            return roots
        prec = 106
    else:
        prec = dom.prec
    for _ in range(max_escalations + 1):
        hi = ComplexField(prec)
        ph = p.to_domain(hi)
        try:
            rs = hi.ctx.polyroots(list(reversed(ph.coeffs)), maxsteps=200, extraprec=prec)
        except NoConvergence:
            rs = None
        if rs is not None and _residual_ok(ph, rs, tol):
            return [dom.convert(r) for r in rs]
        prec *= 2
    raise RootFindingError(f"roots of degree-{p.degree} polynomial did not converge")
