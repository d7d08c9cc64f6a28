"""Plain-text format for incidence points and point configurations.

Incidence point (exact rationals written ``num/den``)::

    # cjl incidence v1
    degree 2
    curve 0 c_0 c_1 c_2          (t^0 first; one line per component 0..4)
    ...
    quintic <number of terms>
    term e0 e1 e2 e3 e4 coef     (one line per nonzero term)

Point configuration (complex numbers as two reprs ``re im``)::

    # cjl config v1
    degree 2
    delta1 re im
    delta2 re im
    point <role> re im           (one line per t_i, in order; role is e.g. t1, theta:0:1, eps:3, generic)
"""

from __future__ import annotations

import hashlib
from fractions import Fraction

from .algebra import QQ, HomogeneousPoly, UniPoly
from .curvespace import RationalCurve
from .incidence import IncidencePoint, PointConfiguration

INCIDENCE_HEADER = "# cjl incidence v1"
CONFIG_HEADER = "# cjl config v1"


class FormatError(ValueError):
    pass


def _q(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _parse_q(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as e:
        raise FormatError(f"bad rational {s!r}") from e


def _c(z) -> str:
    z = complex(z)
    return f"{z.real!r} {z.imag!r}"


def dump_curve(c: RationalCurve) -> list[str]:
    lines = [f"degree {c.degree}"]
    for i, comp in enumerate(c.components):
        coeffs = [comp.coeff(k) for k in range(c.degree + 1)]
        lines.append(f"curve {i} " + " ".join(_q(x) for x in coeffs))
    return lines


def dump_quintic(f: HomogeneousPoly) -> list[str]:
    terms = sorted(f.terms.items())
    lines = [f"quintic {len(terms)}"]
    for exps, coef in terms:
        lines.append("term " + " ".join(str(e) for e in exps) + " " + _q(coef))
    return lines


def dumps_incidence(p: IncidencePoint) -> str:
    return "\n".join([INCIDENCE_HEADER] + dump_curve(p.curve) + dump_quintic(p.quintic)) + "\n"


def _lines(text: str, header: str) -> list[list[str]]:
    rows = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not rows or rows[0] != header:
        raise FormatError(f"missing header {header!r}")
    return [r.split() for r in rows[1:] if not r.startswith("#")]


def loads_incidence(text: str) -> IncidencePoint:
    rows = _lines(text, INCIDENCE_HEADER)
    if not rows or rows[0][0] != "degree":
        raise FormatError("expected a degree line")
    d = int(rows[0][1])
    comps = {}
    terms = {}
    nterms = None
    for r in rows[1:]:
        if r[0] == "curve":
            if len(r) != d + 3:
                raise FormatError(f"curve line needs {d + 1} coefficients")
            comps[int(r[1])] = UniPoly(QQ, [_parse_q(x) for x in r[2:]])
        elif r[0] == "quintic":
            nterms = int(r[1])
        elif r[0] == "term":
            if len(r) != 7:
                raise FormatError("term line needs 5 exponents and a coefficient")
            terms[tuple(int(e) for e in r[1:6])] = _parse_q(r[6])
        else:
            raise FormatError(f"unknown record {r[0]!r}")
    if sorted(comps) != list(range(5)):
        raise FormatError("need curve lines 0..4")
    if nterms is None or nterms != len(terms):
        raise FormatError("term count mismatch")
    c = RationalCurve(d, tuple(comps[i] for i in range(5)))
    return IncidencePoint(c, HomogeneousPoly(QQ, 5, terms))


def _role_str(role: tuple) -> str:
    return ":".join(str(x) for x in role)


def _parse_role(s: str) -> tuple:
    parts = s.split(":")
    return (parts[0],) + tuple(int(x) for x in parts[1:])


def dumps_config(cfg: PointConfiguration) -> str:
    lines = [CONFIG_HEADER, f"degree {cfg.degree}", f"delta1 {_c(cfg.delta1)}", f"delta2 {_c(cfg.delta2)}"]
    for role, t in zip(cfg.roles, cfg.points):
        lines.append(f"point {_role_str(role)} {_c(t)}")
    return "\n".join(lines) + "\n"


def loads_config_points(text: str) -> dict:
    """Parse a configuration file into {degree, delta1, delta2, roles, points}.

    Charts are not stored; rebuild a full PointConfiguration with
    :func:`cjl.incidence.build_config` and ``t12``.
    """
    rows = _lines(text, CONFIG_HEADER)
    out: dict = {"roles": [], "points": []}
    for r in rows:
        if r[0] == "degree":
            out["degree"] = int(r[1])
        elif r[0] in ("delta1", "delta2"):
            out[r[0]] = complex(float(r[1]), float(r[2]))
        elif r[0] == "point":
            out["roles"].append(_parse_role(r[1]))
            out["points"].append(complex(float(r[2]), float(r[3])))
        else:
            raise FormatError(f"unknown record {r[0]!r}")
    if "degree" not in out or len(out["points"]) != 5 * out["degree"] + 1:
        raise FormatError("configuration needs a degree and 5d+1 points")
    return out


def sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def curve_hash(c: RationalCurve) -> str:
    return sha256("\n".join(dump_curve(c)))


def quintic_hash(f: HomogeneousPoly) -> str:
    return sha256("\n".join(dump_quintic(f)))
