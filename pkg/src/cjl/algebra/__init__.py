"""Scalar domains, polynomials and dense linear algebra."""

from .linalg import (DEFAULT_POLICY, Matrix, RankPolicy, det, echelon, equilibrate, inverse, kernel,
                     rank, singular_values)
from .poly import (HomogeneousPoly, UniPoly, fermat, hom_eval, hom_partial, monomial_pullbacks,
                   monomials, pullback, pullback_many, uni_eval, uni_from_roots, uni_gcd, uni_gcd_many)
from .roots import RootFindingError, residual_scale, uni_roots
from .scalars import (CC, DEFAULT_PRIME, GF, QQ, ComplexField, Domain, DomainError, Fp,
                      PrimeField, RationalField, domain_from_name)

__all__ = [
    "CC", "DEFAULT_POLICY", "DEFAULT_PRIME", "GF", "QQ", "ComplexField", "Domain", "DomainError",
    "Fp", "HomogeneousPoly", "Matrix", "PrimeField", "RankPolicy", "RationalField",
    "RootFindingError", "UniPoly", "det", "domain_from_name", "echelon", "equilibrate", "fermat", "hom_eval",
    "hom_partial", "inverse", "kernel", "monomial_pullbacks", "monomials", "pullback", "pullback_many", "rank",
    "residual_scale", "singular_values", "uni_eval", "uni_from_roots", "uni_gcd",
    "uni_gcd_many", "uni_roots",
]
