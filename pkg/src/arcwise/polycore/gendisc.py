"""Generalized discriminants and root counting.

For a monic F of degree p with roots a_1..a_p,

    D_j = sum over j-subsets I of prod_{k<l in I} (a_k - a_l)^2.

By Cauchy-Binet D_j is the determinant of the j x j Hankel matrix of power
sums (s_{r+c}), and the power sums are polynomial in the coefficients through
Newton's identities. That gives an exact expression at every degree, so no
symmetric-function rewriting table is needed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import mpmath

from .mpoly import MPoly, PolyError, exact_det, InfiniteMultiplicity
from .resultants import _view, bareiss_det, exact_quotient, gcd


class NotMonic(PolyError):
    pass


def power_sums(coeffs: Sequence, count: int) -> list:
    """s_0..s_count of the roots of the monic polynomial with ``coeffs`` (low to high)."""
    p = len(coeffs) - 1
    if p < 0 or coeffs[-1] != 1:
        raise NotMonic("power sums need a monic polynomial")
    a = list(coeffs)
    zero = a[0] * 0
    s = [zero + p]
    for k in range(1, count + 1):
        acc = zero
        for i in range(1, min(k - 1, p) + 1):
            acc = acc + a[p - i] * s[k - i]
        if k <= p:
            acc = acc + a[p - k] * k
        s.append(-acc)
    return s


def _hankel_det(s: list, j: int, exact_div):
    mat = [[s[r + c] for c in range(j)] for r in range(j)]
    if j == 1:
        return mat[0][0]
    return bareiss_det(mat, exact_div, lambda x: not x)


def generalized_discriminant(F, j: int, var: str | None = None) -> MPoly:
    """Exact D_j of a monic F as a polynomial in the remaining variables."""
    v = _view(F, var)
    p = v.degree
    if not 1 <= j <= max(p, 0):
        raise PolyError(f"j = {j} out of range 1..{p}")
    if not v.is_monic():
        raise NotMonic("generalized discriminant needs a monic polynomial")
    s = power_sums(v.coeffs(), 2 * j - 2)
    return _hankel_det(s, j, lambda x, y: exact_quotient(x, y))


def generalized_discriminants_numeric(roots: Sequence, prec: int = 256) -> list:
    """D_1..D_p from numeric roots (Hankel of numeric power sums)."""
    with mpmath.workprec(prec):
        r = [mpmath.mpc(x) for x in roots]
        p = len(r)
        s = [mpmath.fsum(x ** k for x in r) for k in range(2 * p)]
        out = []
        for j in range(1, p + 1):
            mat = mpmath.matrix([[s[a + b] for b in range(j)] for a in range(j)])
            out.append(mpmath.det(mat))
        return out


def generalized_discriminant_from_roots(roots: Sequence, j: int, prec: int = 256):
    return generalized_discriminants_numeric(roots, prec)[j - 1]


def generalized_discriminant_by_subsets(roots: Sequence, j: int):
    """Direct subset sum; exact when roots are exact. Test oracle."""
    total = 0
    for sub in itertools.combinations(roots, j):
        prod = 1
        for x, y in itertools.combinations(sub, 2):
            prod = prod * (x - y) ** 2
        total = total + prod
    return total


@dataclass(frozen=True)
class DistinctRootCount:
    count: int
    degree: int
    values: dict = field(default_factory=dict)  # j -> exact D_j for j >= count
    exact: bool = True

    def __int__(self):
        return self.count


def distinct_root_count(F, var: str | None = None) -> DistinctRootCount:
    v = _view(F, var)
    if v.base.used_variables() not in ((), (v.main_var,)):
        raise PolyError("coefficients must be exact constants")
    if not v.is_monic():
        raise NotMonic("distinct_root_count needs a monic polynomial")
    p = v.degree
    if p == 0:
        return DistinctRootCount(0, 0, {})
    g = gcd(v.base, v.base.diff(v.main_var))
    d = p - g.degree(v.main_var)
    s = power_sums([c.constant_value() for c in v.coeffs()], 2 * p)
    vals = {}
    for j in range(d, p + 1):
        mat = [[s[a + b] for b in range(j)] for a in range(j)]
        vals[j] = exact_det(mat)
    if vals[d] == 0 or any(vals[j] != 0 for j in range(d + 1, p + 1)):
        raise PolyError("root-count certificate inconsistent")  # pragma: no cover
    return DistinctRootCount(d, p, vals, True)


def multiplicity_at(F: MPoly, point: Sequence | None = None) -> int:
    """Order of F at ``point`` (origin by default)."""
    if F.is_zero():
        raise InfiniteMultiplicity("the zero polynomial has infinite multiplicity")
    G = F.translate(point) if point is not None else F
    return G.min_degree()


def twodiscr_constant(multiplicities: Sequence[int]) -> int:
    """C in D_d(F) = C * disc(F_red) for the multiplicity pattern of F."""
    out = 1
    for m in multiplicities:
        out *= m
    return out
