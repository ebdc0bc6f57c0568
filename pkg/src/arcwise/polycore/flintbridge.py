"""Conversion to and from python-flint multivariate rationals.

FLINT's fmpq_mpoly handles the heavy real-coefficient work (tower levels of
degree in the hundreds); the pure-Python kernels stay as the reference and as
the only route for Gaussian coefficients.
"""

from __future__ import annotations

from fractions import Fraction

from .mpoly import MPoly, PolyError

try:  # pragma: no cover - exercised implicitly
    import flint
    from flint.utils.flint_exceptions import FlintError

    HAVE_FLINT = True
except ImportError:  # pragma: no cover
    flint = None
    FlintError = ArithmeticError
    HAVE_FLINT = False


def _ctx(variables):
    # flint caches contexts by (names, ordering)
    return flint.fmpq_mpoly_ctx.get(tuple(variables), "lex")


def usable(*polys: MPoly) -> bool:
    return HAVE_FLINT and all(p.is_real() for p in polys) and all(p.nvars > 0 for p in polys)


def to_flint(F: MPoly):
    if not F.is_real():
        raise PolyError("FLINT route needs real rational coefficients")
    ctx = _ctx(F.variables)
    return ctx.from_dict({e: flint.fmpq(c.numerator, c.denominator) for e, c in F.terms.items()})


def from_flint(P, variables) -> MPoly:
    terms = {}
    for e, c in P.to_dict().items():
        terms[tuple(int(k) for k in e)] = Fraction(int(c.p), int(c.q))
    return MPoly._raw(tuple(variables), terms)


def resultant(A: MPoly, B: MPoly, var: str) -> MPoly:
    return from_flint(to_flint(A).resultant(to_flint(B), var), A.variables)


def gcd(A: MPoly, B: MPoly) -> MPoly:
    return from_flint(to_flint(A).gcd(to_flint(B)), A.variables)


def exact_quotient(A: MPoly, B: MPoly) -> MPoly | None:
    """A / B, or None when B does not divide A."""
    try:
        return from_flint(to_flint(A) / to_flint(B), A.variables)
    except (ZeroDivisionError, FlintError):
        return None


def squarefree_factors(F: MPoly) -> list[tuple[MPoly, int]]:
    unit, facs = to_flint(F).factor_squarefree()
    return [(from_flint(f, F.variables), int(m)) for f, m in facs]
