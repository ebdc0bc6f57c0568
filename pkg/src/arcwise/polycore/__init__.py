"""Exact polynomial core: MPoly, grammar, resultants, generalized discriminants."""

from .gaussq import GaussianRational, to_scalar
from .gendisc import (DistinctRootCount, NotMonic, distinct_root_count, generalized_discriminant,
                      generalized_discriminant_by_subsets, generalized_discriminant_from_roots,
                      generalized_discriminants_numeric, multiplicity_at, power_sums)
from .grammar import (NegativeExponent, ParseError, UndeclaredIdentifier, parse_polynomial,
                      parse_rational, parse_var_spec)
from .mpoly import (IncompatibleVariables, InfiniteMultiplicity, MPoly, NotDivisible, PolyError,
                    SingularChange, exact_det, exact_inverse, format_poly)
from .resultants import (DegreeError, UPolyView, bareiss_det, discriminant, exact_quotient, gcd,
                         squarefree_decomposition,
                         monic_in, radical, resultant, squarefree_part, sylvester_matrix)


def arith(op: str, *operands, **kw) -> MPoly:
    """Dispatch for the elementary operations by name.

    add(F, G, ...), mul(F, G, ...), negate(F), partial_derivative(F, var),
    substitute(F, {var: value}), linear_change(F, matrix[, variables]).
    """
    if op == "add":
        out = operands[0]
        for g in operands[1:]:
            out = out + g
        return out
    if op == "mul":
        out = operands[0]
        for g in operands[1:]:
            out = out * g
        return out
    if op == "negate":
        return -operands[0]
    if op == "partial_derivative":
        return operands[0].diff(operands[1])
    if op == "substitute":
        return operands[0].subs(operands[1])
    if op == "linear_change":
        F, matrix = operands[0], operands[1]
        variables = operands[2] if len(operands) > 2 else kw.get("variables")
        return F.linear_change(matrix, variables)
    raise PolyError(f"unknown operation {op!r}")


__all__ = [
    "GaussianRational", "MPoly", "UPolyView", "arith", "parse_polynomial", "parse_rational",
    "parse_var_spec", "format_poly", "resultant", "discriminant", "gcd", "radical",
    "squarefree_part", "squarefree_decomposition", "exact_quotient", "monic_in", "generalized_discriminant",
    "generalized_discriminants_numeric", "generalized_discriminant_from_roots",
    "generalized_discriminant_by_subsets", "distinct_root_count", "DistinctRootCount",
    "multiplicity_at", "power_sums", "sylvester_matrix", "bareiss_det", "exact_det",
    "exact_inverse", "to_scalar", "PolyError", "ParseError", "UndeclaredIdentifier",
    "NegativeExponent", "IncompatibleVariables", "InfiniteMultiplicity", "NotDivisible",
    "SingularChange", "DegreeError", "NotMonic",
]
