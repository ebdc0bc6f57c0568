"""Shared hypothesis strategies."""

from fractions import Fraction

from hypothesis import strategies as st

from arcwise.polycore import GaussianRational, MPoly

VARS = ("x", "y", "z")

rationals = st.builds(Fraction, st.integers(-50, 50), st.integers(1, 12))
nonzero_rationals = rationals.filter(lambda q: q != 0)
gaussians = st.builds(lambda a, b: a if b == 0 else GaussianRational(a, b), rationals, rationals)


@st.composite
def polys(draw, variables=VARS, max_terms=6, max_deg=5, gaussian=False):
    coeff = gaussians if gaussian else rationals
    n = draw(st.integers(0, max_terms))
    F = MPoly.zero(variables)
    for _ in range(n):
        exps = draw(st.lists(st.integers(0, max_deg), min_size=len(variables), max_size=len(variables)))
        F = F + MPoly.monomial(exps, draw(coeff), variables)
    return F


def _atom(draw, variables):
    kind = draw(st.integers(0, 3))
    if kind == 0:
        return draw(st.sampled_from(variables))
    if kind == 1:
        q = draw(rationals)
        return str(q) if q >= 0 else f"({q})"
    if kind == 2:
        return "i"
    return f"{draw(st.sampled_from(variables))}^{draw(st.integers(0, 4))}"


@st.composite
def poly_texts(draw, variables=VARS, depth=3):
    """Random texts in the input grammar: sums of products of atoms, parentheses and powers."""
    if depth == 0:
        return _atom(draw, variables)
    parts = []
    for _ in range(draw(st.integers(1, 3))):
        factors = [draw(poly_texts(variables, depth - 1)) if draw(st.booleans()) else _atom(draw, variables)
                   for _ in range(draw(st.integers(1, 2)))]
        f = "*".join(f"({x})" if ("+" in x or "-" in x) else x for x in factors)
        if draw(st.integers(0, 4)) == 0:
            f = f"({f})^{draw(st.integers(0, 2))}"
        parts.append(f)
    text = parts[0]
    for p in parts[1:]:
        text += draw(st.sampled_from([" + ", " - "])) + p
    return text
