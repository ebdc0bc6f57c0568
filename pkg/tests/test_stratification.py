from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from arcwise.polycore import MPoly, distinct_root_count, parse_polynomial
from arcwise.stratification import (AmbiguousClassification, build_filtration, classify_point, member,
                                    same_component_heuristic)
from arcwise.tower import LinearChange, PseudoPolySystem, build_tower

XZ = ("x", "z")


@pytest.fixture(scope="module")
def filt():
    sys, _ = build_tower(parse_polynomial("z^2 - x^2", XZ), XZ)
    return build_filtration(sys)


def test_base_case():
    sys, _ = build_tower(parse_polynomial("x^2", ("x",)), ("x",))
    f = build_filtration(sys)
    assert f.cell(1, 0) == [(1,)]
    assert member(f, 1, 0, [0]) and not member(f, 1, 0, [1])


def test_unit_levels_empty():
    one = MPoly.const(1, XZ)
    sys = PseudoPolySystem(XZ, (), (one, one, one), (0, 0, 0), LinearChange.identity(2))
    f = build_filtration(sys)
    assert f.cell(1, 0) == [] and f.cell(2, 0) == [] and f.cell(2, 1) == []


def test_unrolled_recursion(filt):
    # X^2_1 = V(F_2) | {x = 0};  X^2_0 = {x = 0} & V(F_2)
    assert sorted(filt.cell(2, 1)) == [(1,), (2,)]
    assert filt.cell(2, 0) == [(1, 2)]


@pytest.mark.parametrize("p,dim,typ", [((1, 1), 1, "I"), ((1, 3), 2, "II"), ((0, 0), 0, "I")])
def test_classify_examples(filt, p, dim, typ):
    lab = classify_point(filt, [Fraction(v) for v in p])
    assert (lab.dim, lab.type) == (dim, typ)


def test_ambiguous_band(filt):
    with pytest.raises(AmbiguousClassification):
        classify_point(filt, [mpmath.mpf(1), mpmath.mpf(1) + mpmath.mpf("0.75e-10")], tol=1e-10)


@given(st.integers(-6, 6), st.integers(-6, 6))
def test_compatibility(filt_x, filt_z):
    sys, _ = build_tower(parse_polynomial("z^2 - x^2", XZ), XZ)
    f = build_filtration(sys)
    lab = classify_point(f, [Fraction(filt_x), Fraction(filt_z)])
    zero = filt_z ** 2 == filt_x ** 2
    assert lab.type == ("I" if zero else "II")
    assert member(f, 2, lab.dim, [filt_x, filt_z])
    if lab.dim > 0:
        assert not member(f, 2, lab.dim - 1, [filt_x, filt_z])


@given(st.integers(1, 40), st.integers(1, 40))
def test_fibre_count_constant_on_cell(a, b):
    # x != 0 is the open cell of X^1; F_2(x, .) has 2 distinct roots above it
    x = Fraction(a, b)
    G = parse_polynomial("z^2 - x^2", XZ).subs({"x": x}).with_vars(("z",))
    assert distinct_root_count(G, "z").count == 2


def test_segment_heuristic(filt):
    assert same_component_heuristic(filt, [Fraction(1), Fraction(3)], [Fraction(2), Fraction(5)])["same"]
    assert same_component_heuristic(filt, [Fraction(1), Fraction(1)], [Fraction(2), Fraction(2)])["same"]
    assert not same_component_heuristic(filt, [Fraction(1), Fraction(1)], [Fraction(2), Fraction(3)])["same"]
