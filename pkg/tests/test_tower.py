from fractions import Fraction

from hypothesis import given, strategies as st

from arcwise.polycore import MPoly, discriminant, exact_quotient, parse_polynomial, squarefree_part
from arcwise.tower import (LinearChange, PseudoPolySystem, TowerError, build_parametric_tower, build_tower,
                           check_equisingular, check_transverse, estimate_domain_radii,
                           make_derivation_complete, verify_invariants)

XZ = ("x", "z")


def P(text, vs=XZ):
    return parse_polynomial(text, vs)


def test_z2_minus_x2_chain():
    sys, change = build_tower(P("z^2 - x^2"), XZ)
    assert change.is_identity()
    assert sys.levels[2] == P("z^2 - x^2")
    assert sys.levels[1] == P("x^2")  # monicized from 4 x^2
    assert sys.levels[0] == P("1")
    assert check_equisingular(sys)
    assert check_transverse(sys)["transverse"]


def test_single_level():
    sys, _ = build_tower(parse_polynomial("x^2", ("x",)), ("x",))
    assert sys.degrees == (0, 2)
    assert sys.levels[0].is_constant() and not sys.levels[0].is_zero()


def test_transverse_fails_for_z2_minus_x():
    sys, _ = build_tower(P("z^2 - x"), XZ)
    assert check_transverse(sys)["levels"][2] is False


def test_parametric_example():
    F = parse_polynomial("z^2 - (1+t)*x^2", ("t", "x", "z"))
    sys, _, locus = build_parametric_tower(F, ("t",), XZ)
    assert sys.levels[0] == 1
    assert sys.degrees[1:] == (2, 2)
    assert [str(p) for p in locus] == [str(parse_polynomial("t + 1", ("t", "x", "z")))]
    assert check_equisingular(sys, (0,))
    assert not check_equisingular(sys, (-1,))


def test_t_independent_reduces_to_absolute():
    F = parse_polynomial("z^2 - x^2", ("t", "x", "z"))
    sys, _, locus = build_parametric_tower(F, ("t",), XZ)
    assert locus == [] or all(p.is_constant() for p in locus)
    assert check_equisingular(sys, (Fraction(1, 3),))


def test_briancon_speder_fixed_t():
    F = parse_polynomial("z^5 + 3/10*y^6*z + y^7*x + x^15", ("z", "y", "x"))
    sys, _ = build_tower(F, ("z", "y", "x"))
    assert sys.levels[0].is_constant() and not sys.levels[0].is_zero()
    assert sys.degrees[3] == 15


def test_derivation_complete_examples():
    z = ("z",)
    assert make_derivation_complete(P("z^2", z), "z").base == P("z^3", z)
    assert make_derivation_complete(P("z", z), "z").base == P("z", z)
    assert make_derivation_complete(P("z^3 - 3*z", z), "z").degree == 6


def test_equisingular_conventions():
    vs = ("t", "x")
    one = MPoly.const(1, vs)
    unit_sys = PseudoPolySystem(("x",), ("t",), (one, one), (0, 0), LinearChange.identity(1))
    assert check_equisingular(unit_sys, (0,))
    t_sys = PseudoPolySystem(("x",), ("t",), (parse_polynomial("t", vs), one), (0, 0), LinearChange.identity(1))
    assert not check_equisingular(t_sys, (0,))
    assert check_equisingular(t_sys, (1,))


def test_serialization_round_trip():
    F = parse_polynomial("z^3 + t*x^4*z + y^6 + x^6", ("t", "x", "y", "z"))
    sys, _, _ = build_parametric_tower(F, ("t",), ("x", "z", "y"))
    again = PseudoPolySystem.from_json(sys.to_json())
    assert again.levels == sys.levels and again.degrees == sys.degrees


@given(st.integers(-3, 3), st.integers(1, 3), st.integers(0, 2))
def test_divisibility_invariant(a, b, c):
    F = P(f"z^3 + ({a})*x^{b}*z + x^{b + c + 2}")
    sys, _ = build_tower(F, XZ)
    rep = verify_invariants(sys)
    assert rep["ok"]
    for i in range(1, sys.n + 1):
        if sys.degrees[i] == 0:
            continue
        red = squarefree_part(sys.levels[i], sys.space_vars[i - 1]).base
        D = discriminant(red, sys.space_vars[i - 1])
        exact_quotient(sys.levels[i - 1], D) if not D.is_constant() else None


def test_deterministic_given_seed():
    F = P("z^2 + x*z + x^3")
    a, _ = build_tower(F, XZ, seed=4)
    b, _ = build_tower(F, XZ, seed=4)
    assert a.to_json() == b.to_json()


def test_non_monic_top_gets_changed_or_rejected():
    F = P("x*z^2 + z + x")
    try:
        sys, change = build_tower(F, XZ)
    except TowerError:
        return
    assert not change.is_identity()
    assert sys.levels[2].lc("z") == 1


def test_domain_radii_nested():
    sys, _ = build_tower(P("z^2 - x^3"), XZ)
    r = estimate_domain_radii(sys)
    assert 0 < r[0] < r[1]
