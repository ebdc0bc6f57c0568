from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from arcwise.numeric import mp_of
from arcwise.polycore import parse_polynomial
from arcwise.tower import build_parametric_tower
from arcwise.trivialize import (CertificateFailure, TrivConfig, TrivializationError, build_trivialization,
                                check_equimultiplicity, check_identities, check_level_preservation,
                                check_regularity, check_round_trip, eval_phi, eval_phi_inverse, leaf_tangent,
                                make_grid)

TXZ = ("t", "x", "z")
Q = Fraction


@pytest.fixture(scope="module")
def square_family():
    F = parse_polynomial("z^2 - (1+t)^2*x^2", TXZ)
    sys, _, _ = build_parametric_tower(F, ("t",), ("x", "z"))
    return F, sys


def phi(sys, kind="abs", policy="record"):
    return build_trivialization(sys, (0,), TrivConfig(kind=kind, on_certificate_failure=policy,
                                                      inverse_mode="observed"))


@pytest.mark.parametrize("kind", ["abs", "sympow"])
def test_root_transport(square_family, kind):
    _, sys = square_family
    Phi = phi(sys, kind)
    for t in (Q(1, 10), Q(-1, 8)):
        for x in (Q(1, 2), Q(-1, 3)):
            _, y = eval_phi(Phi, t, (x, x))
            assert abs(y[1] - (1 + t) * mp_of(x)) < mpmath.mpf(10) ** -30
            assert abs(y[0] - mp_of(x)) < mpmath.mpf(10) ** -30


def test_identities(square_family):
    _, sys = square_family
    Phi = phi(sys)
    grid = make_grid((-1, -1), (1, 1), 5)
    out = check_identities(Phi, grid, [Q(1, 4), Q(-1, 4)])
    assert out["pass"]


def test_triangular(square_family):
    _, sys = square_family
    Phi = phi(sys)
    _, y1 = eval_phi(Phi, Q(1, 8), (Q(1, 3), Q(1, 5)))
    _, y2 = eval_phi(Phi, Q(1, 8), (Q(1, 3), Q(-4, 5)))
    assert y1[0] == y2[0]


def test_certificate_policy(square_family):
    _, sys = square_family
    Phi = phi(sys, policy="raise")
    with pytest.raises(CertificateFailure):
        eval_phi(Phi, Q(1, 4), (Q(1, 2), Q(0)))
    # inside the certified ball nothing is raised
    eval_phi(Phi, Q(1, 4096), (Q(1, 2), Q(0)))


def test_requires_equisingular(square_family):
    _, sys = square_family
    with pytest.raises(TrivializationError):
        build_trivialization(sys, (-1,))


@settings(max_examples=15)
@given(st.integers(-8, 8), st.integers(-8, 8), st.integers(-4, 4).filter(lambda k: k != 0))
def test_round_trip_abs(a, b, k):
    F = parse_polynomial("z^2 - (1+t)^2*x^2", TXZ)
    sys, _, _ = build_parametric_tower(F, ("t",), ("x", "z"))
    Phi = phi(sys)
    x = (Q(a, 8), Q(b, 8))
    t = Q(k, 16)
    _, y = eval_phi(Phi, t, x)
    back = eval_phi_inverse(Phi, t, y)
    assert max(abs(u - mp_of(v)) for u, v in zip(back, x)) < mpmath.mpf(10) ** -20


def test_level_preservation_and_zero_set(square_family):
    F, sys = square_family
    Phi = phi(sys)
    grid = make_grid((-1, -1), (1, 1), 5)
    base = check_level_preservation(Phi, F, grid, [0])
    assert base["stats"]["min"] == base["stats"]["max"] == 1.0
    out = check_level_preservation(Phi, F, grid, [Q(1, 8), Q(-1, 8)])
    assert out["pass"] and out["zero_mismatch"] == 0 and out["zeros_checked"] > 0
    with pytest.raises(TrivializationError):
        check_level_preservation(Phi, parse_polynomial("z - x - 1", TXZ), grid, [0])


def test_regularity(square_family):
    _, sys = square_family
    Phi = phi(sys)
    grid = make_grid((-1, -1), (1, 1), 3)
    base = check_regularity(Phi, grid, [0])
    assert base["distance"]["stats"]["min"] == base["distance"]["stats"]["max"] == 1.0
    out = check_regularity(Phi, grid, [Q(1, 8)])
    lo, hi = out["distance"]["stats"]["min"], out["distance"]["stats"]["max"]
    assert 1 - 0.125 * 1.01 <= lo and hi <= 1 + 0.125 * 1.01
    assert out["derivative"]["pass"]


def test_round_trip_check(square_family):
    _, sys = square_family
    Phi = phi(sys)
    out = check_round_trip(Phi, make_grid((-1, -1), (1, 1), 3), [Q(1, 8)])
    assert out["pass"] and out["max_error"] < 1e-30


def test_leaf_tangent(square_family):
    _, sys = square_family
    Phi = phi(sys)
    x = Q(1, 2)
    out = leaf_tangent(Phi, Q(1, 16), (x, x), approach=4)
    assert abs(out["tangent"]["dpsi"][1] - 0.5) < 1e-6 and abs(out["tangent"]["dpsi"][0]) < 1e-12
    assert out["h_stable"]
    z = leaf_tangent(Phi, Q(1, 16), (0, 0), approach=2)
    assert all(abs(v) < 1e-20 for v in z["tangent"]["dpsi"])


def test_equimultiplicity():
    bs = parse_polynomial("z^5 + t*y^6*z + y^7*x + x^15", ("t", "x", "y", "z"))
    out = check_equimultiplicity(bs, [0, Q(1, 10), Q(-1, 2)])
    assert out["pass"] and out["value"] == 5
    F = parse_polynomial("z^2 - (1+t)*x^2", TXZ)
    assert check_equimultiplicity(F, [0, Q(1, 2), Q(-1, 2)])["value"] == 2
    G = parse_polynomial("z^2 - (1+t)*x^2 + t^2*x", TXZ)
    assert not check_equimultiplicity(G, [0, Q(1, 2)])["pass"]
