from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from arcwise.numeric import compile_upoly
from arcwise.polycore import parse_polynomial
from arcwise.tracking import (CoeffPath, FunctionPath, TrackingError, cluster_roots, same_pairing,
                              taylor_shift, track_roots)

TXZ = ("t", "x", "z")


def up(text, main="z", others=("t", "x")):
    return compile_upoly(parse_polynomial(text, others + (main,)), main, others)


def test_explicit_root_transport():
    path = CoeffPath.segment(up("z^2 - (1+t)^2*x^2"), [0, 1], [Fraction(1, 10), 1])
    tr = track_roots(path)
    pairs = {round(float(mpmath.re(a))): complex(b) for a, b, _ in tr.pairing()}
    assert abs(pairs[1] - 1.1) < 1e-60 and abs(pairs[-1] + 1.1) < 1e-60


def test_constant_path_is_identity():
    path = CoeffPath.segment(up("z^3 - 2*z + x"), [0, Fraction(1, 3)], [0, Fraction(1, 3)])
    tr = track_roots(path)
    for a, b, _ in tr.pairing():
        assert abs(a - b) < 1e-60


def test_double_root_stays_clustered():
    path = CoeffPath.segment(up("(z - t)^2*(z + 1)"), [0, 0], [Fraction(1, 2), 0])
    tr = track_roots(path)
    assert sorted(tr.end.multiplicities) == [1, 2]
    dbl = [r for r, m in zip(tr.end.roots, tr.end.multiplicities) if m == 2][0]
    assert abs(dbl - mpmath.mpf(1) / 2) < mpmath.mpf(2) ** -80


def test_monodromy_swaps_roots():
    # loop x = e^{2 pi i s} around the branch point of z^2 - x
    f_np = lambda s: [-np.exp(2j * np.pi * s), 0, 1]
    f_mp = lambda s: [-mpmath.expjpi(2 * mpmath.mpf(s)), 0, 1]
    tr = track_roots(FunctionPath(f_np, f_mp))
    for a, b, _ in tr.pairing():
        assert abs(a + b) < 1e-60


def test_discriminant_crossing_raises():
    # two simple roots collide at t = 0 on the end fibre
    path = CoeffPath.segment(up("z^2 - t"), [1, 0], [0, 0])
    with pytest.raises(TrackingError):
        track_roots(path)


def test_cluster_roots_multiplicity():
    reps, mults = cluster_roots([-1, 5, -10, 10, -5, 1])  # (z - 1)^5
    assert mults == [5] and abs(reps[0] - 1) < mpmath.mpf(2) ** -200


@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(1, 3)), min_size=1, max_size=4,
                unique_by=lambda p: p[0]))
def test_cluster_roots_oracle(pattern):
    c = [mpmath.mpc(1)]
    for r, m in pattern:
        for _ in range(m):
            c = [(c[k - 1] if k > 0 else 0) - r * (c[k] if k < len(c) else 0) for k in range(len(c) + 1)]
    reps, mults = cluster_roots(c)
    got = sorted((round(float(mpmath.re(z))), m) for z, m in zip(reps, mults))
    assert got == sorted(pattern)


def test_taylor_shift():
    # p(z) = z^2 ; p(1 + w) = 1 + 2w + w^2
    assert [int(v) for v in taylor_shift([0, 0, 1], 1)] == [1, 2, 1]


@given(st.integers(0, 10 ** 6))
def test_refinement_invariance(seed):
    rng = np.random.default_rng(seed)
    p0 = [Fraction(int(rng.integers(-8, 9)), 16), Fraction(int(rng.integers(-8, 9)), 16)]
    p1 = [Fraction(int(rng.integers(-8, 9)), 16), Fraction(int(rng.integers(-8, 9)), 16) + Fraction(1, 7)]
    path = CoeffPath.segment(up("z^3 + t*x*z + x^2 - t"), p0, p1)
    try:
        a = track_roots(path, steps=64)
    except TrackingError:
        return  # real segment through the discriminant locus
    b = track_roots(path, steps=128, start=a.start)
    assert same_pairing(a, b)
