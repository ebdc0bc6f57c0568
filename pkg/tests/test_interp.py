import cmath
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from arcwise.interp import (NotBilipschitz, PsiEval, family_values, family_values_np, gamma, gamma_squared_exact,
                            InvariantViolation, lipschitz_certificate, make_family, psi_inverse, psi_np,
                            whitney_psi)

EPS = mpmath.mpf(10) ** -30


def ev_for(a, b, kind="sympow"):
    return PsiEval.build(a, b, make_family(kind, len(a)))


def test_family_values_oracles():
    fj, f = family_values("sympow", [mpmath.mpc(2, 1)])
    assert abs(f - 5) < EPS and abs(fj[0] - 5) < EPS
    fj, f = family_values("sympow", [1, 1])
    assert abs(f - 17) < EPS
    assert all(abs(v - mpmath.mpf(17) / 2) < EPS for v in fj)
    fj, f = family_values("abs", [3j, 4])
    assert (f, [abs(v) for v in fj]) == (7, [3, 4])


@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=4), st.floats(0.1, 10))
def test_euler_and_homogeneity(xi, lam):
    fj, f = family_values("sympow", xi)
    assert abs(mpmath.fsum(fj) - f) <= EPS * max(1, abs(f))
    deg = make_family("sympow", len(xi)).degree
    gj, g = family_values("sympow", [mpmath.mpf(lam) * mpmath.mpc(x) for x in xi])
    assert abs(g - mpmath.mpf(lam) ** deg * f) <= mpmath.mpf(10) ** -25 * max(1, abs(g))


def test_numpy_family_matches_mpmath():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
    fj_np, f_np = family_values_np("sympow", X)
    for k in range(5):
        fj, f = family_values("sympow", list(X[k]))
        assert abs(complex(f) - f_np[k]) <= 1e-9 * abs(f_np[k])


def test_psi_identity_and_translation():
    a = [0, 1, 2j]
    ev = ev_for(a, a)
    assert abs(whitney_psi(mpmath.mpc(0.3, 0.7), ev) - mpmath.mpc(0.3, 0.7)) < EPS
    c = mpmath.mpc(0.5, -0.25)
    ev = ev_for(a, [x + c for x in a])
    z = mpmath.mpc(1.7, 0.1)
    assert abs(whitney_psi(z, ev) - (z + c)) < EPS


@given(st.integers(0, 10 ** 6), st.sampled_from(["abs", "sympow"]), st.integers(1, 5))
def test_interpolation_permutation_affine(seed, kind, N):
    rng = random.Random(seed)
    a = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(N)]
    b = [x + complex(rng.uniform(-.1, .1), rng.uniform(-.1, .1)) for x in a]
    ev = ev_for(a, b, kind)
    for x, y in zip(a, b):
        assert abs(whitney_psi(x, ev) - mpmath.mpc(y)) <= EPS * max(1, abs(y))
    z = mpmath.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
    w = whitney_psi(z, ev)
    perm = list(range(N))
    rng.shuffle(perm)
    evp = ev_for([a[i] for i in perm], [b[i] for i in perm], kind)
    assert abs(whitney_psi(z, evp) - w) <= EPS * max(1, abs(w))
    s, c = mpmath.mpc(rng.uniform(.5, 2), rng.uniform(-1, 1)), mpmath.mpc(rng.uniform(-1, 1), 0.3)
    tau = lambda u: s * u + c
    evt = PsiEval.build([tau(mpmath.mpc(x)) for x in a], [tau(mpmath.mpc(y)) for y in b], ev.family)
    assert abs(whitney_psi(tau(z), evt) - tau(w)) <= EPS * max(1, abs(tau(w)))


def test_interpolation_limit_near_node():
    a, b = [0, 1], [0, mpmath.mpc(1, 0.1)]
    ev = ev_for(a, b)
    z = 1 + mpmath.mpf(2) ** -100
    assert abs(whitney_psi(z, ev) - b[1]) < mpmath.mpf(2) ** -90


def test_gamma_examples():
    assert gamma([0, 1], [0, 1]) == 0
    assert gamma([0, 1], [1, 2]) == 0
    assert abs(gamma([0, 1], [0, mpmath.mpf(101) / 100]) - mpmath.mpf(1) / 100) < EPS
    from fractions import Fraction
    assert gamma_squared_exact([0, 1], [0, Fraction(101, 100)]) == Fraction(1, 10000)


def test_certificate_examples():
    ev = ev_for([0, 1], [0, 1])
    cert = lipschitz_certificate(ev)
    assert cert.L_forward == 1 and cert.bilipschitz and cert.L_inverse == 1
    fam = make_family("abs", 2)
    g = 1 / (2 * fam.K)  # gamma = (8 N^3 C^4)^-1
    ev = PsiEval.build([0, 1], [0, 1 + g], fam)
    cert = lipschitz_certificate(ev)
    assert abs(cert.L_inverse - 2) < mpmath.mpf(10) ** -60


def test_invariant_violation():
    with pytest.raises(InvariantViolation):
        ev_for([0, 0], [0, 1])


def test_inverse():
    ev = ev_for([0, 1], [0, 1])
    z, it = psi_inverse(mpmath.mpc(0.3, 0.2), ev)
    assert it == 0 and z == mpmath.mpc(0.3, 0.2)
    fam = make_family("abs", 2)
    ev = PsiEval.build([0, 1], [0, 1 + mpmath.mpf(1) / 1024], fam)
    p = mpmath.mpc(0.4, 0.3)
    z, _ = psi_inverse(p, ev)
    assert abs(whitney_psi(z, ev) - p) < mpmath.mpf(2) ** -120
    bad = ev_for([0, 1], [0, 2])
    with pytest.raises(NotBilipschitz):
        psi_inverse(p, bad)
    z, _ = psi_inverse(p, bad, mode="observed")
    assert abs(whitney_psi(z, bad) - p) < mpmath.mpf(2) ** -120


def test_lipschitz_quotients_sampled():
    rng = np.random.default_rng(3)
    a = np.array([0, 1, 1j])
    b = a + np.array([0, 0.05, -0.05j])
    ev = PsiEval.build(list(a), list(b), make_family("abs", 3))
    L = float(lipschitz_certificate(ev).L_forward)
    z1 = rng.uniform(-2, 2, 2000) + 1j * rng.uniform(-2, 2, 2000)
    z2 = z1 + (rng.normal(size=2000) + 1j * rng.normal(size=2000)) * 0.01
    q = np.abs(psi_np(z1, a, b, "abs") - psi_np(z2, a, b, "abs")) / np.abs(z1 - z2)
    assert q.max() <= L * (1 + 1e-9)


def test_gamma_lower_semicontinuous():
    a = [0, 1]
    g0 = gamma(a, [0, mpmath.mpf(1.1)])
    near = [gamma([0, 1 + d], [0, mpmath.mpf(1.1) + d * cmath.exp(0.3j)]) for d in (1e-3, 1e-6, 1e-9)]
    assert g0 <= near[-1] + 1e-8
    # colliding nodes: gamma jumps down at the limit, never up
    merged = gamma([0, 0], [0, 0])
    seq = [gamma([0, d], [0, d * mpmath.mpc(1.5, 0.5)]) for d in (1e-3, 1e-6, 1e-9)]
    assert merged == 0 and min(seq) > 0.5
