"""Numeric evaluation of exact polynomials (numpy complex128 and mpmath)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .polycore import MPoly
from .polycore.gaussq import GaussianRational, re_im


def mp_exact(c) -> mpmath.mpc:
    """Exact scalar -> mpc rounded at the current working precision."""
    re, im = re_im(c)
    return mpmath.mpc(mpmath.mpf(re.numerator) / re.denominator,
                      mpmath.mpf(im.numerator) / im.denominator)


def mp_of(x) -> mpmath.mpc:
    if isinstance(x, (int, Fraction, GaussianRational)):
        return mp_exact(x)
    return mpmath.mpc(x)


class CompiledPoly:
    """F evaluated at points given in ``variables`` order."""

    def __init__(self, F: MPoly, variables: Sequence[str] | None = None):
        vs = tuple(variables) if variables is not None else F.variables
        G = F.with_vars(vs)  # raises if a used variable is missing from vs
        self.vars = vs
        items = sorted(G.terms.items())
        self.exact = [(e, c) for e, c in items]
        self.exps = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), len(vs))
        self.cnp = np.array([complex(c) for _, c in items], dtype=np.complex128)
        self.maxdeg = [int(self.exps[:, k].max()) if len(items) else 0 for k in range(len(vs))]
        self._mp_cache: dict[int, list] = {}

    def __len__(self):
        return len(self.exact)

    def np(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.complex128)
        if not len(self.exact):
            return np.zeros(X.shape[:-1], dtype=np.complex128)
        if X.shape[-1] == 0:
            return np.full(X.shape[:-1], self.cnp.sum())
        mon = np.prod(X[..., None, :] ** self.exps, axis=-1)
        return mon @ self.cnp

    def _coeffs_mp(self):
        prec = mpmath.mp.prec
        got = self._mp_cache.get(prec)
        if got is None:
            got = [mp_exact(c) for _, c in self.exact]
            self._mp_cache[prec] = got
        return got

    def mp(self, x: Sequence) -> mpmath.mpc:
        if not self.exact:
            return mpmath.mpc(0)
        xs = [mp_of(v) for v in x]
        pw = []
        for k, v in enumerate(xs):
            row = [mpmath.mpc(1)]
            for _ in range(self.maxdeg[k]):
                row.append(row[-1] * v)
            pw.append(row)
        acc = []
        for (e, _), c in zip(self.exact, self._coeffs_mp()):
            term = c
            for k, p in enumerate(e):
                if p:
                    term = term * pw[k][p]
            acc.append(term)
        return mpmath.fsum(acc)


class CompiledUPoly:
    """F viewed in ``main_var`` with coefficients evaluated at the other variables."""

    def __init__(self, F: MPoly, main_var: str, others: Sequence[str]):
        self.main_var = main_var
        self.others = tuple(others)
        allowed = set(self.others) | {main_var}
        bad = set(F.used_variables()) - allowed
        if bad:
            raise ValueError(f"variables {sorted(bad)} not provided for evaluation")
        self.coeffs = [CompiledPoly(c, self.others) for c in F.coeffs(main_var)]
        self.degree = len(self.coeffs) - 1

    def coeffs_np(self, x_other) -> np.ndarray:
        x = np.asarray(x_other, dtype=np.complex128)
        return np.array([c.np(x) for c in self.coeffs])

    def coeffs_mp(self, x_other) -> list:
        return [c.mp(x_other) for c in self.coeffs]


def compile_upoly(F: MPoly, main_var: str, others: Sequence[str]) -> CompiledUPoly:
    return CompiledUPoly(F, main_var, others)


def horner(coeffs: Sequence, z):
    """p(z), p'(z) for coefficients low to high."""
    p = coeffs[-1] * 0
    dp = p
    for c in reversed(coeffs):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def derivative_coeffs(coeffs: Sequence, order: int = 1) -> list:
    out = list(coeffs)
    for _ in range(order):
        out = [out[k] * k for k in range(1, len(out))]
    return out
