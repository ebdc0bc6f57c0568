"""Whitney interpolation psi(z, a, b) with weight families and Lipschitz certificates.

psi(z) = z + sum_i mu_i(z) D_i / mu(z),  mu_i = f_i(xi),  xi_i = 1/(z - a_i),
D_i = b_i - a_i, and psi(a_i) = b_i.

Two families are provided:

* ``abs``:    f_i = |xi_i|, homogeneity degree 1, constant C = N (exact).
* ``sympow``: P_k = sigma_k^(N!/k), f = sum |P_k|^2,
              f_j = (1/N!) sum_k xi_j dP_k/dxi_j conj(P_k), degree 2 N!.

Since every f_i is R_+ homogeneous of the same degree, mu_i/mu only depends on
xi up to a positive real factor. Evaluation therefore rescales xi so that
max |xi_i| = 1, which is the affine pre-scaling w -> (w - z)/s restricted to
its real part and keeps sympow values in range even at degree 240.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np
from scipy.stats import qmc

from .polycore import PolyError

KINDS = ("abs", "sympow")
SYMPOW_MAX_N = 6


class InterpError(PolyError):
    pass


class InvariantViolation(InterpError):
    """a_i = a_j while b_i != b_j."""


class NotBilipschitz(InterpError):
    pass


class NoConvergence(InterpError):
    pass


class PrecisionUnderflow(InterpError):
    pass


# --- families ----------------------------------------------------------------------------------


@dataclass(frozen=True)
class InterpFamily:
    kind: str
    N: int
    C: mpmath.mpf  # may exceed double range for sympow N >= 4
    provenance: str  # "exact" | "estimated"
    samples: int = 0

    @property
    def degree(self) -> int:
        return 1 if self.kind == "abs" else 2 * math.factorial(self.N)

    @property
    def alphas(self) -> tuple[int, ...]:
        f = math.factorial(self.N)
        return tuple(f // k for k in range(1, self.N + 1))

    @property
    def K(self) -> mpmath.mpf:
        """4 N^3 C^4."""
        return 4 * self.N ** 3 * mpmath.mpf(self.C) ** 4

    def to_dict(self) -> dict:
        return {"kind": self.kind, "N": self.N, "C": num_text(self.C), "C_provenance": self.provenance,
                "degree": self.degree, "samples": self.samples}


def make_family(kind: str, N: int, samples: int = 256, allow_large: bool = False) -> InterpFamily:
    if kind not in KINDS:
        raise InterpError(f"unknown family {kind!r}")
    if N < 1:
        raise InterpError("N must be positive")
    if kind == "sympow" and N > SYMPOW_MAX_N and not allow_large:
        raise InterpError(f"sympow capped at N = {SYMPOW_MAX_N} (N! exponent growth)")
    C, prov, used = estimate_family_constant(kind, N, samples)
    return InterpFamily(kind, N, C, prov, used)


# --- family values (mpmath) ---------------------------------------------------------------------


def _esym(xs: Sequence, upto: int):
    """Elementary symmetric sigma_0..sigma_upto of xs."""
    e = [mpmath.mpc(1)] + [mpmath.mpc(0)] * upto
    for x in xs:
        for k in range(upto, 0, -1):
            e[k] = e[k] + x * e[k - 1]
    return e


def family_values(kind: str, xi: Sequence, prec: int = 256):
    """(f_1..f_N, f) at xi. f is real; f_j may be complex for sympow."""
    N = len(xi)
    with mpmath.workprec(prec):
        xs = [mpmath.mpc(x) for x in xi]
        if kind == "abs":
            fj = [mpmath.mpc(abs(x)) for x in xs]
            return fj, mpmath.fsum(abs(x) for x in xs)
        if kind != "sympow":
            raise InterpError(f"unknown family {kind!r}")
        fact = math.factorial(N)
        sig = _esym(xs, N)
        # |sigma_k|^(2 alpha_k - 2) conj(sigma_k) / k
        weights = []
        for k in range(1, N + 1):
            a = fact // k
            s = sig[k]
            weights.append(abs(s) ** (2 * a - 2) * mpmath.conj(s) / k)
        fj = []
        for j in range(N):
            rest = _esym(xs[:j] + xs[j + 1:], N - 1)  # sigma^(j)_0..sigma^(j)_{N-1}
            fj.append(xs[j] * mpmath.fsum(weights[k - 1] * rest[k - 1] for k in range(1, N + 1)))
        f = mpmath.fsum(abs(sig[k]) ** (2 * (fact // k)) for k in range(1, N + 1))
        if f == 0 and any(x != 0 for x in xs):
            raise PrecisionUnderflow("f underflowed to zero")
        return fj, f


# --- vectorized numpy values ------------------------------------------------------------------------


def _esym_np(X: np.ndarray, upto: int) -> list[np.ndarray]:
    e = [np.ones(X.shape[0], dtype=np.complex128)] + [np.zeros(X.shape[0], dtype=np.complex128)] * upto
    e = [a.copy() for a in e]
    for c in range(X.shape[1]):
        x = X[:, c]
        for k in range(upto, 0, -1):
            e[k] = e[k] + x * e[k - 1]
    return e


def family_values_np(kind: str, X: np.ndarray):
    """Row-wise (f_j matrix, f vector) for xi rows X (complex128, shape (M, N))."""
    M, N = X.shape
    if kind == "abs":
        fj = np.abs(X).astype(np.complex128)
        return fj, np.abs(X).sum(axis=1)
    fact = math.factorial(N)
    sig = _esym_np(X, N)
    weights = []
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        for k in range(1, N + 1):
            a = fact // k
            s = sig[k]
            w = np.abs(s) ** (2 * a - 2) * np.conj(s) / k
            weights.append(np.nan_to_num(w))
        fj = np.empty((M, N), dtype=np.complex128)
        for j in range(N):
            rest = _esym_np(np.delete(X, j, axis=1), N - 1)
            acc = np.zeros(M, dtype=np.complex128)
            for k in range(1, N + 1):
                acc = acc + weights[k - 1] * rest[k - 1]
            fj[:, j] = X[:, j] * acc
        f = np.zeros(M)
        for k in range(1, N + 1):
            f = f + np.abs(sig[k]) ** (2 * (fact // k))
    return fj, f


# --- family constant ------------------------------------------------------------------------------------


def _wirtinger_all(kind: str, xi: list, k: int, h) -> tuple[list, list]:
    """(df_j/dxi_k, df_j/dconj(xi_k)) for all j by central differences."""
    def fj_at(delta):
        pt = list(xi)
        pt[k] = pt[k] + delta
        return family_values(kind, pt, mpmath.mp.prec)[0]

    px, mx, py, my = fj_at(h), fj_at(-h), fj_at(1j * h), fj_at(-1j * h)
    d_xi, d_bar = [], []
    for j in range(len(xi)):
        dx = (px[j] - mx[j]) / (2 * h)
        dy = (py[j] - my[j]) / (2 * h)
        d_xi.append((dx - 1j * dy) / 2)
        d_bar.append((dx + 1j * dy) / 2)
    return d_xi, d_bar


def _sphere_points(N: int, samples: int) -> list[list[complex]]:
    """Structured points plus a Halton prefix on the unit sup-norm sphere."""
    pts: list[list[complex]] = []
    pts.append([1.0 + 0j] * N)
    for m in range(1, N):
        pts.append([1.0 + 0j] * m + [0j] * (N - m))
    pts.append([complex(np.exp(2j * np.pi * k / N)) for k in range(N)])
    if samples > 0:
        h = qmc.Halton(d=2 * N, scramble=False).random(samples + 1)[1:]
        for row in h:
            r = row[:N]
            th = 2 * np.pi * row[N:]
            xi = r * np.exp(1j * th)
            m = np.max(np.abs(xi))
            if m == 0:
                continue
            pts.append(list(xi / m))
    return pts


@functools.lru_cache(maxsize=64)
def estimate_family_constant(kind: str, N: int, samples: int = 256) -> tuple[float, str, int]:
    """C for properties (3)-(5): exact for abs and sympow N = 1, else sampled x 2.

    Property (4) uses the max-norm of the Wirtinger pair. Returns (C, provenance, samples).
    """
    if kind == "abs":
        return mpmath.mpf(N), "exact", 0
    if kind == "sympow" and N == 1:
        return mpmath.mpf(1), "exact", 0
    if kind != "sympow":
        raise InterpError(f"unknown family {kind!r}")
    worst = mpmath.mpf(1)
    with mpmath.workprec(160):
        h = mpmath.mpf(2) ** -50
        for raw in _sphere_points(N, samples):
            xi = [mpmath.mpc(x) for x in raw]
            fj, f = family_values(kind, xi, 160)
            worst = max(worst, f, 1 / f)
            for j in range(N):
                if xi[j] != 0:
                    worst = max(worst, abs(fj[j]) / abs(xi[j]))
            for k in range(N):
                d_xi, d_bar = _wirtinger_all(kind, xi, k, h)
                for j in range(N):
                    if xi[j] != 0:
                        lhs = abs(xi[k]) ** 2 * max(abs(d_xi[j]), abs(d_bar[j]))
                        worst = max(worst, lhs / abs(xi[j]))
    return mpmath.mpf(2 * worst), "estimated", samples


# --- evaluation ----------------------------------------------------------------------------------------


@dataclass(frozen=True)
class PsiEval:
    a: tuple
    b: tuple
    family: InterpFamily
    precision: int = 256
    clusters: tuple = field(default=(), compare=False)

    @classmethod
    def build(cls, a: Sequence, b: Sequence, family: InterpFamily, precision: int = 256) -> "PsiEval":
        if len(a) != len(b) or len(a) != family.N:
            raise InterpError("a, b must both have N entries")
        with mpmath.workprec(precision):
            aa = tuple(mpmath.mpc(x) for x in a)
            bb = tuple(mpmath.mpc(x) for x in b)
        groups: dict = {}
        for i, x in enumerate(aa):
            groups.setdefault((x.real, x.imag), []).append(i)
        for idx in groups.values():
            for i in idx[1:]:
                if bb[i] != bb[idx[0]]:
                    raise InvariantViolation(f"a_{idx[0]} = a_{i} but b differs")
        return cls(aa, bb, family, precision, tuple(tuple(v) for v in groups.values()))

    @property
    def D(self) -> tuple:
        return tuple(y - x for x, y in zip(self.a, self.b))


def whitney_psi(z, ev: PsiEval):
    """psi(z); near a node (distance < 2^(-prec/4) * scale) the psi-j form is used."""
    with mpmath.workprec(ev.precision + 16):
        z = mpmath.mpc(z)
        a, D = ev.a, ev.D
        dist = [abs(z - x) for x in a]
        j = min(range(len(a)), key=lambda i: dist[i])
        if dist[j] == 0:
            return +ev.b[j]
        scale = max(dist)
        dmin = dist[j]
        xi = [dmin / (z - x) for x in a]  # positive real rescaling, max |xi| = 1
        fj, f = family_values(ev.family.kind, xi, ev.precision + 16)
        if f == 0:
            raise PrecisionUnderflow("mu vanished")
        near = dmin < mpmath.mpf(2) ** (-(ev.precision // 4)) * scale
        if near:
            Ij = {i for i in range(len(a)) if a[i] == a[j]}
            acc = mpmath.fsum(fj[i] * (D[i] - D[j]) for i in range(len(a)) if i not in Ij)
            out = z + D[j] + acc / f
        else:
            out = z + mpmath.fsum(fj[i] * D[i] for i in range(len(a))) / f
    with mpmath.workprec(ev.precision):
        return +out


def psi_np(zs: np.ndarray, a: np.ndarray, b: np.ndarray, kind: str) -> np.ndarray:
    """Vectorized double-precision psi for sampling (no node special-casing beyond exact hits)."""
    zs = np.asarray(zs, dtype=np.complex128)
    a = np.asarray(a, dtype=np.complex128)
    D = np.asarray(b, dtype=np.complex128) - a
    diff = zs[:, None] - a[None, :]
    dist = np.abs(diff)
    dmin = dist.min(axis=1)
    hit = dmin == 0
    safe = np.where(diff == 0, 1.0, diff)
    X = dmin[:, None] / safe
    X[diff == 0] = 1.0
    fj, f = family_values_np(kind, X)
    # psi-j form around the nearest node
    j = dist.argmin(axis=1)
    Dj = D[j]
    same = a[None, :] == a[j][:, None]
    contrib = np.where(same, 0.0, fj * (D[None, :] - Dj[:, None]))
    out = zs + Dj + contrib.sum(axis=1) / f
    if hit.any():
        out[hit] = b[j[hit]]
    return out


def gamma(a: Sequence, b: Sequence, prec: int = 256):
    """max over a_i != a_j of |D_i - D_j| / |a_i - a_j| (0 if no such pair)."""
    with mpmath.workprec(prec):
        aa = [mpmath.mpc(x) for x in a]
        bb = [mpmath.mpc(x) for x in b]
        D = [y - x for x, y in zip(aa, bb)]
        best = mpmath.mpf(0)
        for i in range(len(aa)):
            for k in range(i + 1, len(aa)):
                if aa[i] != aa[k]:
                    best = max(best, abs(D[i] - D[k]) / abs(aa[i] - aa[k]))
        return best


def gamma_squared_exact(a: Sequence, b: Sequence):
    """Exact gamma^2 for Gaussian-rational inputs (Fractions / GaussianRational)."""
    from .polycore.gaussq import re_im, to_scalar
    aa = [to_scalar(x) for x in a]
    bb = [to_scalar(x) for x in b]
    D = [y - x for x, y in zip(aa, bb)]

    def n2(c):
        r, i = re_im(c)
        return r * r + i * i

    best = 0
    for i in range(len(aa)):
        for k in range(i + 1, len(aa)):
            if aa[i] != aa[k]:
                best = max(best, n2(D[i] - D[k]) / n2(aa[i] - aa[k]))
    return best


def num_text(x, digits: int = 17) -> str:
    """Deterministic decimal text for an mpf (JSON reports)."""
    return mpmath.nstr(x if isinstance(x, mpmath.mpf) else mpmath.mpf(x), digits)


@dataclass(frozen=True)
class Certificate:
    gamma: mpmath.mpf
    K: mpmath.mpf
    L_forward: mpmath.mpf
    bilipschitz: bool
    L_inverse: mpmath.mpf | None
    family: InterpFamily

    def to_dict(self) -> dict:
        return {"gamma": num_text(self.gamma), "N": self.family.N, "C": num_text(self.family.C),
                "C_provenance": self.family.provenance, "family": self.family.kind,
                "K": num_text(self.K), "L_forward": num_text(self.L_forward),
                "bilipschitz": self.bilipschitz,
                "L_inverse": None if self.L_inverse is None else num_text(self.L_inverse)}


def lipschitz_certificate(ev: PsiEval) -> Certificate:
    """L_forward = K gamma + 1; bi-Lipschitz iff gamma < 1/K; L_inverse = 1/(1 - K gamma)."""
    with mpmath.workprec(ev.precision):
        g = gamma(ev.a, ev.b, ev.precision)
        K = ev.family.K
        bil = bool(g * K < 1)
        return Certificate(g, K, K * g + 1, bil, (1 / (1 - K * g)) if bil else None, ev.family)


def psi_inverse(p, ev: PsiEval, tol: float | None = None, max_iter: int = 2000,
                mode: str = "certified") -> tuple:
    """Solve psi(z) = p starting from z = p.

    Each iteration tries a damped Newton step with a finite-difference real 2x2
    Jacobian (psi is not holomorphic) and falls back to the contraction
    z <- p + z - psi(z) when no damping lowers the residual. ``mode="certified"``
    requires the a-priori certificate; ``mode="observed"`` instead demands
    progress (a new best residual at least every 25 iterations).
    Returns (z, iterations).
    """
    if mode not in ("certified", "observed"):
        raise InterpError(f"unknown inverse mode {mode!r}")
    if mode == "certified" and not lipschitz_certificate(ev).bilipschitz:
        raise NotBilipschitz("gamma exceeds (4 N^3 C^4)^-1")
    with mpmath.workprec(ev.precision):
        tol = mpmath.mpf(2) ** (-(ev.precision // 2)) if tol is None else mpmath.mpf(tol)
        p = mpmath.mpc(p)
        z = p
        r = whitney_psi(z, ev) - p
        best, stall = abs(r), 0
        for it in range(max_iter):
            if abs(r) <= tol:
                return z, it
            z_new, r_new = _newton_step(z, r, p, ev)
            if z_new is None:
                z_new = z - r
                r_new = whitney_psi(z_new, ev) - p
            z, r = z_new, r_new
            if abs(r) < best:
                best, stall = abs(r), 0
            else:
                stall += 1
                if mode == "observed" and stall > 25:
                    raise NoConvergence(f"iteration stopped contracting at step {it}")
    raise NoConvergence(f"no convergence in {max_iter} iterations")


def _newton_step(z, r, p, ev: PsiEval):
    h = mpmath.mpf(2) ** (-(ev.precision // 3)) * max(1, abs(z))
    du = (whitney_psi(z + h, ev) - p - r) / h
    dv = (whitney_psi(z + 1j * h, ev) - p - r) / h
    a, c, b, d = du.real, du.imag, dv.real, dv.imag
    det = a * d - b * c
    if det == 0:
        return None, None
    step = mpmath.mpc((d * r.real - b * r.imag) / det, (-c * r.real + a * r.imag) / det)
    lam = mpmath.mpf(1)
    for _ in range(12):
        z_nt = z - lam * step
        r_nt = whitney_psi(z_nt, ev) - p
        if abs(r_nt) < abs(r) * (1 - lam / 4):
            return z_nt, r_nt
        lam /= 2
    return None, None
