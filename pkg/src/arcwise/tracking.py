"""Root continuation along coefficient paths.

Roots are tracked as clusters. A cluster of multiplicity m is followed as the
simple root of p^(m-1), so multiplicity is carried, never re-detected midway.
Continuation runs in complex128 (Euler predictor, Newton corrector, step
halving); both endpoints are clustered and refined independently at full
precision and the tracked pairing is matched onto them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
import numpy as np

from .numeric import CompiledUPoly, derivative_coeffs, horner, mp_of
from .polycore import PolyError


class TrackingError(PolyError):
    """Continuation failed, or clusters split/merged along the path."""


@dataclass(frozen=True)
class RootVector:
    base_point: tuple
    roots: tuple  # cluster representatives, mpc
    multiplicities: tuple
    provenance: dict = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return sum(self.multiplicities)

    def expanded(self) -> list:
        out = []
        for r, m in zip(self.roots, self.multiplicities):
            out.extend([r] * m)
        return out

    def to_dict(self) -> dict:
        return {
            "base_point": [str(x) for x in self.base_point],
            "roots": [[mpmath.nstr(mpmath.mpc(r).real, 20), mpmath.nstr(mpmath.mpc(r).imag, 20)]
                      for r in self.roots],
            "multiplicities": list(self.multiplicities),
            "provenance": self.provenance,
        }


@dataclass(frozen=True)
class Tracking:
    start: RootVector
    end: RootVector  # end.roots[k] is the continuation of start.roots[k]
    halvings: int
    steps: int

    def pairing(self) -> list[tuple]:
        return list(zip(self.start.roots, self.end.roots, self.start.multiplicities))


class CoeffPath:
    """Coefficients (low to high, in the main variable) along a piecewise linear path.

    ``nodes`` are points in the order of ``up.others`` placed at equally spaced s.
    """

    def __init__(self, up: CompiledUPoly, nodes: Sequence[Sequence]):
        if len(nodes) < 2:
            raise ValueError("a path needs at least two nodes")
        self.up = up
        self.nodes = [list(p) for p in nodes]  # kept exact; rounded at the caller's precision
        self.nodes_np = np.array([[complex(x) for x in p] for p in self.nodes], dtype=np.complex128)
        self.pieces = len(nodes) - 1

    @classmethod
    def segment(cls, up: CompiledUPoly, p0: Sequence, p1: Sequence) -> "CoeffPath":
        return cls(up, [p0, p1])

    def _locate(self, s):
        u = s * self.pieces
        k = min(int(u), self.pieces - 1)
        return k, u - k

    def point_np(self, s: float) -> np.ndarray:
        k, w = self._locate(float(s))
        return self.nodes_np[k] + w * (self.nodes_np[k + 1] - self.nodes_np[k])

    def point_mp(self, s) -> list:
        if s == 0:
            return [mp_of(x) for x in self.nodes[0]]
        if s == 1:
            return [mp_of(x) for x in self.nodes[-1]]
        k, w = self._locate(mpmath.mpf(s))
        a, b = [mp_of(x) for x in self.nodes[k]], [mp_of(x) for x in self.nodes[k + 1]]
        return [x + w * (y - x) for x, y in zip(a, b)]

    def np(self, s: float) -> list[complex]:
        return [complex(c) for c in self.up.coeffs_np(self.point_np(s))]

    def mp(self, s) -> list:
        return self.up.coeffs_mp(self.point_mp(s))


class FunctionPath:
    """Path given directly by coefficient callables."""

    def __init__(self, f_np: Callable, f_mp: Callable):
        self.np = f_np
        self.mp = f_mp


def _monic(c: list) -> list:
    while len(c) > 1 and c[-1] == 0:
        c = c[:-1]
    lc = c[-1]
    if lc == 0:
        raise TrackingError("zero polynomial along the path")
    return [x / lc for x in c]


def cluster_roots(coeffs: Sequence, prec: int = 256) -> tuple[list, list[int]]:
    """Roots of a polynomial (low to high) grouped into clusters.

    Recursive splitting: a candidate group of m roots around a center is
    refined as the simple root z* of p^(m-1), and the Taylor coefficients b_j of
    p at z* bound the group radius by rho = max_{j<m} (|b_j|/|b_m|)^(1/(m-j)).
    rho <= 2^-(prec/3) * scale accepts the cluster; otherwise the local
    polynomial is rescaled by rho and split again. Returns (reps, multiplicities).
    """
    with mpmath.workprec(prec):
        c = _monic([mpmath.mpc(x) for x in coeffs])
        n = len(c) - 1
        if n == 0:
            return [], []
        center = -c[n - 1] / n
        bound = max([mpmath.mpf(1)] + [abs(x) ** (mpmath.mpf(1) / (n - j)) for j, x in enumerate(c[:-1])])
        tolc = mpmath.mpf(2) ** (-(prec // 3)) * 2 * bound
        out: list[tuple] = []
        _resolve(c, center, n, tolc, prec, out, 0)
        order = sorted(range(len(out)), key=lambda i: (float(mpmath.re(out[i][0])), float(mpmath.im(out[i][0]))))
        return [out[i][0] for i in order], [out[i][1] for i in order]


def taylor_shift(c: Sequence, z) -> list:
    """Coefficients of p(z + w) in w."""
    b = list(c)
    n = len(b) - 1
    for k in range(n):
        for j in range(n - 1, k - 1, -1):
            b[j] = b[j] + z * b[j + 1]
    return b


def _resolve(c, center, m: int, tolc, prec: int, out: list, depth: int):
    z = refine_root(c, center, m, prec)
    if m == 1:
        out.append((z, 1))
        return
    b = taylor_shift(c, z)
    if b[m] == 0:
        rho = max(abs(x) for x in b[:m]) ** (mpmath.mpf(1) / m)
        if rho == 0:
            out.append((z, m))
            return
    else:
        rho = max([mpmath.mpf(0)] + [(abs(b[j]) / abs(b[m])) ** (mpmath.mpf(1) / (m - j)) for j in range(m)])
    if rho <= tolc or depth > 12:
        out.append((z, m))
        return
    # the m nearest roots of the rescaled local polynomial, in double precision
    local = [complex(b[j] * rho ** j) for j in range(len(b))]
    u = np.roots(list(reversed(local)))
    u = sorted(u, key=abs)[:m]
    groups: list[list] = []
    for w in u:
        hit = [g for g in groups if any(abs(w - v) < 0.2 for v in g)]
        merged = [w]
        for g in hit:
            merged.extend(g)
            groups.remove(g)
        groups.append(merged)
    if len(groups) == 1:
        # no split visible in double precision: the group is tighter than it looks
        g = groups[0]
        sub = mpmath.mpc(complex(sum(g) / len(g)))
        if abs(sub) < 1e-3:
            out.append((z, m))
            return
        _resolve(c, z + rho * sub, m, tolc, prec, out, depth + 1)
        return
    for g in groups:
        sub = mpmath.mpc(complex(sum(g) / len(g)))
        _resolve(c, z + rho * sub, len(g), tolc, prec, out, depth + 1)


def refine_root(coeffs: Sequence, z, m: int = 1, prec: int = 256, iters: int = 60):
    """Newton on p^(m-1) at precision ``prec``."""
    with mpmath.workprec(prec + 20):
        q = derivative_coeffs([mpmath.mpc(x) for x in coeffs], m - 1)
        z = mpmath.mpc(z)
        eps = mpmath.mpf(2) ** (-prec)
        for _ in range(iters):
            v, dv = horner(q, z)
            if dv == 0:
                break
            dz = v / dv
            z -= dz
            if abs(dz) <= eps * max(1, abs(z)):
                break
    with mpmath.workprec(prec):
        return +z


def _step(path, s0: float, s1: float, r: list[complex], mults: list[int], tol: float):
    c0 = _monic(path.np(s0))
    c1 = _monic(path.np(s1))
    scale = max([1.0] + [abs(z) for z in r])
    new = []
    for k, (z0, m) in enumerate(zip(r, mults)):
        q0 = derivative_coeffs(c0, m - 1)
        q1 = derivative_coeffs(c1, m - 1)
        sep = min((abs(z0 - w) for j, w in enumerate(r) if j != k), default=float("inf"))
        _, d0 = horner(q0, z0)
        v1, _ = horner(q1, z0)
        if d0 == 0:
            return None
        z = z0 - v1 / d0  # Euler predictor with the s-derivative by forward difference
        ok = False
        for _ in range(16):
            v, dv = horner(q1, z)
            if dv == 0:
                return None
            dz = v / dv
            z -= dz
            if abs(dz) <= tol * max(1.0, abs(z)):
                ok = True
                break
        if not ok or abs(z - z0) > 0.3 * sep:
            return None
        new.append(z)
    for i in range(len(new)):
        for j in range(i):
            if abs(new[i] - new[j]) <= 1e-10 * scale:
                return None
    return new


def _match(tracked: list[complex], reps: list, mults_tracked: list[int], mults: list[int], where: str):
    if sorted(mults_tracked) != sorted(mults):
        raise TrackingError(f"multiplicities changed along the path ({where}): "
                            f"{sorted(mults_tracked)} vs {sorted(mults)}; discriminant-locus crossing")
    out = []
    used = set()
    for z, m in zip(tracked, mults_tracked):
        d = [(abs(complex(w) - z), j) for j, w in enumerate(reps) if j not in used and mults[j] == m]
        if not d:
            raise TrackingError(f"cluster split or merge at {where}")
        dist, j = min(d)
        others = sorted(x for x, _ in d)
        if len(others) > 1 and dist > 0.25 * others[1]:
            raise TrackingError(f"ambiguous endpoint match at {where}")
        used.add(j)
        out.append(j)
    return out


def track_roots(path, steps: int = 64, tol: float = 2.0 ** -40, prec: int = 256,
                base_point: tuple = (), end_point: tuple = (), max_depth: int = 14,
                start: RootVector | None = None) -> Tracking:
    """Pair the roots at s = 0 with the roots at s = 1 by continuation.

    ``tol`` is the corrector tolerance of the double-precision continuation;
    endpoint values are refined at ``prec`` bits.
    """
    if start is None:
        with mpmath.workprec(prec):
            c0 = path.mp(0)
        reps0, mults0 = cluster_roots(c0, prec)
        start = RootVector(tuple(base_point), tuple(reps0), tuple(mults0), {"clustered": "2^-(prec/3)"})
    mults = list(start.multiplicities)
    r = [complex(z) for z in start.roots]
    halvings = 0

    def advance(s0, s1, r, depth):
        nonlocal halvings
        new = _step(path, s0, s1, r, mults, tol)
        if new is not None:
            return new
        if depth >= max_depth:
            raise TrackingError(f"continuation failed near s = {s0:.6g}; discriminant-locus crossing?")
        halvings += 1
        mid = 0.5 * (s0 + s1)
        r = advance(s0, mid, r, depth + 1)
        return advance(mid, s1, r, depth + 1)

    if len(r):
        for k in range(steps):
            r = advance(k / steps, (k + 1) / steps, r, 0)
    with mpmath.workprec(prec):
        c1 = path.mp(1)
    reps1, mults1 = cluster_roots(c1, prec)
    idx = _match(r, reps1, mults, mults1, "s = 1")
    end = RootVector(tuple(end_point), tuple(reps1[j] for j in idx), tuple(mults1[j] for j in idx),
                     {"steps": steps, "halvings": halvings})
    return Tracking(start, end, halvings, steps)


def same_pairing(a: Tracking, b: Tracking, rel: float = 1e-8) -> bool:
    """Two trackings from the same start pair every root identically."""
    if len(a.end.roots) != len(b.end.roots):
        return False
    scale = max([1.0] + [abs(complex(z)) for z in a.end.roots])
    for (s1, e1, m1), (s2, e2, m2) in zip(a.pairing(), b.pairing()):
        if m1 != m2 or abs(complex(s1) - complex(s2)) > rel * scale or abs(complex(e1) - complex(e2)) > rel * scale:
            return False
    return True
