"""The triangular map Phi(t, x) = (t, Psi_1(t, x_1), ..., Psi_n(t, x_1..x_n)) and its checks.

Psi_i(t, x) = psi(x_i, a(t0, x'), a(t, Phi_{<i}(t, x'))): the roots of F_i at the
base point are carried to the moved point by continuation along the leaf
s -> (t0 + s (t - t0), Phi_{<i}(t0 + s (t - t0), x')), sampled at ``leaf_nodes``
nodes and joined by segments. Coordinates are those of the tower (after its
recorded linear change).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .interp import (SYMPOW_MAX_N, InterpFamily, PsiEval, lipschitz_certificate,
                     make_family, psi_inverse, whitney_psi)
from .numeric import CompiledPoly, CompiledUPoly, mp_of
from .polycore import MPoly, PolyError, exact_quotient, multiplicity_at, radical
from .polycore.mpoly import NotDivisible
from .tower import PseudoPolySystem, TowerError, _check_t0, check_equisingular, check_transverse
from .tracking import CoeffPath, RootVector, track_roots

SCHEMA = "arcwise/trivialization-check/v1"


class TrivializationError(PolyError):
    pass


class CertificateFailure(TrivializationError):
    """gamma too large for the a-priori bi-Lipschitz certificate at some evaluation."""


@dataclass(frozen=True)
class TrivConfig:
    steps: int = 64
    tol: float = 2.0 ** -40  # corrector tolerance of the continuation
    prec: int = 256
    leaf_nodes: int = 8
    kind: str = "sympow"
    samples: int = 256
    on_certificate_failure: str = "raise"  # "raise" | "record"
    inverse_mode: str = "certified"  # passed to psi_inverse


@dataclass
class TrivializationMap:
    tower: PseudoPolySystem
    t0: tuple
    config: TrivConfig
    families: dict = field(default_factory=dict)  # level -> InterpFamily
    stats: dict = field(default_factory=lambda: {"evaluations": 0, "certificate_failures": 0,
                                                 "max_gamma": 0.0, "trackings": 0})
    _cache: dict = field(default_factory=dict, repr=False)
    _upolys: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.tower.n

    def family(self, i: int) -> InterpFamily:
        return self.families[i]

    def upoly(self, i: int) -> CompiledUPoly:
        if i not in self._upolys:
            sys = self.tower
            others = sys.param_vars + sys.space_vars[: i - 1]
            self._upolys[i] = CompiledUPoly(sys.levels[i], sys.space_vars[i - 1], others)
        return self._upolys[i]

    def to_dict(self) -> dict:
        return {"t0": [str(x) for x in self.t0], "config": asdict(self.config),
                "families": {str(i): f.to_dict() for i, f in sorted(self.families.items())},
                "tower_levels": [str(F) for F in self.tower.levels]}


def build_trivialization(sys: PseudoPolySystem, t0: Sequence = (), config: TrivConfig | None = None,
                         require_equisingular: bool = True) -> TrivializationMap:
    config = config or TrivConfig()
    t0 = _check_t0(sys, t0)
    if not sys.param_vars:
        raise TowerError("build_trivialization needs a parametric tower")
    if require_equisingular and not check_equisingular(sys, t0):
        raise TrivializationError(f"tower is not equisingular at t0 = {[str(v) for v in t0]}")
    fams = {}
    for i in range(1, sys.n + 1):
        d = sys.degrees[i]
        if d == 0:
            continue
        kind = config.kind if not (config.kind == "sympow" and d > SYMPOW_MAX_N) else "abs"
        fams[i] = make_family(kind, d, config.samples)
    return TrivializationMap(sys, t0, config, fams)


# --- evaluation ---------------------------------------------------------------------------------


def _key(vals) -> tuple:
    out = []
    for v in vals:
        if isinstance(v, (int, Fraction)):
            out.append(Fraction(v))
        else:
            c = mpmath.mpc(v)
            if c.imag == 0 and c.real == int(c.real) and abs(c.real) < 2 ** 52:
                out.append(Fraction(int(c.real)))
            else:
                out.append((c.real, c.imag))
    return tuple(out)


def _t_along(t0: tuple, t: tuple, s: Fraction) -> tuple:
    return tuple(a + s * (b - a) if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction))
                 else mp_of(a) + mpmath.mpf(s) * (mp_of(b) - mp_of(a)) for a, b in zip(t0, t))


def level_roots(Phi: TrivializationMap, i: int, t: tuple, x_prev: tuple):
    """(a, b): roots of F_i at (t0, x') and their continuation to (t, Phi_{<i}(t, x'))."""
    key = (i, _key(t), _key(x_prev))
    got = Phi._cache.get(key)
    if got is not None:
        return got
    cfg = Phi.config
    up = Phi.upoly(i)
    t0 = Phi.t0
    if _key(t) == _key(t0):
        nodes = [list(t0) + list(x_prev), list(t0) + list(x_prev)]
    else:
        L = max(1, cfg.leaf_nodes) if i > 1 else 1
        nodes = []
        for k in range(L + 1):
            s = Fraction(k, L)
            tk = _t_along(t0, t, s)
            yk = list(x_prev) if k == 0 else list(_phi_prefix(Phi, tk, x_prev))
            nodes.append(list(tk) + yk)
    with mpmath.workprec(cfg.prec):
        tr = track_roots(CoeffPath(up, nodes), steps=cfg.steps, tol=cfg.tol, prec=cfg.prec)
    Phi.stats["trackings"] += 1
    a = tr.start.expanded()
    b = []
    for r, m in zip(tr.end.roots, tr.start.multiplicities):
        b.extend([r] * m)
    out = (a, b, tr)
    if len(Phi._cache) > 200000:
        Phi._cache.clear()
    Phi._cache[key] = out
    return out


def _psi_eval(Phi: TrivializationMap, i: int, t: tuple, x_prev: tuple) -> PsiEval:
    key = ("ev", i, _key(t), _key(x_prev))
    got = Phi._cache.get(key)
    if got is not None:
        return got
    a, b, _ = level_roots(Phi, i, t, x_prev)
    ev = PsiEval.build(a, b, Phi.families[i], Phi.config.prec)
    cert = lipschitz_certificate(ev)
    Phi.stats["max_gamma"] = max(Phi.stats["max_gamma"], float(cert.gamma))
    if not cert.bilipschitz:
        Phi.stats["certificate_failures"] += 1
        if Phi.config.on_certificate_failure == "raise":
            raise CertificateFailure(f"level {i}: gamma = {mpmath.nstr(cert.gamma, 5)} >= 1/K "
                                     f"(K = {mpmath.nstr(cert.K, 5)}); t outside the certified ball")
    Phi._cache[key] = ev
    return ev


def _phi_prefix(Phi: TrivializationMap, t: tuple, x_prev: Sequence) -> tuple:
    return eval_phi(Phi, t, x_prev, upto=len(x_prev))[1]


def _as_t(Phi, t) -> tuple:
    if not isinstance(t, (tuple, list)):
        t = (t,)
    return tuple(Fraction(v) if isinstance(v, (int, str)) else v for v in t)


def eval_phi(Phi: TrivializationMap, t, x: Sequence, upto: int | None = None) -> tuple:
    """(t, y) with y_i = Psi_i(t, x_1..x_i) for i <= upto (default n)."""
    t = _as_t(Phi, t)
    n = Phi.n if upto is None else upto
    if len(x) < n:
        raise TrivializationError(f"point needs {n} coordinates")
    y = []
    with mpmath.workprec(Phi.config.prec):
        for i in range(1, n + 1):
            xi = x[i - 1]
            if i not in Phi.families:
                y.append(mp_of(xi))
                continue
            ev = _psi_eval(Phi, i, t, tuple(x[: i - 1]))
            y.append(whitney_psi(mp_of(xi), ev))
    Phi.stats["evaluations"] += 1
    return t, tuple(y)


def eval_phi_inverse(Phi: TrivializationMap, t, y: Sequence, tol=None) -> tuple:
    """x with Phi(t, x) = (t, y), level by level through psi_inverse."""
    t = _as_t(Phi, t)
    x: list = []
    with mpmath.workprec(Phi.config.prec):
        for i in range(1, Phi.n + 1):
            if i not in Phi.families:
                x.append(mp_of(y[i - 1]))
                continue
            ev = _psi_eval(Phi, i, t, tuple(x))
            xi, _ = psi_inverse(mp_of(y[i - 1]), ev, tol=tol, mode=Phi.config.inverse_mode)
            x.append(xi)
    return tuple(x)


def psi_component(Phi: TrivializationMap, t, x: Sequence) -> tuple:
    return eval_phi(Phi, t, x)[1]


# --- grids --------------------------------------------------------------------------------------


def make_grid(lo: Sequence, hi: Sequence, per_axis: int, seed: int | None = None,
              jitter: float = 0.0) -> list[tuple]:
    """Tensor grid of exact rational points on the box [lo, hi]; optional seeded jitter."""
    axes = []
    for a, b in zip(lo, hi):
        a, b = Fraction(a), Fraction(b)
        axes.append([a + (b - a) * Fraction(k, per_axis - 1) for k in range(per_axis)] if per_axis > 1 else [a])
    pts = [()]
    for ax in axes:
        pts = [p + (v,) for p in pts for v in ax]
    if jitter and seed is not None:
        rng = np.random.default_rng(seed)
        step = [(Fraction(b) - Fraction(a)) / max(1, per_axis - 1) for a, b in zip(lo, hi)]
        pts = [tuple(v + Fraction(round(float(jitter * s) * rng.uniform(-1, 1) * 2 ** 20), 2 ** 20)
                     for v, s in zip(p, step)) for p in pts]
    return pts


def grid_spec(lo, hi, per_axis, seed=None, jitter=0.0) -> dict:
    return {"lo": [str(v) for v in lo], "hi": [str(v) for v in hi], "per_axis": per_axis,
            "seed": seed, "jitter": jitter}


# --- checks -------------------------------------------------------------------------------------


def _to_tower_coords(Phi: TrivializationMap, G: MPoly) -> MPoly:
    ch = Phi.tower.coordinate_change
    if ch.is_identity():
        return G.with_vars(Phi.tower.all_vars)
    return G.with_vars(Phi.tower.all_vars).linear_change(ch.matrix, Phi.tower.space_vars)


def divides_power_of_top(Phi: TrivializationMap, G: MPoly) -> bool:
    """rad(G) | F_n, i.e. G divides a power of F_n."""
    Fn = Phi.tower.levels[Phi.n]
    R = radical(G)
    try:
        exact_quotient(Fn, R)
        return True
    except NotDivisible:
        return False


def _stat(xs: list) -> dict:
    if not xs:
        return {"min": None, "max": None, "count": 0}
    return {"min": min(xs), "max": max(xs), "count": len(xs)}


def check_level_preservation(Phi: TrivializationMap, G: MPoly, grid: Sequence, t_values: Sequence,
                             C_target: float = 2.0, zero_tol: float = 1e-30) -> dict:
    """Ratios |G(t, Phi(t, x))| / |G(t0, x)| over the grid and zero-set agreement."""
    sys = Phi.tower
    G = _to_tower_coords(Phi, G)
    if not divides_power_of_top(Phi, G):
        raise TrivializationError("G does not divide a power of F_n")
    cg = CompiledPoly(G, sys.all_vars)
    ratios = []
    zero_mismatch = 0
    zeros_checked = 0
    with mpmath.workprec(Phi.config.prec):
        for t in t_values:
            tt = _as_t(Phi, t)
            for x in grid:
                g0 = abs(cg.mp(list(Phi.t0) + list(x)))
                _, y = eval_phi(Phi, tt, x)
                g1 = abs(cg.mp(list(tt) + list(y)))
                scale = max(1, max(abs(mp_of(v)) for v in x)) ** max(1, G.degree())
                z0 = g0 <= zero_tol * scale
                z1 = g1 <= zero_tol * scale
                if z0 or z1:
                    zeros_checked += 1
                    zero_mismatch += int(z0 != z1)
                    continue
                ratios.append(float(g1 / g0))
    st = _stat(ratios)
    ok = bool(ratios) and 1 / C_target <= st["min"] and st["max"] <= C_target and zero_mismatch == 0
    return {"$schema": SCHEMA, "check": "level_preservation", "G": str(G), "C_target": C_target,
            "stats": st, "zeros_checked": zeros_checked, "zero_mismatch": zero_mismatch, "pass": ok}


def check_identities(Phi: TrivializationMap, grid: Sequence, t_values: Sequence, tol: float = 1e-30) -> dict:
    """Phi(t0, x) = x on the grid and Phi(t, 0) = 0 for every t (relative to max(1, |x|))."""
    worst_t0 = mpmath.mpf(0)
    worst_0 = mpmath.mpf(0)
    with mpmath.workprec(Phi.config.prec):
        for x in grid:
            _, y = eval_phi(Phi, Phi.t0, x)
            err = max(abs(a - mp_of(b)) for a, b in zip(y, x)) / max(1, _norm(x))
            worst_t0 = max(worst_t0, err)
        for t in t_values:
            _, y = eval_phi(Phi, _as_t(Phi, t), [0] * Phi.n)
            worst_0 = max(worst_0, max(abs(v) for v in y))
    ok = worst_t0 <= tol and worst_0 <= tol
    return {"$schema": SCHEMA, "check": "identities", "tol": tol, "base_slice_max": float(worst_t0),
            "origin_max": float(worst_0), "pass": bool(ok)}


def check_round_trip(Phi: TrivializationMap, grid: Sequence, t_values: Sequence, bound: float = 1e-20) -> dict:
    """max |Phi^-1(Phi(t, x)) - x| over the grid; a failed inversion counts as a violation."""
    worst = mpmath.mpf(0)
    failures = []
    with mpmath.workprec(Phi.config.prec):
        for t in t_values:
            tt = _as_t(Phi, t)
            for x in grid:
                _, y = eval_phi(Phi, tt, x)
                try:
                    back = eval_phi_inverse(Phi, tt, y)
                except PolyError as exc:
                    failures.append({"t": [str(v) for v in tt], "x": [str(v) for v in x], "error": str(exc)})
                    continue
                err = max(abs(a - mp_of(b)) for a, b in zip(back, x))
                if err > bound:
                    failures.append({"t": [str(v) for v in tt], "x": [str(v) for v in x],
                                     "error": mpmath.nstr(err, 5)})
                worst = max(worst, err)
    return {"$schema": SCHEMA, "check": "round_trip", "bound": bound, "max_error": float(worst),
            "violations": len(failures), "examples": failures[:5], "pass": not failures}


def _dpsi_dt(Phi: TrivializationMap, t: tuple, x: Sequence, h, k: int = 0) -> list:
    """Central difference of Psi in the real direction of t_k."""
    tp = list(t)
    tm = list(t)
    tp[k] = tp[k] + h
    tm[k] = tm[k] - h
    _, yp = eval_phi(Phi, tuple(tp), x)
    _, ym = eval_phi(Phi, tuple(tm), x)
    hh = 2 * mp_of(h).real
    return [(a - b) / hh for a, b in zip(yp, ym)]


def richardson_dt(Phi: TrivializationMap, t, x: Sequence, h, k: int = 0) -> tuple:
    """Two Richardson levels R(h), R(h/2) of the central difference; returns (R1, R2)."""
    t = _as_t(Phi, t)
    h = Fraction(h)
    D = [_dpsi_dt(Phi, t, x, h / 2 ** j, k) for j in range(3)]
    R1 = [(4 * b - a) / 3 for a, b in zip(D[0], D[1])]
    R2 = [(4 * b - a) / 3 for a, b in zip(D[1], D[2])]
    return R1, R2


def _norm(v) -> mpmath.mpf:
    return max([mpmath.mpf(0)] + [abs(mp_of(c)) for c in v])


def check_regularity(Phi: TrivializationMap, grid: Sequence, t_values: Sequence, h=Fraction(1, 1024),
                     ratio_bounds: tuple = (0.5, 2.0), agree: float = 0.01) -> dict:
    """Distance ratios ||Psi(t,x)|| / ||x|| and ||dPsi/dt|| / ||Psi|| with Richardson stability."""
    tr = check_transverse(Phi.tower, Phi.t0)
    dist_ok = tr["transverse"] or Phi.tower.derivation_complete
    ratios, ders = [], []
    unstable = 0
    notice = None if dist_ok else "tower not transverse: distance bound skipped"
    with mpmath.workprec(Phi.config.prec):
        for t in t_values:
            tt = _as_t(Phi, t)
            for x in grid:
                nx = _norm(x)
                if nx == 0:
                    continue
                _, y = eval_phi(Phi, tt, x)
                ny = _norm(y)
                if dist_ok:
                    ratios.append(float(ny / nx))
                R1, R2 = richardson_dt(Phi, tt, x, h)
                n2 = _norm(R2)
                diff = _norm([a - b for a, b in zip(R1, R2)])
                if diff > agree * max(n2, mpmath.mpf(10) ** -20 * nx):
                    unstable += 1
                if ny > 0:
                    ders.append(float(n2 / ny))
    rs = _stat(ratios)
    ds = _stat(ders)
    dist_pass = (not dist_ok) or (bool(ratios) and ratio_bounds[0] <= rs["min"] and rs["max"] <= ratio_bounds[1])
    der_pass = bool(ders) and all(math.isfinite(v) for v in ders) and unstable == 0
    return {"$schema": SCHEMA, "check": "regularity", "distance": {"stats": rs, "bounds": list(ratio_bounds),
                                                                   "pass": dist_pass, "notice": notice},
            "derivative": {"stats": ds, "sup_ratio": ds["max"], "h": str(h), "richardson_unstable": unstable,
                           "agree": agree, "pass": der_pass},
            "pass": dist_pass and der_pass}


def leaf_tangent(Phi: TrivializationMap, t, x: Sequence, h=Fraction(1, 1024), k: int = 0,
                 approach: int = 8, tol: float = 1e-6) -> dict:
    """Tangent (e_k, dPsi/dt_k) at (t, x) and its behaviour along x * 2^-j, j < approach."""
    t = _as_t(Phi, t)
    R1, R2 = richardson_dt(Phi, t, x, h, k)
    stable = _norm([a - b for a, b in zip(R1, R2)]) <= 1e-2 * max(_norm(R2), mpmath.mpf(10) ** -20)
    seq = []
    for j in range(approach):
        xj = [mp_of(v) / 2 ** j for v in x]
        _, R = richardson_dt(Phi, t, xj, h, k)
        seq.append(R)
    gaps = [float(_norm([a - b for a, b in zip(seq[j + 1], seq[j])])) for j in range(len(seq) - 1)]
    cauchy = bool(gaps) and gaps[-1] <= tol * max(1.0, float(_norm(seq[0])))
    e = [0] * len(t)
    e[k] = 1
    return {"tangent": {"e": e, "dpsi": [complex(v) for v in R2]}, "h_stable": bool(stable),
            "approach_gaps": gaps, "cauchy": cauchy,
            "limit": [complex(v) for v in seq[-1]]}


def check_equimultiplicity(G: MPoly, t_samples: Sequence, param_vars: Sequence[str] = ("t",),
                           sys: PseudoPolySystem | None = None) -> dict:
    """mult_(t,0) G and mult_0 G_t at each sample; pass iff all agree."""
    if sys is not None:
        Fn = sys.levels[sys.n]
        try:
            exact_quotient(Fn.with_vars(sys.all_vars), G.with_vars(sys.all_vars))
        except (NotDivisible, PolyError):
            raise TrivializationError("G does not divide F_n")
    params = list(param_vars)
    space = [v for v in G.variables if v not in params]
    rows = []
    for t in t_samples:
        tt = _as_t(None, t)
        point = [tt[params.index(v)] if v in params else 0 for v in G.variables]
        m_joint = multiplicity_at(G, point)
        Gt = G.subs(dict(zip(params, tt))).with_vars(tuple(space))
        m_fibre = multiplicity_at(Gt)
        rows.append({"t": [str(v) for v in tt], "mult_joint": m_joint, "mult_fibre": m_fibre})
    vals = {r["mult_joint"] for r in rows} | {r["mult_fibre"] for r in rows}
    return {"check": "equimultiplicity", "samples": rows, "value": min(vals) if vals else None,
            "pass": len(vals) == 1}


def root_vector_at(Phi: TrivializationMap, i: int, t, x_prev: Sequence) -> RootVector:
    _, _, tr = level_roots(Phi, i, _as_t(Phi, t), tuple(x_prev))
    return tr.end
