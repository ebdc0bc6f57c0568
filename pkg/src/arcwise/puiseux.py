"""Newton-Puiseux expansion with exact polygon combinatorics and mpmath coefficients.

A root is written z = sum_k c_k y^k with x = y^d. Exponents are exact Fractions
read off Newton polygons; coefficients come from numeric roots of the edge
(characteristic) polynomials. Every branch is certified afterwards by the
residual of F(y^d, branch(y)) up to y^M.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
from scipy.optimize import linear_sum_assignment

from .numeric import CompiledUPoly, mp_exact
from .polycore import MPoly, PolyError, UPolyView, discriminant, radical, squarefree_decomposition
from .tracking import CoeffPath, cluster_roots, track_roots

SCHEMA = "arcwise/puiseux/v1"


class PuiseuxError(PolyError):
    pass


class TruncationTooSmall(PuiseuxError):
    """Distinct roots agree up to the truncation order."""


class ResidualFailure(PuiseuxError):
    """Reconstruction residual above 2^-(prec/2): precision insufficient."""


class NotStabilized(PuiseuxError):
    """The truncation ends before the exponent lattice is certified final."""


class IdenticalToTruncation(PuiseuxError):
    pass


class DiscriminantFormViolation(PuiseuxError):
    def __init__(self, msg, factor: str = "", bad_t=()):
        super().__init__(msg)
        self.factor = factor
        self.bad_t = tuple(bad_t)


@dataclass(frozen=True)
class ContactMarker:
    """Difference vanishes to the truncation order ``bound`` (in x)."""
    bound: Fraction

    def __str__(self):
        return f">= {self.bound}"


@dataclass(frozen=True)
class PuiseuxExpansion:
    d: int
    coefficients: dict  # k -> mpc, exponent k/d in x
    truncation: int
    branch_id: int
    conjugacy_class: tuple = ()
    multiplicity: int = 1
    stabilized: bool = True
    residual: object = 0
    precision: int = 256

    def exponents(self) -> list[int]:
        return sorted(self.coefficients)

    def x_exponents(self) -> list[Fraction]:
        return [Fraction(k, self.d) for k in self.exponents()]

    def order(self):
        ks = self.exponents()
        return Fraction(ks[0], self.d) if ks else None

    @property
    def x_truncation(self) -> Fraction:
        return Fraction(self.truncation, self.d)

    def coefficient(self, e: Fraction):
        e = Fraction(e)
        k = e * self.d
        if k.denominator != 1:
            return mpmath.mpc(0)
        return self.coefficients.get(int(k), mpmath.mpc(0))

    def evaluate_y(self, y):
        with mpmath.workprec(self.precision):
            y = mpmath.mpc(y)
            return mpmath.fsum(c * y ** k for k, c in self.coefficients.items())

    def to_dict(self) -> dict:
        return {
            "branch_id": self.branch_id, "d": self.d, "truncation": self.truncation,
            "multiplicity": self.multiplicity, "stabilized": self.stabilized,
            "conjugacy_class": list(self.conjugacy_class),
            "terms": [{"k": k, "re": mpmath.nstr(mpmath.re(c), 20), "im": mpmath.nstr(mpmath.im(c), 20)}
                      for k, c in sorted(self.coefficients.items())],
            "residual": mpmath.nstr(self.residual, 5),
        }


# ---------------------------------------------------------------- expansion

def _bivariate(F: MPoly, xvar: str, zvar: str) -> dict:
    """{j: {Fraction(e): exact coefficient}} for F = sum a_{j,e} x^e z^j."""
    ix, iz = F.index(xvar), F.index(zvar)
    out: dict = {}
    for mon, c in F.terms.items():
        if any(p for i, p in enumerate(mon) if i not in (ix, iz)):
            raise PuiseuxError("newton_puiseux needs a polynomial in two variables")
        out.setdefault(mon[iz], {})[Fraction(mon[ix])] = c
    return out


def _lower_hull(points: list[tuple[int, Fraction]]) -> list[tuple]:
    hull: list[tuple] = []
    for p in points:
        while len(hull) >= 2:
            (j1, v1), (j2, v2) = hull[-2], hull[-1]
            # drop hull[-1] unless it lies strictly below the chord hull[-2] -> p
            if (v2 - v1) * (p[0] - j1) >= (p[1] - v1) * (j2 - j1):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def _substitute(G: dict, gamma: Fraction, c, shift: Fraction, limit: Fraction, rel: mpmath.mpf) -> dict:
    """G(x, x^gamma (c + z)) / x^shift, terms above x^limit and cancellation noise dropped."""
    acc: dict = {}
    mag: dict = {}
    for j, row in G.items():
        cp = [mpmath.mpc(1)]
        for _ in range(j):
            cp.append(cp[-1] * c)
        for e, a in row.items():
            ne = e + j * gamma - shift
            if ne > limit:
                continue
            for i in range(j + 1):
                term = a * math.comb(j, i) * cp[j - i]
                key = (i, ne)
                acc[key] = acc.get(key, 0) + term
                mag[key] = mag.get(key, 0) + abs(term)
    out: dict = {}
    for (i, e), v in acc.items():
        if abs(v) > rel * mag[(i, e)] and v != 0:
            out.setdefault(i, {})[e] = v
    return out


def _edge_roots(coeffs: list, prec: int) -> list[tuple]:
    """Distinct nonzero roots of the edge polynomial with multiplicities."""
    reps, mults = cluster_roots(coeffs, prec)
    return list(zip(reps, mults))


def _expand(G: dict, r: int, E0: Fraction, d0: int, terms: list, M: int, m: int,
            prec: int, rel, leaves: list, top: bool):
    """Roots of G (numbering r, tending to 0 unless ``top``) appended to ``leaves``.

    A leaf is (terms, multiplicity, stabilized). Stabilized means the exponent
    lattice can no longer grow: the root is simple at the point of the cut.
    """
    j0 = min((j for j, row in G.items() if row), default=None)
    if j0 is None:
        raise PuiseuxError("polynomial vanished during expansion; precision insufficient")
    if j0 >= 1:
        # z' = 0 up to the truncation order, a root of multiplicity j0
        k = min(j0, r)
        leaves.append((list(terms), k, k == 1))
        if r == k:
            return
    pts = []
    for j in range(j0, r + 1):
        row = G.get(j)
        if row:
            pts.append((j, min(row)))
    hull = _lower_hull(pts)
    for (jl, vl), (jr, vr) in zip(hull, hull[1:]):
        gamma = Fraction(vl - vr) / (jr - jl)
        if gamma < 0 or (gamma == 0 and not top):
            continue
        base = vl + jl * gamma
        edge = [0] * (jr - jl + 1)
        for j in range(jl, jr + 1):
            e = base - j * gamma
            row = G.get(j, {})
            if e in row:
                edge[j - jl] = row[e]
        for c, mult in _edge_roots(edge, prec):
            E = E0 + gamma
            d = math.lcm(d0, E.denominator)
            if E * d > M:
                leaves.append((list(terms), mult, mult == 1 and d == d0))
                continue
            limit = m * (Fraction(M, d) - E + 1) + 1
            G2 = _substitute(G, gamma, c, base, limit, rel)
            _expand(G2, mult, E, d, terms + [(E, c)], M, m, prec, rel, leaves, False)


def _coincide(series: list[list], prec: int) -> bool:
    tol = mpmath.mpf(2) ** (-(prec // 3))
    for i, a in enumerate(series):
        for b in series[:i]:
            if [E for E, _ in a] == [E for E, _ in b] and all(
                    abs(x - y) <= tol * max(1, abs(x)) for (_, x), (_, y) in zip(a, b)):
                return True
    return False


def _series_power_coeffs(b: list, upto: int, power: int) -> list:
    out = [mpmath.mpc(1)] + [mpmath.mpc(0)] * upto
    for _ in range(power):
        nxt = [mpmath.mpc(0)] * (upto + 1)
        for i, u in enumerate(out):
            if u == 0:
                continue
            for j, v in enumerate(b[: upto + 1 - i]):
                if v != 0:
                    nxt[i + j] += u * v
        out = nxt
    return out


def reconstruction_residual(F: MPoly, xvar: str, zvar: str, e: PuiseuxExpansion) -> tuple:
    """max |coefficient of y^k| of F(y^d, branch(y)) for k <= M, and the summand scale."""
    with mpmath.workprec(e.precision):
        M = e.truncation
        b = [mpmath.mpc(0)] * (M + 1)
        for k, c in e.coefficients.items():
            if k <= M:
                b[k] = c
        biv = _bivariate(F, xvar, zvar)
        res = [mpmath.mpc(0)] * (M + 1)
        mag = [mpmath.mpf(0)] * (M + 1)
        pw = {}
        for j in sorted(biv):
            pw[j] = _series_power_coeffs(b, M, j)
        for j, row in biv.items():
            for ex, a in row.items():
                sh = int(ex) * e.d
                if sh > M:
                    continue
                av = mp_exact(a)
                for k in range(M + 1 - sh):
                    v = av * pw[j][k]
                    res[k + sh] += v
                    mag[k + sh] += abs(v)
        return max(abs(v) for v in res), max([mpmath.mpf(1)] + mag)


def _conjugacy_classes(items: list[PuiseuxExpansion], prec: int) -> dict:
    """Group branches related by y -> theta y, theta^d = 1 (numerically)."""
    tol = mpmath.mpf(2) ** (-(prec // 3))
    parent = list(range(len(items)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    with mpmath.workprec(prec):
        for i, a in enumerate(items):
            for j in range(i):
                b = items[j]
                if a.d != b.d or a.exponents() != b.exponents() or a.multiplicity != b.multiplicity:
                    continue
                for s in range(a.d):
                    theta = mpmath.expjpi(mpmath.mpf(2 * s) / a.d)
                    if all(abs(b.coefficients[k] * theta ** k - a.coefficients[k])
                           <= tol * max(1, abs(a.coefficients[k])) for k in a.exponents()):
                        parent[find(i)] = find(j)
                        break
    cls: dict = {}
    for i in range(len(items)):
        cls.setdefault(find(i), []).append(items[i].branch_id)
    return {bid: tuple(sorted(v)) for v in cls.values() for bid in v}


def _view_vars(F, var, xvar):
    if isinstance(F, UPolyView):
        base, zvar = F.base, F.main_var
    else:
        base, zvar = F, var
    if zvar is None:
        if len(base.variables) != 2:
            raise PuiseuxError("main variable required")
        zvar = base.variables[-1]  # (x, z) ordering
    if xvar is None:
        others = [v for v in base.used_variables() if v != zvar]
        if len(others) > 1:
            raise PuiseuxError("newton_puiseux needs two variables (x, z)")
        cands = [v for v in base.variables if v != zvar]
        xvar = others[0] if others else (cands[0] if cands else "x")
        if xvar not in base.variables:
            base = base.with_vars(base.variables + (xvar,))
    return base, zvar, xvar


def newton_puiseux(F, M: int = 20, prec: int = 256, var: str | None = None,
                   xvar: str | None = None) -> list[PuiseuxExpansion]:
    """All roots of F(x, z) in C((x^{1/d})) near x = 0, truncated at y^M."""
    base, zvar, xvar = _view_vars(F, var, xvar)
    lc = base.lc(zvar)
    if not lc.is_constant():
        raise PuiseuxError("F must be monic in the main variable")
    if base.degree(zvar) == 0:
        return []
    rel = mpmath.mpf(2) ** (-(prec // 2))
    out: list[PuiseuxExpansion] = []
    bid = 0
    for g, mult in squarefree_decomposition(base, zvar):
        m = g.degree(zvar)
        with mpmath.workprec(prec):
            G = {j: {e: mp_exact(c) for e, c in row.items()} for j, row in _bivariate(g, xvar, zvar).items()}
            leaves: list = []
            _expand(G, m, Fraction(0), 1, [], M, m, prec, rel, leaves, True)
        if sum(k for _, k, _ in leaves) != m:
            raise PuiseuxError(f"expansion found {sum(k for _, k, _ in leaves)} of {m} roots")
        if any(k > 1 for _, k, _ in leaves) or _coincide([t for t, _, _ in leaves], prec):
            raise TruncationTooSmall(f"truncation M = {M} does not separate the branches of {g}")
        for terms, _, stab in leaves:
            d = 1
            for E, _ in terms:
                d = math.lcm(d, E.denominator)
            coeffs = {int(E * d): c for E, c in terms}
            e = PuiseuxExpansion(d, coeffs, M, bid, (), mult, stab, 0, prec)
            res, scale = reconstruction_residual(g, xvar, zvar, e)
            if res > rel * scale:
                raise ResidualFailure(f"branch {bid}: residual {mpmath.nstr(res, 5)} > 2^-{prec // 2}")
            out.append(PuiseuxExpansion(d, coeffs, M, bid, (), mult, stab, res, prec))
            bid += 1
    cls = _conjugacy_classes(out, prec)
    return [PuiseuxExpansion(e.d, e.coefficients, e.truncation, e.branch_id, cls[e.branch_id],
                             e.multiplicity, e.stabilized, e.residual, e.precision) for e in out]


def expansion_report(branches: list[PuiseuxExpansion]) -> dict:
    out = {"$schema": SCHEMA, "branches": []}
    for e in branches:
        item = e.to_dict()
        try:
            item["pairs"] = [list(p) for p in puiseux_pairs(e)]
        except NotStabilized:
            item["pairs"] = None
        out["branches"].append(item)
    contacts = []
    for i, a in enumerate(branches):
        for b in branches[:i]:
            c = contact_exponent(b, a)
            contacts.append({"branches": [b.branch_id, a.branch_id], "contact": str(c)})
    out["contacts"] = contacts
    return out


# ---------------------------------------------------------------- invariants

def puiseux_pairs(e: PuiseuxExpansion) -> list[tuple[int, int]]:
    """Characteristic pairs (m_i, n_i): beta_i / d = m_i / (n_1 ... n_i)."""
    if not e.stabilized:
        raise NotStabilized(f"branch {e.branch_id}: truncation M = {e.truncation} ends before the "
                            "exponent lattice is certified")
    n = e.d
    pairs = []
    cur = n
    prod = 1
    for k in e.exponents():
        if k % cur:
            g = math.gcd(cur, k)
            ni = cur // g
            prod *= ni
            mi = Fraction(k * prod, n)
            assert mi.denominator == 1
            pairs.append((int(mi), ni))
            cur = g
    if cur != 1:
        raise PuiseuxError(f"branch {e.branch_id}: exponent gcd {cur} does not reach 1 (d not minimal)")
    return pairs


def contact_exponent(e1: PuiseuxExpansion, e2: PuiseuxExpansion, allow_marker: bool = True):
    """Order in x of e1 - e2 over a common ramification (exact Fraction)."""
    bound = min(e1.x_truncation, e2.x_truncation)
    prec = min(e1.precision, e2.precision)
    tol = mpmath.mpf(2) ** (-(prec // 2))
    with mpmath.workprec(prec):
        exps = sorted(set(e1.x_exponents()) | set(e2.x_exponents()))
        for E in exps:
            if E > bound:
                break
            a, b = e1.coefficient(E), e2.coefficient(E)
            if abs(a - b) > tol * max(1, abs(a), abs(b)):
                return E
    if not allow_marker:
        raise IdenticalToTruncation(f"branches {e1.branch_id}, {e2.branch_id} agree to x^{bound}")
    return ContactMarker(bound)


# ---------------------------------------------------------------- with parameter

@dataclass(frozen=True)
class DiscForm:
    M: int
    unit_check: bool
    unit_at_x0: str
    bad_t: tuple = ()


@dataclass(frozen=True)
class ParametricBranchSet:
    t_samples: tuple
    expansions: tuple  # expansions[s][label]
    disc_form: DiscForm
    variables: tuple = ()

    def labels(self) -> range:
        return range(len(self.expansions[0]) if self.expansions else 0)

    def pairs_by_sample(self) -> list[list]:
        return [[puiseux_pairs(e) for e in row] for row in self.expansions]

    def contacts_by_sample(self) -> list[dict]:
        out = []
        for row in self.expansions:
            c = {}
            for i in range(len(row)):
                for j in range(i):
                    c[(j, i)] = contact_exponent(row[j], row[i])
            out.append(c)
        return out

    def invariant_in_t(self) -> dict:
        ds = [[e.d for e in row] for row in self.expansions]
        sup = [[e.exponents() for e in row] for row in self.expansions]
        mults = [[e.multiplicity for e in row] for row in self.expansions]
        pairs = self.pairs_by_sample()
        contacts = [{k: str(v) for k, v in c.items()} for c in self.contacts_by_sample()]
        same = lambda xs: all(x == xs[0] for x in xs)
        return {"d": same(ds), "exponents": same(sup), "multiplicities": same(mults),
                "pairs": same(pairs), "contacts": same(contacts)}

    def to_dict(self) -> dict:
        inv = self.invariant_in_t()
        return {
            "$schema": SCHEMA, "variables": list(self.variables),
            "t_samples": [str(t) for t in self.t_samples],
            "disc_form": {"M": self.disc_form.M, "unit_check": self.disc_form.unit_check,
                          "unit_at_x0": self.disc_form.unit_at_x0},
            "samples": [{"t": str(t), "branches": [dict(e.to_dict(), label=i) for i, e in enumerate(row)]}
                        for t, row in zip(self.t_samples, self.expansions)],
            "pairs": [[list(map(list, p)) for p in row] for row in self.pairs_by_sample()],
            "invariant_in_t": inv,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def discriminant_form(F: MPoly, tvar: str, xvar: str, zvar: str, t_values: Sequence) -> DiscForm:
    """disc_z(F_red) = x^M u(t, x); checks u(t_s, 0) != 0 exactly."""
    R = radical(F)
    lc = R.lc(zvar)
    if lc.is_constant():
        R = R.scale(1 / lc.constant_value())
    D = discriminant(R, zvar)
    if D.is_zero():
        raise PuiseuxError("discriminant of the reduced polynomial vanishes identically")
    ix = D.index(xvar)
    M = min(mon[ix] for mon in D.terms)
    u0 = MPoly._raw(D.variables, {mon: c for mon, c in D.terms.items() if mon[ix] == M})
    u0 = MPoly._raw(D.variables, {tuple(0 if i == ix else p for i, p in enumerate(mon)): c
                                  for mon, c in u0.terms.items()})
    bad = []
    for t in t_values:
        v = u0.subs({tvar: t})
        if v.is_zero():
            bad.append(t)
    return DiscForm(M, not bad, str(u0), tuple(bad))


def _match_cost(a: PuiseuxExpansion, b: PuiseuxExpansion) -> float:
    if a.d != b.d or a.exponents() != b.exponents() or a.multiplicity != b.multiplicity:
        return 1e300
    return float(sum(abs(a.coefficients[k] - b.coefficients[k]) for k in a.exponents()))


def puiseux_with_parameter(F: MPoly, t_samples: Sequence, M: int = 20, prec: int = 256,
                           tvar: str = "t", xvar: str = "x", zvar: str = "z",
                           base_t=0) -> ParametricBranchSet:
    """Expansions at each sample t_s, labelled by sequential matching along the samples.

    The discriminant form is checked at every sample and at ``base_t`` (the base
    parameter value; pass None to skip it).
    """
    lc = F.lc(zvar)
    if not lc.is_constant():
        raise PuiseuxError("F must be monic in the main variable")
    samples = [Fraction(t) if isinstance(t, (int, Fraction)) else t for t in t_samples]
    check_at = list(samples) + ([Fraction(base_t)] if base_t is not None and base_t not in samples else [])
    form = discriminant_form(F, tvar, xvar, zvar, check_at)
    if not form.unit_check:
        raise DiscriminantFormViolation(
            f"disc_z(F_red) = x^{form.M} * u with u(t, 0) = {form.unit_at_x0} vanishing at t = "
            f"{', '.join(str(t) for t in form.bad_t)}", form.unit_at_x0, form.bad_t)
    rows = []
    for t in samples:
        Ft = F.subs({tvar: t})
        rows.append(newton_puiseux(Ft, M, prec, var=zvar, xvar=xvar))
    labelled = [rows[0]]
    for row in rows[1:]:
        prev = labelled[-1]
        if len(row) != len(prev):
            raise PuiseuxError("branch count changes across samples")
        cost = np.array([[_match_cost(a, b) for b in row] for a in prev])
        ri, ci = linear_sum_assignment(cost)
        if any(cost[i, j] >= 1e300 for i, j in zip(ri, ci)):
            raise PuiseuxError("branch structure (d, exponents, multiplicity) changes across samples")
        labelled.append([row[j] for j in ci[np.argsort(ri)]])
    return ParametricBranchSet(tuple(samples), tuple(tuple(r) for r in labelled), form, (tvar, xvar, zvar))


# ---------------------------------------------------------------- gamma decay

def gamma_of_roots(a0: Sequence, at: Sequence):
    """max over pairs with distinct base roots of |(a_i(t)-a_i(0)) - (a_j(t)-a_j(0))| / |a_i(0)-a_j(0)|."""
    g = mpmath.mpf(0)
    n = len(a0)
    for i in range(n):
        for j in range(i):
            den = abs(a0[i] - a0[j])
            if den == 0:
                continue
            g = max(g, abs((at[i] - a0[i]) - (at[j] - a0[j])) / den)
    return g


def gamma_decay_check(F: MPoly, x_samples: Sequence, t_path: Sequence, prec: int = 256,
                      tvar: str = "t", xvar: str = "x", zvar: str = "z", fit_tol: float = 0.25,
                      steps: int = 64) -> dict:
    """Fit log gamma(t, x) against log|t| over t_path for each x sample.

    Roots at (t, x) are ordered by continuation from (0, x) along the t-segment.
    Also reports the ratio (a_i - a_j)(t, x) / (a_i - a_j)(0, x) at the smallest |t|.
    """
    others = [v for v in F.variables if v != zvar]
    up = CompiledUPoly(F, zvar, others)
    it, ix = others.index(tvar), others.index(xvar)
    tmin = min(t_path, key=lambda s: abs(complex(s)))
    fits = []
    ratio_dev = []
    sup_gamma = 0.0
    all_zero = True
    for x in x_samples:
        base = [0] * len(others)
        base[ix] = x
        logs = []
        with mpmath.workprec(prec):
            for t in t_path:
                end = list(base)
                end[it] = t
                tr = track_roots(CoeffPath.segment(up, base, end), steps=steps, prec=prec)
                a0 = tr.start.expanded()
                at = []
                for r, m in zip(tr.end.roots, tr.start.multiplicities):
                    at.extend([r] * m)
                g = gamma_of_roots(a0, at)
                sup_gamma = max(sup_gamma, float(g))
                if g > 0:
                    all_zero = False
                    logs.append((math.log(abs(complex(t))), float(mpmath.log(g))))
                if t == tmin:
                    dev = 0.0
                    for i in range(len(a0)):
                        for j in range(i):
                            if a0[i] != a0[j]:
                                dev = max(dev, float(abs((at[i] - at[j]) / (a0[i] - a0[j]) - 1)))
                    ratio_dev.append((float(abs(complex(t))), dev))
        if len(logs) >= 2:
            xs, ys = zip(*logs)
            slope = float(np.polyfit(xs, ys, 1)[0])
            fits.append(slope)
    if all_zero:
        return {"slope": "inf", "pass": True, "trivial": True, "sup_gamma": 0.0, "bound2": ratio_dev}
    slope = min(fits) if fits else float("nan")
    ok = bool(fits) and slope >= 1 - fit_tol and math.isfinite(sup_gamma)
    return {"slope": slope, "per_x": fits, "pass": ok, "trivial": False, "sup_gamma": sup_gamma,
            "bound2": ratio_dev}
