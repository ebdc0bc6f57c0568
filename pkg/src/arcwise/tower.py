"""Discriminant towers F_n, ..., F_0.

``space_vars`` is always (x_1, ..., x_n): F_i is monic in x_i and involves only
the parameters and x_1..x_i. The CLI's ``--order`` lists variables in
elimination order, which is the reverse of this tuple.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polycore import (MPoly, NotDivisible, PolyError, discriminant, exact_quotient,
                       multiplicity_at, parse_polynomial, squarefree_part, to_scalar)
from .polycore.mpoly import exact_det, format_poly
from .polycore.resultants import UPolyView

SCHEMA = "arcwise/tower/v1"


class TowerError(PolyError):
    pass


@dataclass(frozen=True)
class LinearChange:
    """Old coordinates = matrix @ new coordinates (over the space variables x_1..x_n)."""

    matrix: tuple[tuple[Fraction, ...], ...]
    seed: int
    attempts: int

    @classmethod
    def identity(cls, n: int, seed: int = 0) -> "LinearChange":
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)), seed, 0)

    def is_identity(self) -> bool:
        n = len(self.matrix)
        return all(self.matrix[i][j] == int(i == j) for i in range(n) for j in range(n))


@dataclass(frozen=True)
class PseudoPolySystem:
    space_vars: tuple[str, ...]
    param_vars: tuple[str, ...]
    levels: tuple[MPoly, ...]  # F_0 .. F_n over param_vars + space_vars
    degrees: tuple[int, ...]
    coordinate_change: LinearChange
    exceptional_locus: tuple[MPoly, ...] = ()
    derivation_complete: bool = False
    construction_log: tuple[dict, ...] = ()
    domain_radii: tuple[float, ...] | None = None

    @property
    def n(self) -> int:
        return len(self.space_vars)

    @property
    def all_vars(self) -> tuple[str, ...]:
        return self.param_vars + self.space_vars

    def level(self, i: int) -> MPoly:
        return self.levels[i]

    def at_parameter(self, t0: Sequence) -> "PseudoPolySystem":
        """Absolute system obtained by fixing the parameters at exact values."""
        t0 = _check_t0(self, t0)
        if not self.param_vars:
            return self
        assign = dict(zip(self.param_vars, t0))
        levels = tuple(F.partial_eval(assign).with_vars(self.space_vars) for F in self.levels)
        return replace(self, param_vars=(), levels=levels, exceptional_locus=())

    # serialization ---------------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "$schema": SCHEMA,
            "space_vars": list(self.space_vars),
            "param_vars": list(self.param_vars),
            "levels": [format_poly(F) for F in self.levels],
            "degrees": list(self.degrees),
            "matrix": [[str(a) for a in row] for row in self.coordinate_change.matrix],
            "seed": self.coordinate_change.seed,
            "attempts": self.coordinate_change.attempts,
            "exceptional_locus": [format_poly(F) for F in self.exceptional_locus],
            "flags": {"derivation_complete": self.derivation_complete},
            "domain_radii": None if self.domain_radii is None else [repr(float(e)) for e in self.domain_radii],
            "log": list(self.construction_log),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> "PseudoPolySystem":
        if doc.get("$schema") != SCHEMA:
            raise TowerError(f"unsupported tower schema {doc.get('$schema')!r}")
        space = tuple(doc["space_vars"])
        params = tuple(doc["param_vars"])
        allv = params + space
        levels = tuple(parse_polynomial(s, allv) for s in doc["levels"])
        change = LinearChange(tuple(tuple(Fraction(a) for a in row) for row in doc["matrix"]),
                              int(doc["seed"]), int(doc["attempts"]))
        radii = doc.get("domain_radii")
        return cls(space, params, levels, tuple(int(d) for d in doc["degrees"]), change,
                   tuple(parse_polynomial(s, allv) for s in doc["exceptional_locus"]),
                   bool(doc["flags"]["derivation_complete"]), tuple(doc["log"]),
                   None if radii is None else tuple(float(e) for e in radii))

    @classmethod
    def from_json(cls, text: str) -> "PseudoPolySystem":
        return cls.from_dict(json.loads(text))


# --- helpers -------------------------------------------------------------------------------


def _check_t0(sys: PseudoPolySystem, t0) -> tuple:
    t0 = tuple(to_scalar(Fraction(v) if isinstance(v, str) else v) for v in (t0 or ()))
    if len(t0) != len(sys.param_vars):
        raise TowerError(f"expected {len(sys.param_vars)} parameter values, got {len(t0)}")
    return t0


def _one(vs) -> MPoly:
    return MPoly.const(1, vs)


def _monicize(F: MPoly, var: str) -> MPoly:
    lc = F.lc(var)
    if not lc.is_constant():
        raise TowerError(f"leading coefficient in {var} is not constant")
    return F.scale(1 / lc.constant_value())


def _shear_matrix(n: int, target: int, coeffs: dict[int, int]) -> list[list[Fraction]]:
    """x_k -> x_k + c_k x_target for k in coeffs (indices 0-based)."""
    m = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k, c in coeffs.items():
        m[k][target] = Fraction(c)
    return m


def _matmul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]


def _apply_change(F: MPoly, m, space_vars) -> MPoly:
    return F.linear_change(m, space_vars)


def make_derivation_complete(F, var: str | None = None) -> UPolyView:
    """Product of the family {F, F', F'', ...} (each normalized monic) down to degree 1."""
    v = F if isinstance(F, UPolyView) else UPolyView(F, var)
    if not v.is_monic():
        raise TowerError("derivation completion needs a monic polynomial")
    G = v.base
    out = G
    while G.degree(v.main_var) > 1:
        G = _monicize(G.diff(v.main_var), v.main_var)
        out = out * G
    return UPolyView(out, v.main_var)


def stable_family(F: MPoly, var: str) -> list[MPoly]:
    fam = [F]
    G = F
    while G.degree(var) > 1:
        G = _monicize(G.diff(var), var)
        fam.append(G)
    return fam


def _partial_transverse_certificate(family: list[MPoly], var: str, space_vars) -> int | None:
    """Index of a family member whose var-derivative is nonzero at the origin."""
    zero = {v: 0 for v in space_vars}
    for k, G in enumerate(family):
        d = G.diff(var).partial_eval(zero)
        if not d.is_zero():
            return k
    return None


# --- absolute towers ---------------------------------------------------------------------------


def build_tower(F: MPoly, space_vars: Sequence[str], seed: int = 0, max_retries: int = 16,
                derivation_complete: bool = False, method: str = "auto"
                ) -> tuple[PseudoPolySystem, LinearChange]:
    """Tower of an absolute polynomial (no parameters) over (x_1, ..., x_n)."""
    space = tuple(space_vars)
    if set(F.used_variables()) - set(space):
        raise TowerError("build_tower takes no parameter variables; use build_parametric_tower")
    F = F.with_vars(space)
    if F.is_zero():
        raise TowerError("zero input")
    n = len(space)
    rng = np.random.default_rng(seed)
    total = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    attempts = 0
    levels: list[MPoly | None] = [None] * (n + 1)
    degrees = [0] * (n + 1)
    log: list[dict] = []

    G = F
    for i in range(n, 0, -1):
        var = space[i - 1]
        if G.is_constant():
            for k in range(i, 0, -1):
                levels[k] = _one(space)
                degrees[k] = 0
            G = _one(space)
            break
        tries = 0
        while not G.lc(var).is_constant():
            if i == 1 or tries >= max_retries:
                raise TowerError(f"genericity not achieved for {var} within {max_retries} retries")
            coeffs = {k: int(rng.integers(-9, 10)) for k in range(i - 1)}
            m = _shear_matrix(n, i - 1, coeffs)
            tries += 1
            attempts += 1
            if exact_det(m) == 0:  # pragma: no cover - unit triangular
                continue
            trial = _apply_change(G, m, space)
            if trial.lc(var).is_constant():
                G = trial
                total = _matmul(total, m)
                for k in range(i + 1, n + 1):
                    levels[k] = _apply_change(levels[k], m, space)
                log.append({"level": i, "event": "shear", "coeffs": {space[k]: c for k, c in coeffs.items()}})
        Fi = _monicize(G, var)
        entry = {"level": i, "var": var}
        if derivation_complete:
            entry["partial_transverse_member"] = _partial_transverse_certificate(
                stable_family(Fi, var), var, space)
            Fi = make_derivation_complete(Fi, var).base
        levels[i] = Fi
        degrees[i] = Fi.degree(var)
        red = squarefree_part(Fi, var, method=method).base
        d = red.degree(var)
        entry.update({"degree": degrees[i], "reduced_degree": d, "next": "disc(F_red)", "j": d})
        log.append(entry)
        G = discriminant(red, var, method=method) if d >= 1 else _one(space)
    # F_0 is the last discriminant, a nonzero constant, normalized to 1
    if not G.is_constant():  # pragma: no cover - x_1 is eliminated last
        raise TowerError("F_0 is not constant")
    if G.is_zero():  # pragma: no cover
        raise TowerError("vanishing final discriminant")
    levels[0] = _one(space)
    change = LinearChange(tuple(tuple(r) for r in total), seed, attempts)
    sys = PseudoPolySystem(space, (), tuple(levels), tuple(degrees), change,
                           (), derivation_complete, tuple(log))
    return sys, change


# --- parametric towers -------------------------------------------------------------------------


def _restrict_axis(G: MPoly, space, i: int) -> MPoly:
    """G(t, 0', x_i): set x_1..x_{i-1} (and anything above) to zero."""
    zero = {space[k]: 0 for k in range(len(space)) if k != i - 1}
    return G.partial_eval(zero)


def _primitive_t(P: MPoly) -> MPoly:
    if P.is_zero():
        return P
    return P.scale(1 / P.leading_coefficient())


def build_parametric_tower(F: MPoly, param_vars: Sequence[str], space_vars: Sequence[str],
                           seed: int = 0, max_retries: int = 16, allow_change: bool = True,
                           method: str = "auto"
                           ) -> tuple[PseudoPolySystem, LinearChange, list[MPoly]]:
    """Tower over (t; x_1..x_n) following the weighted-scaling construction.

    Returns the system, the linear change and the exceptional locus (polynomials
    in t whose zeros must be avoided). Levels are polynomials in (t, x).
    """
    params = tuple(param_vars)
    space = tuple(space_vars)
    allv = params + space
    F = F.with_vars(allv)
    if F.is_zero():
        raise TowerError("zero input")
    if not params:
        sys, change = build_tower(F.with_vars(space), space, seed=seed,
                                  max_retries=max_retries, method=method)
        return sys, change, []
    n = len(space)
    rng = np.random.default_rng(seed)
    total = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    attempts = 0
    levels: list[MPoly | None] = [None] * (n + 1)
    degrees = [0] * (n + 1)
    locus: list[MPoly] = []
    log: list[dict] = []
    zero_x = {v: 0 for v in space}

    def add_locus(P: MPoly, why: str, level: int):
        P = _primitive_t(P)
        if P.is_constant():
            return
        if P not in locus:
            locus.append(P)
        log.append({"level": level, "event": "exceptional", "poly": format_poly(P), "why": why})

    G = F
    for i in range(n, 0, -1):
        var = space[i - 1]
        on_axis = G.partial_eval(zero_x)
        if not on_axis.is_zero():
            add_locus(on_axis, "level does not vanish on the t-axis", i)
            for k in range(i, 0, -1):
                levels[k] = _one(allv)
                degrees[k] = 0
            G = _one(allv)
            log.append({"level": i, "event": "unit", "note": "G_i(t,0) != 0; this and lower levels set to 1"})
            break
        H = _restrict_axis(G, space, i)
        tries = 0
        while H.is_zero():
            if not allow_change or i == 1 or tries >= max_retries:
                raise TowerError(f"no {var}-regular direction found at level {i}")
            coeffs = {k: int(rng.integers(-9, 10)) for k in range(i - 1)}
            m = _shear_matrix(n, i - 1, coeffs)
            tries += 1
            attempts += 1
            trial = G.linear_change(m, space)
            Ht = _restrict_axis(trial, space, i)
            if not Ht.is_zero():
                G, H = trial, Ht
                total = _matmul(total, m)
                for k in range(i + 1, n + 1):
                    levels[k] = levels[k].linear_change(m, space)
                log.append({"level": i, "event": "shear", "coeffs": {space[k]: c for k, c in coeffs.items()}})
        d = H.min_degree(var)
        A = H.coeffs(var)[d].partial_eval(zero_x)  # coefficient of x_i^d, a polynomial in t
        entry: dict = {"level": i, "var": var, "order": d}
        if i == 1:
            if A.is_constant() and G.degree(var) == d and G.lc(var).is_constant():
                Fi = _monicize(G, var)
                entry["route"] = "global-monic"
            else:
                add_locus(A, "Weierstrass unit at level 1", i)
                Fi = MPoly.var(var, allv) ** d
                entry["route"] = "weierstrass-level-1"
        else:
            if A.is_constant():
                Gt = G.scale(1 / A.constant_value())
                entry["scaling"] = None
            else:
                w = 2
                for e, _ in G.terms.items():
                    lower = sum(e[len(params) + k] for k in range(i - 1))
                    k_i = e[len(params) + i - 1]
                    if lower and k_i < d + 1:
                        w = max(w, math.ceil((d + 1 - k_i) / lower))
                sub = {space[k]: (A ** w) * MPoly.var(space[k], allv) for k in range(i - 1)}
                sub[var] = A * MPoly.var(var, allv)
                Gt = exact_quotient(G.subs(sub), A ** (d + 1))
                add_locus(A, f"scaling weight {w} at level {i}", i)
                entry["scaling"] = {"A": format_poly(A), "weight": w}
                for k in range(i + 1, n + 1):
                    levels[k] = levels[k].subs(sub)
            lc = Gt.lc(var)
            if Gt.degree(var) == d and lc.is_constant():
                Fi = _monicize(Gt, var)
                entry["route"] = "global-monic"
            elif set(lc.used_variables()) <= set(params):
                add_locus(lc, "global leading coefficient", i)
                Fi = exact_quotient(Gt, lc) if lc.is_constant() else Gt
                if not lc.is_constant():
                    raise TowerError(f"level {i} leading coefficient {format_poly(lc)} needs a "
                                     "rational-function route; not supported")
                entry["route"] = "global-nonlocal"
            else:
                raise TowerError(f"level {i} is not monic in {var} and the leading coefficient "
                                 "involves space variables")
        levels[i] = Fi
        degrees[i] = Fi.degree(var)
        red = squarefree_part(Fi, var, method=method).base
        rd = red.degree(var)
        entry.update({"degree": degrees[i], "reduced_degree": rd, "j": rd, "next": "disc(F_red)"})
        log.append(entry)
        G = discriminant(red, var, method=method) if rd >= 1 else _one(allv)
    if not G.is_constant():
        raise TowerError("final discriminant is not constant")  # pragma: no cover
    levels[0] = _one(allv)
    change = LinearChange(tuple(tuple(r) for r in total), seed, attempts)
    sys = PseudoPolySystem(space, params, tuple(levels), tuple(degrees), change,
                           tuple(locus), False, tuple(log))
    return sys, change, list(locus)


# --- checks ---------------------------------------------------------------------------------------


def check_equisingular(sys: PseudoPolySystem, t0: Sequence = ()) -> bool:
    """F_0(t0) != 0, with t0 outside the recorded exceptional locus."""
    t0 = _check_t0(sys, t0)
    assign = dict(zip(sys.param_vars, t0))
    point = dict(assign, **{v: 0 for v in sys.space_vars})
    if sys.levels[0].evaluate(point) == 0:
        return False
    return all(P.evaluate(point) != 0 for P in sys.exceptional_locus)


def check_transverse(sys: PseudoPolySystem, t0: Sequence = ()) -> dict:
    t0 = _check_t0(sys, t0)
    abs_sys = sys.at_parameter(t0)
    flags = {}
    for i in range(1, sys.n + 1):
        if sys.degrees[i] == 0:
            continue
        F = abs_sys.levels[i]
        flags[i] = multiplicity_at(F) == sys.degrees[i]
    return {"levels": flags, "transverse": all(flags.values())}


def verify_invariants(sys: PseudoPolySystem, method: str = "auto") -> dict:
    """Structural checks; parametric levels may differ from discriminants by units in t."""
    report = {"monic": True, "variables": True, "divisibility": {}, "unit_convention": True}
    params = set(sys.param_vars)
    seen_unit = False
    for i in range(sys.n, 0, -1):
        F = sys.levels[i]
        var = sys.space_vars[i - 1]
        if sys.degrees[i] == 0:
            seen_unit = True
            if F != 1:
                report["unit_convention"] = False
            continue
        if seen_unit:
            report["unit_convention"] = False
        if F.degree(var) != sys.degrees[i] or F.lc(var) != 1:
            report["monic"] = False
        allowed = params | set(sys.space_vars[:i])
        if not set(F.used_variables()) <= allowed:
            report["variables"] = False
        red = squarefree_part(F, var, method=method).base
        D = discriminant(red, var, method=method) if red.degree(var) >= 1 else _one(sys.all_vars)
        lower = sys.levels[i - 1]
        report["divisibility"][i] = _divisibility_kind(D, lower, params)
    report["ok"] = (report["monic"] and report["variables"] and report["unit_convention"]
                    and all(v != "fails" for v in report["divisibility"].values()))
    return report


def _divisibility_kind(D: MPoly, lower: MPoly, params: set) -> str:
    try:
        exact_quotient(lower, D)
        return "exact"
    except NotDivisible:
        pass
    try:
        q = exact_quotient(D, lower)
    except NotDivisible:
        return "local" if params else "fails"
    if set(q.used_variables()) <= params:
        return "up-to-unit-in-t"
    return "local" if params else "fails"


def estimate_domain_radii(sys: PseudoPolySystem, t0: Sequence = (), top: float = 0.5,
                          samples: int = 12, floor: float = 2.0 ** -40) -> tuple[float, ...]:
    """Numeric radii eps_1 <= ... <= eps_n (top-down, sampled; flagged as estimates).

    eps_n = ``top``. For i = n..2, eps_{i-1} is the largest value (log bisection,
    at most eps_i / 2) such that every root of F_i(x', .) has modulus < eps_i for
    sampled x' in the polydisc of radius eps_{i-1}. Then F_i does not vanish on
    U_{i-1} x dD_i at the samples.
    """
    from .numeric import compile_upoly

    abs_sys = sys.at_parameter(t0)
    n = sys.n
    radii = [0.0] * n
    radii[n - 1] = top
    rng = np.random.default_rng(0)
    for i in range(n, 1, -1):
        var = sys.space_vars[i - 1]
        F = abs_sys.levels[i]
        if sys.degrees[i] == 0:
            radii[i - 2] = radii[i - 1] / 2
            continue
        U = compile_upoly(F, var, sys.space_vars[: i - 1])
        base = rng.uniform(-1, 1, (samples, i - 1)) + 1j * rng.uniform(-1, 1, (samples, i - 1))
        base = np.vstack([base / np.maximum(1, np.abs(base).max(axis=1, keepdims=True)),
                          np.exp(2j * np.pi * np.arange(samples) / samples)[:, None] * np.ones(i - 1)])

        def ok(eps: float) -> bool:
            for row in base:
                c = U.coeffs_np(eps * row)
                r = np.roots(c[::-1])
                if len(r) and np.max(np.abs(r)) >= radii[i - 1]:
                    return False
            return True

        hi = radii[i - 1] / 2
        if ok(hi):
            radii[i - 2] = hi
            continue
        lo = floor
        for _ in range(50):
            mid = math.sqrt(lo * hi)
            if ok(mid):
                lo = mid
            else:
                hi = mid
        radii[i - 2] = lo
    return tuple(radii)
