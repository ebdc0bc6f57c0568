"""Canonical filtration X^i_j of a tower and point classification.

X^i_i is the whole space K^i, X^1_0 = V(F_1), and for j < i

    X^i_j = (pi^-1(X^{i-1}_j) & V(F_i)) | pi^-1(X^{i-1}_{j-1}),   X^{i-1}_{-1} = {}.

Unrolled, the smallest j with p in X^i_j counts the levels k <= i whose F_k does
not vanish at (p_1..p_k). Strata are reported at filtration granularity:
(dimension, type) plus the atom pattern, never as connected components.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .numeric import CompiledPoly
from .polycore import PolyError, to_scalar
from .tower import PseudoPolySystem, TowerError, verify_invariants

SCHEMA = "arcwise/filtration/v1"


class AmbiguousClassification(PolyError):
    """|F_k(p)| fell inside the (tol, 2 tol) band."""


@dataclass(frozen=True)
class StratFiltration:
    tower: PseudoPolySystem
    # cells[(i, j)] = list of conjunctions; each conjunction is a sorted tuple of
    # levels k with atom "F_k = 0". [] is the empty set, [()] the whole space.
    cells: dict

    @property
    def n(self) -> int:
        return self.tower.n

    def cell(self, i: int, j: int) -> list[tuple[int, ...]]:
        return self.cells[(i, j)]

    def to_dict(self) -> dict:
        out = []
        for (i, j), dnf in sorted(self.cells.items()):
            out.append({
                "level": i, "dim": j,
                "tree": {"op": "or", "args": [
                    {"op": "and", "args": [{"atom": f"F_{k} = 0", "level": k,
                                            "vars": list(self.tower.space_vars[:k])} for k in conj]}
                    for conj in dnf]},
                "empty": not dnf,
            })
        return {"$schema": SCHEMA, "space_vars": list(self.tower.space_vars),
                "levels": [str(F) for F in self.tower.levels], "cells": out}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


@dataclass(frozen=True)
class StratumLabel:
    level: int
    dim: int
    type: str  # "I" or "II"
    witness: dict = field(default_factory=dict)  # level -> "=0" / "!=0"
    tol: float = 0.0

    def to_dict(self, point=None) -> dict:
        return {"point": None if point is None else [str(x) for x in point], "level": self.level,
                "dim": self.dim, "type": self.type,
                "witnesses": {str(k): v for k, v in sorted(self.witness.items())}, "tol": self.tol}


def build_filtration(sys: PseudoPolySystem, verify: bool = True) -> StratFiltration:
    if sys.param_vars:
        raise TowerError("build_filtration needs an absolute system; fix parameters with at_parameter")
    if verify:
        rep = verify_invariants(sys)
        if not rep["ok"]:
            raise TowerError(f"tower invariants fail: {rep}")
    n = sys.n
    cells: dict = {(0, 0): [()]}
    for i in range(1, n + 1):
        unit = sys.degrees[i] == 0  # F_i = 1 has empty zero set
        for j in range(0, i + 1):
            if j == i:
                cells[(i, j)] = [()]
                continue
            dnf = set()
            if not unit:
                for conj in cells[(i - 1, j)]:
                    dnf.add(tuple(sorted(set(conj) | {i})))
            if j - 1 >= 0:
                for conj in cells[(i - 1, j - 1)]:
                    dnf.add(conj)
            cells[(i, j)] = _minimize(dnf)
    return StratFiltration(sys, {k: v for k, v in cells.items() if k[0] >= 1})


def _minimize(dnf: set) -> list[tuple[int, ...]]:
    """Drop conjunctions implied by a weaker one (absorption)."""
    items = sorted(dnf, key=lambda c: (len(c), c))
    keep: list[tuple[int, ...]] = []
    for c in items:
        if not any(set(k) <= set(c) for k in keep):
            keep.append(c)
    return keep


def _is_exact(p) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in p)


def _level_values(filt: StratFiltration, p: Sequence, prec: int):
    sys = filt.tower
    vals = {}
    if _is_exact(p):
        pt = [to_scalar(x) for x in p]
        for k in range(1, sys.n + 1):
            vals[k] = sys.levels[k].evaluate(pt)
        return vals, True
    with mpmath.workprec(prec):
        for k in range(1, sys.n + 1):
            cp = CompiledPoly(sys.levels[k], sys.space_vars)
            vals[k] = cp.mp(list(p))
    return vals, False


def classify_point(filt: StratFiltration, p: Sequence, tol: float = 0.0, prec: int = 256) -> StratumLabel:
    """Cell membership (i = n, dim j, type) by bottom-up atom evaluation."""
    n = filt.n
    if len(p) != n:
        raise PolyError(f"point needs {n} coordinates")
    vals, exact = _level_values(filt, p, prec)
    witness = {}
    dim = 0
    for k in range(1, n + 1):
        v = vals[k]
        if exact:
            zero = v == 0
        else:
            a = abs(v)
            if tol > 0 and tol < a < 2 * tol:
                raise AmbiguousClassification(f"|F_{k}(p)| = {mpmath.nstr(a, 5)} inside ({tol}, {2 * tol})")
            zero = a <= tol
        witness[k] = "=0" if zero else "!=0"
        if not zero:
            dim += 1
    typ = "I" if witness[n] == "=0" else "II"
    return StratumLabel(n, dim, typ, witness, 0.0 if exact else float(tol))


def member(filt: StratFiltration, i: int, j: int, p: Sequence, tol: float = 0.0) -> bool:
    """p (first i coordinates used) in X^i_j, from the stored description."""
    sys = filt.tower
    q = list(p)[:i]
    exact = _is_exact(q)
    for conj in filt.cell(i, j):
        ok = True
        for k in conj:
            F = sys.levels[k]
            if exact:
                v = F.evaluate(q[:k] + [0] * (sys.n - k))
                ok = v == 0
            else:
                v = CompiledPoly(F, sys.space_vars).mp(q[:k] + [0] * (sys.n - k))
                ok = abs(v) <= tol
            if not ok:
                break
        if ok:
            return True
    return False


def same_component_heuristic(filt: StratFiltration, p: Sequence, q: Sequence, samples: int = 64,
                             tol: float = 0.0) -> dict:
    """Sample the segment p -> q and check the label never changes. Heuristic only."""
    lp = classify_point(filt, p, tol)
    labels = []
    for k in range(samples + 1):
        s = Fraction(k, samples)
        pt = [a + s * (b - a) for a, b in zip(p, q)] if _is_exact(p) and _is_exact(q) else \
            [complex(a) + float(s) * (complex(b) - complex(a)) for a, b in zip(p, q)]
        labels.append(classify_point(filt, pt, tol))
    same = all((lab.dim, lab.type) == (lp.dim, lp.type) for lab in labels)
    return {"same": same, "heuristic": True, "samples": samples}
