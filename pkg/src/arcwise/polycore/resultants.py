"""Resultants, discriminants, gcds and squarefree parts.

Three routes share one interface via ``method``:

* ``"subresultant"``: pure-Python subresultant PRS over Q(i)[other vars];
* ``"sylvester"``: Bareiss determinant of the Sylvester matrix (oracle);
* ``"flint"``: python-flint, real rational coefficients only.

``"auto"`` picks FLINT for real inputs and the subresultant route otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from . import flintbridge
from .mpoly import MPoly, NotDivisible, PolyError

METHODS = ("auto", "subresultant", "sylvester", "flint")


class DegreeError(PolyError):
    pass


@dataclass(frozen=True)
class UPolyView:
    """An MPoly read as a univariate polynomial in ``main_var``."""

    base: MPoly
    main_var: str

    def __post_init__(self):
        self.base.index(self.main_var)

    @property
    def degree(self) -> int:
        return self.base.degree(self.main_var)

    def coeffs(self) -> list[MPoly]:
        return self.base.coeffs(self.main_var)

    def lc(self) -> MPoly:
        return self.base.lc(self.main_var)

    def is_monic(self) -> bool:
        return not self.base.is_zero() and self.lc() == 1

    def derivative(self) -> "UPolyView":
        return UPolyView(self.base.diff(self.main_var), self.main_var)

    def __str__(self):
        return str(self.base)


def _view(F, var=None) -> UPolyView:
    if isinstance(F, UPolyView):
        return F
    if var is None:
        raise PolyError("main variable required")
    return UPolyView(F, var)


def _pick(method: str, *polys: MPoly) -> str:
    if method not in METHODS:
        raise PolyError(f"unknown method {method!r}")
    if method == "auto":
        return "flint" if flintbridge.usable(*polys) else "subresultant"
    if method == "flint" and not flintbridge.usable(*polys):
        raise PolyError("FLINT route unavailable for these inputs")
    return method


# --- exact division ------------------------------------------------------------


def _exact_quotient_py(A: MPoly, B: MPoly) -> MPoly:
    if B.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if A.is_zero():
        return A
    vs = A.variables
    eb, cb = B.leading_term()
    bterms = list(B.terms.items())
    rem = dict(A.terms)
    quot = {}
    key = lambda e: (sum(e), e)  # noqa: E731
    while rem:
        er = max(rem, key=key)
        cr = rem[er]
        shift = tuple(x - y for x, y in zip(er, eb))
        if any(s < 0 for s in shift):
            raise NotDivisible("nonzero remainder")
        q = cr / cb
        quot[shift] = q
        for e, c in bterms:
            ee = tuple(x + y for x, y in zip(e, shift))
            v = rem.get(ee, 0) - q * c
            if v:
                rem[ee] = v
            else:
                rem.pop(ee, None)
    return MPoly._raw(vs, quot)


def exact_quotient(A: MPoly, B: MPoly, method: str = "auto") -> MPoly:
    if B.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if B.is_constant():
        return A.scale(1 / B.constant_value())
    if method in ("auto", "flint") and flintbridge.usable(A, B) and len(A) > 8:
        q = flintbridge.exact_quotient(A, B)
        if q is None:
            raise NotDivisible("nonzero remainder")
        return q
    return _exact_quotient_py(A, B)


# --- univariate-in-one-variable helpers (coefficient lists, low to high) -------------


def _strip(c: list[MPoly]) -> list[MPoly]:
    while c and c[-1].is_zero():
        c.pop()
    return c


def _prem(a: list[MPoly], b: list[MPoly]) -> list[MPoly]:
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) a mod b."""
    db = len(b) - 1
    lb = b[-1]
    r = list(a)
    e = len(a) - len(b) + 1
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [c * lb for c in r]
        for k in range(db + 1):
            r[k + shift] = r[k + shift] - lr * b[k]
        r.pop()
        _strip(r)
        e -= 1
    if e > 0 and r:
        f = lb ** e
        r = [c * f for c in r]
    return r


def _div_list(c: list[MPoly], d: MPoly) -> list[MPoly]:
    return [exact_quotient(x, d, method="subresultant") for x in c]


def _subresultant_res(a: list[MPoly], b: list[MPoly], zero: MPoly) -> MPoly:
    """Resultant of coefficient lists by the subresultant PRS."""
    one = zero + 1
    if not a or not b:
        return zero
    s = 1
    if len(a) < len(b):
        a, b = b, a
        if (len(a) - 1) % 2 == 1 and (len(b) - 1) % 2 == 1:
            s = -s
    if len(b) == 1:
        return b[0] ** (len(a) - 1)
    g = one
    h = one
    while True:
        da, db = len(a) - 1, len(b) - 1
        delta = da - db
        if da % 2 == 1 and db % 2 == 1:
            s = -s
        r = _prem(a, b)
        if not r:
            return zero
        a = b
        b = _div_list(r, g * h ** delta)
        g = a[-1]
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = exact_quotient(g ** delta, h ** (delta - 1), method="subresultant")
        if len(b) == 1:
            da = len(a) - 1
            lb = b[0]
            if da == 0:
                res = one
            elif da == 1:
                res = lb
            else:
                res = exact_quotient(lb ** da, h ** (da - 1), method="subresultant")
            return res if s == 1 else -res


def bareiss_det(m: Sequence[Sequence], exact_div: Callable, zero_test: Callable = lambda x: not x):
    """Fraction-free determinant over an integral domain with exact division."""
    a = [list(row) for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if zero_test(a[k][k]):
            piv = next((r for r in range(k + 1, n) if not zero_test(a[r][k])), None)
            if piv is None:
                return a[k][k] * 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num if prev == 1 else exact_div(num, prev)
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign == 1 else -det


def sylvester_matrix(a: list[MPoly], b: list[MPoly], zero: MPoly) -> list[list[MPoly]]:
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    rows = []
    hi_a = list(reversed(a))
    hi_b = list(reversed(b))
    for i in range(n):
        rows.append([zero] * i + hi_a + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + hi_b + [zero] * (size - n - 1 - i))
    return rows


def resultant(A: MPoly, B: MPoly, var: str, method: str = "auto") -> MPoly:
    if A.variables != B.variables:
        raise PolyError("resultant operands need the same variables")
    if A.is_zero() or B.is_zero():
        return MPoly.zero(A.variables)
    how = _pick(method, A, B)
    if how == "flint":
        return flintbridge.resultant(A, B, var)
    a, b = A.coeffs(var), B.coeffs(var)
    zero = MPoly.zero(A.variables)
    if how == "sylvester":
        if len(a) == 1 and len(b) == 1:
            return MPoly.const(1, A.variables)
        mat = sylvester_matrix(a, b, zero)
        return bareiss_det(mat, lambda x, y: exact_quotient(x, y, method="subresultant"),
                           lambda x: x.is_zero())
    return _subresultant_res(a, b, zero)


def discriminant(F, var: str | None = None, method: str = "auto") -> MPoly:
    """(-1)^(n(n-1)/2) Res(F, F') / lc(F)."""
    v = _view(F, var)
    n = v.degree
    if n < 1:
        raise DegreeError("discriminant needs degree >= 1 in the main variable")
    P = v.base
    if n == 1:
        return MPoly.const(1, P.variables)
    R = resultant(P, P.diff(v.main_var), v.main_var, method=method)
    D = exact_quotient(R, v.lc(), method="auto" if method == "sylvester" else method)
    return -D if (n * (n - 1) // 2) % 2 else D


# --- gcd and squarefree parts -----------------------------------------------------------


def _normalize(F: MPoly) -> MPoly:
    """Scale so that the grlex leading coefficient is 1."""
    if F.is_zero():
        return F
    return F.scale(1 / F.leading_coefficient())


def _first_var(*polys: MPoly) -> str | None:
    for name in polys[0].variables:
        if any(p.degree(name) > 0 for p in polys):
            return name
    return None


def _content(F: MPoly, var: str) -> MPoly:
    g = MPoly.zero(F.variables)
    for c in F.coeffs(var):
        if c.is_zero():
            continue
        g = _gcd_py(g, c)
        if g.is_constant():
            return MPoly.const(1, F.variables)
    return g


def _gcd_py(A: MPoly, B: MPoly) -> MPoly:
    if A.is_zero():
        return _normalize(B)
    if B.is_zero():
        return _normalize(A)
    if A.is_constant() or B.is_constant():
        return MPoly.const(1, A.variables)
    var = _first_var(A, B)
    if A.degree(var) == 0:
        return _gcd_py(A, _content(B, var))
    if B.degree(var) == 0:
        return _gcd_py(_content(A, var), B)
    cA, cB = _content(A, var), _content(B, var)
    c = _gcd_py(cA, cB)
    a = _exact_quotient_py(A, cA).coeffs(var)
    b = _exact_quotient_py(B, cB).coeffs(var)
    if len(a) < len(b):
        a, b = b, a
    while b and len(b) > 1:
        r = _prem(a, b)
        a = b
        if not r:
            b = []
            break
        rp = MPoly.from_coeffs(r, var, A.variables)
        rp = _exact_quotient_py(rp, _content(rp, var))
        b = rp.coeffs(var)
    if b and len(b) == 1:
        g = MPoly.const(1, A.variables)
    else:
        g = MPoly.from_coeffs(a, var, A.variables)
        g = _exact_quotient_py(g, _content(g, var))
    return _normalize(c * g)


def gcd(A: MPoly, B: MPoly, method: str = "auto") -> MPoly:
    if A.variables != B.variables:
        raise PolyError("gcd operands need the same variables")
    how = _pick("auto" if method == "sylvester" else method, A, B)
    if how == "flint":
        return _normalize(flintbridge.gcd(A, B))
    return _gcd_py(A, B)


def radical(F: MPoly, method: str = "auto") -> MPoly:
    """Product of the distinct irreducible factors (up to a unit)."""
    if F.is_zero():
        raise PolyError("radical of zero")
    if F.is_constant():
        return MPoly.const(1, F.variables)
    how = _pick("auto" if method == "sylvester" else method, F)
    if how == "flint":
        out = MPoly.const(1, F.variables)
        for f, _ in flintbridge.squarefree_factors(F):
            out = out * f
        return _normalize(out)
    var = _first_var(F)
    c = _content(F, var)
    pp = _exact_quotient_py(F, c)
    part = _exact_quotient_py(pp, _gcd_py(pp, pp.diff(var)))
    return _normalize(radical(c, method) * part)


def squarefree_part(F, var: str | None = None, method: str = "auto") -> UPolyView:
    """Reduced form of F; monic in the main variable whenever F is."""
    v = _view(F, var)
    if v.base.is_zero():
        raise PolyError("squarefree part of the zero polynomial")
    R = radical(v.base, method)
    lc = R.lc(v.main_var)
    if lc.is_constant():
        if v.base.lc(v.main_var).is_constant():
            R = R.scale(1 / lc.constant_value())
    return UPolyView(R, v.main_var)


def monic_in(F: MPoly, var: str) -> MPoly:
    """Divide by a constant leading coefficient in ``var``."""
    lc = F.lc(var)
    if not lc.is_constant():
        raise PolyError(f"leading coefficient in {var} is not constant")
    return F.scale(1 / lc.constant_value())


def squarefree_decomposition(F: MPoly, var: str, method: str = "auto") -> list[tuple[MPoly, int]]:
    """F = unit * prod g_k^k with g_k squarefree, pairwise coprime, monic in ``var``.

    Only factors of positive degree in ``var`` are returned; F must have a
    constant leading coefficient in ``var``.
    """
    if not F.lc(var).is_constant():
        raise PolyError(f"leading coefficient in {var} is not constant")
    if F.degree(var) == 0:
        return []
    how = _pick("auto" if method == "sylvester" else method, F)
    groups: dict[int, MPoly] = {}
    if how == "flint":
        for f, m in flintbridge.squarefree_factors(F):
            if f.degree(var) > 0:
                groups[m] = groups[m] * f if m in groups else f
    else:
        # Yun's algorithm
        dF = F.diff(var)
        a = _gcd_py(F, dF)
        b = _exact_quotient_py(F, a)
        c = _exact_quotient_py(dF, a)
        d = c - b.diff(var)
        k = 1
        while b.degree(var) > 0:
            g = _gcd_py(b, d) if not d.is_zero() else b
            b = _exact_quotient_py(b, g)
            c = _exact_quotient_py(d, g) if not d.is_zero() else d
            d = c - b.diff(var)
            if g.degree(var) > 0:
                groups[k] = g
            k += 1
    return [(monic_in(g, var), k) for k, g in sorted(groups.items())]
