"""Sparse exact multivariate polynomials.

An ``MPoly`` is a mapping from exponent tuples to exact scalars over an ordered
tuple of variable names. Instances are treated as immutable; every operation
returns a new polynomial. Canonical order for printing and leading terms is
graded lexicographic over the declared variable order.
"""

from __future__ import annotations

from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .gaussq import GaussianRational, Scalar, conj, is_real, re_im, to_scalar


class PolyError(ValueError):
    """Base class for polynomial-level input errors."""


class IncompatibleVariables(PolyError):
    pass


class NotDivisible(PolyError):
    pass


class SingularChange(PolyError):
    pass


class InfiniteMultiplicity(PolyError):
    """Multiplicity of the zero polynomial is +infinity."""


def _grlex_key(e: tuple[int, ...]):
    return (sum(e), e)


class MPoly:
    __slots__ = ("_vars", "_terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, object] | None = None):
        vs = tuple(variables)
        if len(set(vs)) != len(vs):
            raise IncompatibleVariables(f"repeated variable names in {vs}")
        clean: dict[tuple[int, ...], Scalar] = {}
        n = len(vs)
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != n:
                raise PolyError(f"exponent {e} has wrong length for variables {vs}")
            if any(k < 0 for k in e):
                raise PolyError(f"negative exponent in {e}")
            c = to_scalar(c)
            if c:
                clean[e] = c
        self._vars = vs
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, vs: tuple, terms: dict) -> "MPoly":
        # trusted constructor: terms already canonical, no zeros
        obj = cls.__new__(cls)
        obj._vars = vs
        obj._terms = terms
        obj._hash = None
        return obj

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, variables: Sequence[str]) -> "MPoly":
        return cls._raw(tuple(variables), {})

    @classmethod
    def const(cls, c, variables: Sequence[str]) -> "MPoly":
        vs = tuple(variables)
        c = to_scalar(c)
        return cls._raw(vs, {(0,) * len(vs): c} if c else {})

    @classmethod
    def var(cls, name: str, variables: Sequence[str]) -> "MPoly":
        vs = tuple(variables)
        if name not in vs:
            raise IncompatibleVariables(f"{name!r} not among {vs}")
        e = tuple(1 if v == name else 0 for v in vs)
        return cls._raw(vs, {e: Fraction(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], c, variables: Sequence[str]) -> "MPoly":
        return cls(variables, {tuple(exps): c})

    # accessors ------------------------------------------------------------
    @property
    def variables(self) -> tuple[str, ...]:
        return self._vars

    @property
    def terms(self) -> Mapping[tuple[int, ...], Scalar]:
        return MappingProxyType(self._terms)

    @property
    def nvars(self) -> int:
        return len(self._vars)

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def constant_value(self) -> Scalar:
        if not self.is_constant():
            raise PolyError("polynomial is not constant")
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def constant_term(self) -> Scalar:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def is_real(self) -> bool:
        return all(is_real(c) for c in self._terms.values())

    def index(self, var: str) -> int:
        try:
            return self._vars.index(var)
        except ValueError:
            raise IncompatibleVariables(f"{var!r} not among {self._vars}") from None

    def degree(self, var: str | None = None) -> int:
        """Degree in ``var`` (total degree if None); -1 for the zero polynomial."""
        if not self._terms:
            return -1
        if var is None:
            return max(sum(e) for e in self._terms)
        k = self.index(var)
        return max(e[k] for e in self._terms)

    def min_degree(self, var: str | None = None) -> int:
        if not self._terms:
            return -1
        if var is None:
            return min(sum(e) for e in self._terms)
        k = self.index(var)
        return min(e[k] for e in self._terms)

    def used_variables(self) -> tuple[str, ...]:
        used = [False] * self.nvars
        for e in self._terms:
            for k, p in enumerate(e):
                if p:
                    used[k] = True
        return tuple(v for v, u in zip(self._vars, used) if u)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Scalar]]:
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def leading_term(self) -> tuple[tuple[int, ...], Scalar]:
        if not self._terms:
            raise PolyError("zero polynomial has no leading term")
        e = max(self._terms, key=_grlex_key)
        return e, self._terms[e]

    def leading_coefficient(self) -> Scalar:
        return self.leading_term()[1]

    # variable management --------------------------------------------------
    def with_vars(self, variables: Sequence[str]) -> "MPoly":
        """Re-embed into another variable list (every used variable must appear)."""
        vs = tuple(variables)
        if vs == self._vars:
            return self
        pos = []
        for k, v in enumerate(self._vars):
            pos.append(vs.index(v) if v in vs else -1)
        out = {}
        n = len(vs)
        for e, c in self._terms.items():
            ne = [0] * n
            for k, p in enumerate(e):
                if p:
                    if pos[k] < 0:
                        raise IncompatibleVariables(
                            f"variable {self._vars[k]!r} used but absent from {vs}")
                    ne[pos[k]] = p
            out[tuple(ne)] = c
        return MPoly._raw(vs, out)

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other._vars != self._vars:
                raise IncompatibleVariables(
                    f"variable lists differ: {self._vars} vs {other._vars}")
            return other
        return MPoly.const(other, self._vars)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return MPoly._raw(self._vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._raw(self._vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "MPoly":
        c = to_scalar(c)
        if not c:
            return MPoly.zero(self._vars)
        return MPoly._raw(self._vars, {e: v * c for e, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        o = self._coerce(other)
        if len(self._terms) < len(o._terms):
            a, b = self._terms, o._terms
        else:
            a, b = o._terms, self._terms
        out: dict = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = out.get(e)
                out[e] = c1 * c2 if s is None else s + c1 * c2
        return MPoly._raw(self._vars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise PolyError("polynomial powers need a non-negative integer exponent")
        out = MPoly.const(1, self._vars)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def conjugate(self) -> "MPoly":
        return MPoly._raw(self._vars, {e: conj(c) for e, c in self._terms.items()})

    # calculus and substitution ---------------------------------------------
    def diff(self, var: str) -> "MPoly":
        k = self.index(var)
        out = {}
        for e, c in self._terms.items():
            p = e[k]
            if p:
                ne = list(e)
                ne[k] = p - 1
                out[tuple(ne)] = c * p
        return MPoly._raw(self._vars, out)

    def subs(self, mapping: Mapping[str, object]) -> "MPoly":
        """Simultaneous substitution var -> MPoly (same variables) or scalar."""
        repl = {}
        for v, val in mapping.items():
            k = self.index(v)
            repl[k] = self._coerce(val)
        if not repl:
            return self
        cache: dict[tuple[int, int], MPoly] = {}

        def power(k, p):
            key = (k, p)
            if key not in cache:
                cache[key] = repl[k] ** p
            return cache[key]

        acc: dict = {}
        for e, c in self._terms.items():
            keep = tuple(0 if k in repl else p for k, p in enumerate(e))
            part = MPoly._raw(self._vars, {keep: c})
            for k in repl:
                if e[k]:
                    part = part * power(k, e[k])
            for e2, c2 in part._terms.items():
                s = acc.get(e2)
                acc[e2] = c2 if s is None else s + c2
        return MPoly._raw(self._vars, {e: c for e, c in acc.items() if c})

    def evaluate(self, point: Mapping[str, object] | Sequence) -> Scalar:
        """Exact evaluation at a full point (mapping or sequence in variable order)."""
        vals = self._point_values(point)
        if len(vals) != self.nvars:
            raise PolyError("point must assign every variable")
        total: Scalar = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for v, p in zip(vals, e):
                if p:
                    term = term * v ** p
            total = total + term
        return total

    def _point_values(self, point):
        if isinstance(point, Mapping):
            missing = [v for v in self._vars if v not in point]
            if missing:
                raise PolyError(f"point misses variables {missing}")
            return [to_scalar(point[v]) for v in self._vars]
        vals = list(point)
        if len(vals) != self.nvars:
            raise PolyError(f"point has {len(vals)} coordinates, expected {self.nvars}")
        return [to_scalar(v) for v in vals]

    def partial_eval(self, assignment: Mapping[str, object]) -> "MPoly":
        """Substitute exact scalars for some variables, keeping the variable list."""
        return self.subs({v: to_scalar(c) for v, c in assignment.items()})

    def translate(self, point: Sequence) -> "MPoly":
        """F(x + p): moves ``point`` to the origin."""
        vals = self._point_values(point)
        mapping = {}
        for v, p in zip(self._vars, vals):
            if p:
                mapping[v] = MPoly.var(v, self._vars) + p
        return self.subs(mapping) if mapping else self

    def linear_change(self, matrix: Sequence[Sequence], variables: Sequence[str] | None = None) -> "MPoly":
        """Substitute x_i := sum_j M[i][j] x_j over ``variables`` (default: all)."""
        vs = tuple(variables) if variables is not None else self._vars
        m = [[to_scalar(a) for a in row] for row in matrix]
        if len(m) != len(vs) or any(len(row) != len(vs) for row in m):
            raise SingularChange("change matrix must be square over the chosen variables")
        if exact_det(m) == 0:
            raise SingularChange("change matrix is not invertible")
        gens = [MPoly.var(v, self._vars) for v in vs]
        mapping = {}
        for i, v in enumerate(vs):
            acc = MPoly.zero(self._vars)
            for j, a in enumerate(m[i]):
                if a:
                    acc = acc + gens[j].scale(a)
            mapping[v] = acc
        return self.subs(mapping)

    # structure in one variable ---------------------------------------------
    def coeffs(self, var: str) -> list["MPoly"]:
        """Coefficients in ``var`` (index = power), as MPolys over the same variables."""
        k = self.index(var)
        d = self.degree(var)
        buckets: list[dict] = [dict() for _ in range(max(d + 1, 0))]
        for e, c in self._terms.items():
            ne = e[:k] + (0,) + e[k + 1:]
            buckets[e[k]][ne] = c
        return [MPoly._raw(self._vars, b) for b in buckets]

    @classmethod
    def from_coeffs(cls, coeffs: Sequence["MPoly"], var: str, variables: Sequence[str]) -> "MPoly":
        vs = tuple(variables)
        k = vs.index(var)
        out = {}
        for p, c in enumerate(coeffs):
            for e, v in c._terms.items():
                if e[k]:
                    raise PolyError("coefficient depends on the main variable")
                out[e[:k] + (p,) + e[k + 1:]] = v
        return MPoly._raw(vs, out)

    def lc(self, var: str) -> "MPoly":
        cs = self.coeffs(var)
        if not cs:
            raise PolyError("zero polynomial has no leading coefficient")
        return cs[-1]

    # division ---------------------------------------------------------------
    def exact_div(self, other) -> "MPoly":
        """Exact quotient; raises NotDivisible when the remainder is nonzero."""
        from .resultants import exact_quotient
        return exact_quotient(self, self._coerce(other))

    def divides(self, other: "MPoly") -> bool:
        try:
            other.exact_div(self)
        except NotDivisible:
            return False
        return True

    # comparison / hashing -----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self._vars == other._vars and self._terms == other._terms
        try:
            c = to_scalar(other)
        except TypeError:
            return NotImplemented
        return self.is_constant() and self.constant_value() == c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._vars, frozenset(self._terms.items())))
        return self._hash

    # printing -----------------------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"MPoly({list(self._vars)!r}, {format_poly(self)!r})"


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_scalar_abs(c: Scalar) -> tuple[int, str, bool]:
    """Returns (sign, text of |c| or parenthesized Gaussian, is_one)."""
    re, im = re_im(c)
    if im == 0:
        sign = -1 if re < 0 else 1
        a = abs(re)
        return sign, _fmt_rational(a), a == 1
    if re == 0:
        sign = -1 if im < 0 else 1
        a = abs(im)
        body = "i" if a == 1 else f"{_fmt_rational(a)}*i"
        return sign, body, False
    imtxt = "i" if abs(im) == 1 else f"{_fmt_rational(abs(im))}*i"
    op = "-" if im < 0 else "+"
    return 1, f"({_fmt_rational(re)} {op} {imtxt})", False


def format_poly(F: MPoly) -> str:
    if F.is_zero():
        return "0"
    parts = []
    for e, c in F.sorted_terms():
        sign, ctext, one = _fmt_scalar_abs(c)
        mono = "*".join(v if p == 1 else f"{v}^{p}" for v, p in zip(F.variables, e) if p)
        if not mono:
            body = ctext
        elif one:
            body = mono
        else:
            body = f"{ctext}*{mono}"
        parts.append((sign, body))
    s0, b0 = parts[0]
    out = ("-" if s0 < 0 else "") + b0
    for sign, body in parts[1:]:
        out += (" - " if sign < 0 else " + ") + body
    return out


def exact_det(m: Sequence[Sequence[Scalar]]) -> Scalar:
    """Determinant over Q(i) by plain Gaussian elimination."""
    a = [list(row) for row in m]
    n = len(a)
    det: Scalar = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det = det * p
        for r in range(col + 1, n):
            if a[r][col]:
                f = a[r][col] / p
                for k in range(col, n):
                    a[r][k] = a[r][k] - f * a[col][k]
    return det


def exact_inverse(m: Sequence[Sequence[Scalar]]) -> list[list[Scalar]]:
    n = len(m)
    a = [[to_scalar(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise SingularChange("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def mpoly_sum(polys: Iterable[MPoly], variables: Sequence[str]) -> MPoly:
    out = MPoly.zero(variables)
    for p in polys:
        out = out + p
    return out


def gaussian(re, im=0) -> Scalar:
    return GaussianRational.make(re, im)
