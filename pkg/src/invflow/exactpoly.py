"""Exact bivariate polynomials and rational functions over Q.

Two bases share one representation: the lambda basis, whose variables are
the principal curvatures ``(l1, l2)``, and the HA basis, whose variables are
``H = l1 + l2`` and ``A = l1^2 + l2^2``.  Terms are kept in a sparse map from
exponent pairs to nonzero coefficients; values never mutate after
construction.

Rational functions are always stored fully reduced with integer
coefficients whose joint content is one and a denominator whose leading
coefficient (graded lexicographic order) is positive, so equality is a
structural comparison.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping, Optional, Union

from .univar import UnivarPoly, int_gcd, int_primitive, poly_gcd, _norm

Number = Union[int, Fraction]


class Basis(enum.Enum):
    LAMBDA = "lambda"
    HA = "HA"

    @property
    def names(self) -> tuple[str, str]:
        return ("l1", "l2") if self is Basis.LAMBDA else ("H", "A")


class BasisMismatch(ValueError):
    pass


class NotDivisible(ArithmeticError):
    pass


def _grlex_key(exp: tuple[int, int]) -> tuple[int, int]:
    return (exp[0] + exp[1], exp[0])


class BivarPoly:
    """Sparse polynomial in two variables with rational coefficients."""

    __slots__ = ("terms", "basis", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], Number] | Iterable = (),
                 basis: Basis = Basis.LAMBDA):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[tuple[int, int], Number] = {}
        for (i, j), c in items:
            if i < 0 or j < 0:
                raise ValueError("exponents must be nonnegative")
            c = _norm(Fraction(c)) if not isinstance(c, int) else c
            if c:
                key = (int(i), int(j))
                clean[key] = _norm(clean.get(key, 0) + c)
                if clean[key] == 0:
                    del clean[key]
        self.terms = clean
        self.basis = basis
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, basis: Basis) -> "BivarPoly":
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.basis = basis
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c: Number, basis: Basis = Basis.LAMBDA) -> "BivarPoly":
        return cls({(0, 0): c}, basis)

    @classmethod
    def var(cls, k: int, basis: Basis = Basis.LAMBDA) -> "BivarPoly":
        return cls({(1, 0) if k == 0 else (0, 1): 1}, basis)

    @classmethod
    def monomial(cls, i: int, j: int, c: Number = 1,
                 basis: Basis = Basis.LAMBDA) -> "BivarPoly":
        return cls({(i, j): c}, basis)

    # -- structure -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0, 0) in self.terms)

    def const_value(self) -> Number:
        return self.terms.get((0, 0), 0)

    @property
    def degree(self) -> int:
        """Total degree; ``-1`` for zero."""
        return max((i + j for i, j in self.terms), default=-1)

    def degree_in(self, k: int) -> int:
        return max((e[k] for e in self.terms), default=-1)

    def sorted_terms(self) -> list[tuple[tuple[int, int], Number]]:
        """Terms in decreasing graded lexicographic order (l1 > l2)."""
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def leading_term(self) -> tuple[tuple[int, int], Number]:
        exp = max(self.terms, key=_grlex_key)
        return exp, self.terms[exp]

    @property
    def lc(self) -> Number:
        return self.leading_term()[1] if self.terms else 0

    def weighted_degrees(self, wx: int, wy: int) -> set[int]:
        return {wx * i + wy * j for i, j in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.weighted_degrees(1, 1)) <= 1

    def min_exponents(self) -> tuple[int, int]:
        return (min(e[0] for e in self.terms), min(e[1] for e in self.terms))

    def __eq__(self, other):
        if isinstance(other, BivarPoly):
            return self.basis is other.basis and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(0, 0): other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.basis, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"BivarPoly({dict(self.sorted_terms())!r}, {self.basis})"

    def __str__(self):
        from .exprio import format_poly
        return format_poly(self)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "BivarPoly"):
        if other.basis is not self.basis:
            raise BasisMismatch(f"{self.basis.value} vs {other.basis.value}")

    def _coerce(self, other) -> "BivarPoly":
        if isinstance(other, BivarPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return BivarPoly.const(other, self.basis)
        raise TypeError(f"cannot combine BivarPoly with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = _norm(v)
            else:
                out.pop(e, None)
        return BivarPoly._raw(out, self.basis)

    __radd__ = __add__

    def __neg__(self):
        return BivarPoly._raw({e: -c for e, c in self.terms.items()}, self.basis)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        out: dict[tuple[int, int], Number] = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0) + c1 * c2
        return BivarPoly._raw({e: _norm(c) for e, c in out.items() if c}, self.basis)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = BivarPoly.const(1, self.basis)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c: Number) -> "BivarPoly":
        if c == 0:
            return BivarPoly._raw({}, self.basis)
        return BivarPoly._raw({e: _norm(v * c) for e, v in self.terms.items()}, self.basis)

    def shift(self, i: int, j: int) -> "BivarPoly":
        """Multiply by the monomial ``x**i * y**j``."""
        return BivarPoly._raw({(a + i, b + j): c for (a, b), c in self.terms.items()},
                              self.basis)

    def divmod_exact(self, divisor: "BivarPoly") -> "BivarPoly":
        """Exact quotient; raises ``NotDivisible`` when a remainder appears."""
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if divisor.is_const():
            return self.scale(Fraction(1) / Fraction(divisor.const_value()))
        (di, dj), dc = divisor.leading_term()
        dc = Fraction(dc)
        rem = dict(self.terms)
        quot: dict[tuple[int, int], Number] = {}
        dterms = list(divisor.terms.items())
        while rem:
            (ri, rj) = max(rem, key=_grlex_key)
            rc = rem[(ri, rj)]
            if ri < di or rj < dj:
                raise NotDivisible("polynomial is not divisible")
            qi, qj = ri - di, rj - dj
            q = _norm(rc / dc)
            quot[(qi, qj)] = q
            for (a, b), c in dterms:
                key = (a + qi, b + qj)
                v = rem.get(key, 0) - q * c
                if v:
                    rem[key] = _norm(v)
                else:
                    rem.pop(key, None)
        return BivarPoly._raw(quot, self.basis)

    def divides(self, other: "BivarPoly") -> bool:
        try:
            other.divmod_exact(self)
        except NotDivisible:
            return False
        return True

    # -- calculus, substitution -------------------------------------------

    def diff(self, k: int) -> "BivarPoly":
        out = {}
        for (i, j), c in self.terms.items():
            if k == 0 and i:
                out[(i - 1, j)] = c * i
            elif k == 1 and j:
                out[(i, j - 1)] = c * j
        return BivarPoly._raw(out, self.basis)

    def swap(self) -> "BivarPoly":
        return BivarPoly._raw({(j, i): c for (i, j), c in self.terms.items()}, self.basis)

    def __call__(self, x: Number, y: Number) -> Number:
        if not self.terms:
            return 0
        mi = max(e[0] for e in self.terms)
        mj = max(e[1] for e in self.terms)
        xp = [1] * (mi + 1)
        yp = [1] * (mj + 1)
        for k in range(1, mi + 1):
            xp[k] = xp[k - 1] * x
        for k in range(1, mj + 1):
            yp[k] = yp[k - 1] * y
        acc: Number = 0
        for (i, j), c in self.terms.items():
            acc += c * xp[i] * yp[j]
        return _norm(acc) if isinstance(acc, Fraction) else acc

    def dehomogenize(self, k: int = 1) -> UnivarPoly:
        """Set variable ``k`` to one; the result is univariate in the other."""
        other = 1 - k
        n = max((e[other] for e in self.terms), default=-1)
        coeffs: list = [0] * (n + 1)
        for e, c in self.terms.items():
            coeffs[e[other]] += c
        return UnivarPoly(coeffs)

    def restrict_diagonal(self) -> UnivarPoly:
        """``p(t, t)`` as a polynomial in t."""
        n = self.degree
        coeffs: list = [0] * (n + 1)
        for (i, j), c in self.terms.items():
            coeffs[i + j] += c
        return UnivarPoly(coeffs)

    # -- content ----------------------------------------------------------

    def integer_scale(self) -> Fraction:
        """Positive rational s with ``s * self`` integral and primitive."""
        if not self.terms:
            return Fraction(1)
        den = reduce(lcm, (Fraction(c).denominator for c in self.terms.values()), 1)
        num = reduce(gcd, (int(c * den) for c in self.terms.values()), 0)
        return Fraction(den, num)

    def primitive(self) -> "BivarPoly":
        """Integral primitive multiple with positive leading coefficient."""
        if not self.terms:
            return self
        s = self.integer_scale()
        if self.lc < 0:
            s = -s
        return self.scale(s)


# -- gcd -------------------------------------------------------------------

_WEIGHTS = ((1, 1), (1, 2), (2, 1))


def _strip_monomial(p: BivarPoly) -> tuple[BivarPoly, tuple[int, int]]:
    a, b = p.min_exponents()
    if a == 0 and b == 0:
        return p, (0, 0)
    return BivarPoly._raw({(i - a, j - b): c for (i, j), c in p.terms.items()}, p.basis), (a, b)


def _graded_gcd(p: BivarPoly, q: BivarPoly, w: tuple[int, int]) -> BivarPoly:
    """gcd of two polynomials homogeneous for the positive weights ``w``.

    Every factor of a weighted-homogeneous polynomial is weighted homogeneous,
    so after removing monomial factors the gcd is recovered from the
    univariate gcd of the dehomogenized polynomials.  The variable of weight
    one is set to one.
    """
    basis = p.basis
    p, (pa, pb) = _strip_monomial(p)
    q, (qa, qb) = _strip_monomial(q)
    mono = (min(pa, qa), min(pb, qb))
    wx, wy = w
    if wy == 1:
        # univariate in x, weight wx
        g = poly_gcd(p.dehomogenize(1), q.dehomogenize(1))
        total = wx * g.degree
        terms = {(k, total - wx * k): c for k, c in enumerate(g.coeffs) if c}
    else:
        # wx == 1: univariate in y, weight wy
        g = poly_gcd(p.dehomogenize(0), q.dehomogenize(0))
        total = wy * g.degree
        terms = {(total - wy * k, k): c for k, c in enumerate(g.coeffs) if c}
    return BivarPoly._raw(terms, basis).shift(*mono)


# Dense Z[y] helpers for the general recursive gcd (lists, low degree first).

def _zy_mul(a: list[int], b: list[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _zy_sub(a: list[int], b: list[int]) -> list[int]:
    n = max(len(a), len(b))
    out = [(a[k] if k < len(a) else 0) - (b[k] if k < len(b) else 0) for k in range(n)]
    while out and out[-1] == 0:
        out.pop()
    return out


def _zy_exact_div(a: list[int], b: list[int]) -> list[int]:
    q, r = divmod(UnivarPoly(a), UnivarPoly(b))
    if not r.is_zero() or any(isinstance(c, Fraction) for c in q.coeffs):
        raise NotDivisible("Z[y] division is not exact")
    return list(q.coeffs)


def _to_zyx(p: BivarPoly) -> list[list[int]]:
    """Integer polynomial as a list over x-degree of Z[y] coefficient lists."""
    nx = p.degree_in(0)
    ny = p.degree_in(1)
    rows = [[0] * (ny + 1) for _ in range(nx + 1)]
    for (i, j), c in p.terms.items():
        rows[i][j] = int(c)
    for row in rows:
        while row and row[-1] == 0:
            row.pop()
    return rows


def _zyx_content(rows: list[list[int]]) -> list[int]:
    """Content in Z[y] of a polynomial over Z[y]: gcd of its nonzero rows."""
    g: list[int] = []
    for row in rows:
        if row:
            g = int_gcd(g, row)
            if g == [1]:
                break
    ints = reduce(gcd, (c for row in rows for c in row), 0)
    return [c * ints for c in g]


def _general_gcd(p: BivarPoly, q: BivarPoly) -> BivarPoly:
    """Recursive primitive-PRS gcd in Z[y][x]."""
    basis = p.basis
    a = _to_zyx(p.primitive())
    b = _to_zyx(q.primitive())
    ca = _zyx_content(a)
    cb = _zyx_content(b)
    cont = int_gcd(ca, cb)
    a = [_zy_exact_div(row, ca) if row else [] for row in a]
    b = [_zy_exact_div(row, cb) if row else [] for row in b]
    if len(a) < len(b):
        a, b = b, a
    result = [[1]]
    while True:
        if len(b) == 1:
            break                       # primitive parts coprime in x
        lcb = b[-1]
        db = len(b) - 1
        r = [list(row) for row in a]
        while r and len(r) - 1 >= db:
            c = r[-1]
            shift = len(r) - 1 - db
            r = [_zy_mul(lcb, row) for row in r]
            for j, bj in enumerate(b):
                r[shift + j] = _zy_sub(r[shift + j], _zy_mul(c, bj))
            while r and not r[-1]:
                r.pop()
        if not r:
            result = b
            break
        cr = _zyx_content(r)
        r = [_zy_exact_div(row, cr) if row else [] for row in r]
        a, b = b, r
    terms = {}
    for i, row in enumerate(result):
        for j, c in enumerate(row):
            if c:
                terms[(i, j)] = c
    g = BivarPoly._raw(terms, basis)
    return g * BivarPoly._raw({(0, j): c for j, c in enumerate(cont) if c}, basis)


def poly_gcd2(p: BivarPoly, q: BivarPoly) -> BivarPoly:
    """Greatest common divisor, primitive with positive leading coefficient."""
    p._check(q)
    if p.is_zero():
        return q.primitive() if not q.is_zero() else q
    if q.is_zero():
        return p.primitive()
    if p.is_const() or q.is_const():
        return BivarPoly.const(1, p.basis)
    if len(p.terms) == 1 or len(q.terms) == 1:
        mono_p, mono_q = p.min_exponents(), q.min_exponents()
        return BivarPoly.monomial(min(mono_p[0], mono_q[0]), min(mono_p[1], mono_q[1]),
                                  basis=p.basis)
    for w in _WEIGHTS:
        if len(p.weighted_degrees(*w)) <= 1 and len(q.weighted_degrees(*w)) <= 1:
            return _graded_gcd(p, q, w).primitive()
    if p.degree_in(0) == 0 and q.degree_in(0) == 0:
        g = poly_gcd(p.dehomogenize(0), q.dehomogenize(0))
        return BivarPoly._raw({(0, k): c for k, c in enumerate(g.coeffs) if c}, p.basis)
    if p.degree_in(1) == 0 and q.degree_in(1) == 0:
        g = poly_gcd(p.dehomogenize(1), q.dehomogenize(1))
        return BivarPoly._raw({(k, 0): c for k, c in enumerate(g.coeffs) if c}, p.basis)
    p, (pa, pb) = _strip_monomial(p)
    q, (qa, qb) = _strip_monomial(q)
    g = _general_gcd(p, q)
    return g.shift(min(pa, qa), min(pb, qb)).primitive()


# -- rational functions ----------------------------------------------------


def _normalize_pair(num: BivarPoly, den: BivarPoly) -> tuple[BivarPoly, BivarPoly]:
    """Scale so all coefficients are coprime integers and lc(den) > 0."""
    if num.is_zero():
        return num, BivarPoly.const(1, num.basis)
    coeffs = list(num.terms.values()) + list(den.terms.values())
    d = reduce(lcm, (Fraction(c).denominator for c in coeffs), 1)
    n = reduce(gcd, (int(c * d) for c in coeffs), 0)
    s = Fraction(d, n)
    if den.lc < 0:
        s = -s
    if s == 1:
        return num, den
    return num.scale(s), den.scale(s)


class RationalFn:
    """Reduced quotient ``num / den`` of two polynomials in the same basis."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: BivarPoly | Number, den: BivarPoly | Number = 1,
                 basis: Optional[Basis] = None):
        if isinstance(num, BivarPoly):
            basis = num.basis
        elif isinstance(den, BivarPoly):
            basis = den.basis
        basis = basis or Basis.LAMBDA
        if not isinstance(num, BivarPoly):
            num = BivarPoly.const(num, basis)
        if not isinstance(den, BivarPoly):
            den = BivarPoly.const(den, basis)
        num._check(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = BivarPoly.const(1, basis)
        else:
            g = poly_gcd2(num, den)
            if not g.is_const():
                num = num.divmod_exact(g)
                den = den.divmod_exact(g)
        self.num, self.den = _normalize_pair(num, den)
        self._hash = None

    @classmethod
    def _reduced(cls, num: BivarPoly, den: BivarPoly) -> "RationalFn":
        obj = cls.__new__(cls)
        obj.num, obj.den = _normalize_pair(num, den)
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c: Number, basis: Basis = Basis.LAMBDA) -> "RationalFn":
        return cls._reduced(BivarPoly.const(c, basis), BivarPoly.const(1, basis))

    @classmethod
    def var(cls, k: int, basis: Basis = Basis.LAMBDA) -> "RationalFn":
        return cls._reduced(BivarPoly.var(k, basis), BivarPoly.const(1, basis))

    @classmethod
    def from_poly(cls, p: BivarPoly) -> "RationalFn":
        return cls._reduced(p, BivarPoly.const(1, p.basis))

    @property
    def basis(self) -> Basis:
        return self.num.basis

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def is_polynomial(self) -> bool:
        return self.den.is_const()

    def __eq__(self, other):
        if isinstance(other, RationalFn):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self == RationalFn.const(other, self.basis)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self):
        from .exprio import format_expr
        return f"RationalFn({format_expr(self)!r}, {self.basis.value})"

    def __str__(self):
        from .exprio import format_expr
        return format_expr(self)

    # -- ring operations (Henrici-style, gcds on the smallest pieces) ------

    def _coerce(self, other) -> "RationalFn":
        if isinstance(other, RationalFn):
            if other.basis is not self.basis:
                raise BasisMismatch(f"{self.basis.value} vs {other.basis.value}")
            return other
        if isinstance(other, (int, Fraction)):
            return RationalFn.const(other, self.basis)
        if isinstance(other, BivarPoly):
            return RationalFn.from_poly(other)
        raise TypeError(f"cannot combine RationalFn with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        a, b, c, d = self.num, self.den, other.num, other.den
        if b == d:
            t = a + c
            g = poly_gcd2(t, b)
            if g.is_const():
                return RationalFn._reduced(t, b)
            return RationalFn._reduced(t.divmod_exact(g), b.divmod_exact(g))
        g = poly_gcd2(b, d)
        if g.is_const():
            return RationalFn._reduced(a * d + c * b, b * d)
        b1 = b.divmod_exact(g)
        d1 = d.divmod_exact(g)
        t = a * d1 + c * b1
        g2 = poly_gcd2(t, g)
        if g2.is_const():
            return RationalFn._reduced(t, b1 * d)
        return RationalFn._reduced(t.divmod_exact(g2), b1 * d.divmod_exact(g2))

    __radd__ = __add__

    def __neg__(self):
        return RationalFn._reduced(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return RationalFn.const(0, self.basis)
            return RationalFn._reduced(self.num.scale(other), self.den)
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return RationalFn.const(0, self.basis)
        a, b, c, d = self.num, self.den, other.num, other.den
        g1 = poly_gcd2(a, d)
        g2 = poly_gcd2(c, b)
        if not g1.is_const():
            a, d = a.divmod_exact(g1), d.divmod_exact(g1)
        if not g2.is_const():
            c, b = c.divmod_exact(g2), b.divmod_exact(g2)
        return RationalFn._reduced(a * c, b * d)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFn":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RationalFn._reduced(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFn._reduced(self.num ** n, self.den ** n)

    def exact_div_poly(self, p: BivarPoly) -> "RationalFn":
        """Divide by the polynomial p, requiring p to divide the numerator."""
        return RationalFn._reduced(self.num.divmod_exact(p), self.den)

    # -- evaluation and calculus -----------------------------------------

    def __call__(self, x: Number, y: Number) -> Fraction:
        d = self.den(x, y)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return Fraction(self.num(x, y)) / d

    def diff(self, k: int) -> "RationalFn":
        """Partial derivative in variable k (0 or 1) by the quotient rule."""
        n, d = self.num, self.den
        dn = n.diff(k)
        if d.is_const():
            return RationalFn._reduced(dn, d)
        dd = d.diff(k)
        # d/dk (n/d) = (dn*d - n*dd)/d^2; cancel gcd(d, dd) first
        g = poly_gcd2(d, dd)
        if g.is_const():
            return RationalFn(dn * d - n * dd, d * d)
        d1 = d.divmod_exact(g)
        dd1 = dd.divmod_exact(g)
        return RationalFn(dn * d1 - n * dd1, d1 * d)

    def swap(self) -> "RationalFn":
        return RationalFn._reduced(self.num.swap(), self.den.swap())

    def is_symmetric(self) -> bool:
        return self.swap() == self

    def is_homogeneous(self) -> bool:
        return self.num.is_homogeneous() and self.den.is_homogeneous()

    @property
    def homogeneous_degree(self) -> Optional[int]:
        if self.is_zero():
            return None
        if not self.is_homogeneous():
            return None
        return self.num.degree - self.den.degree


def lam(k: int) -> RationalFn:
    """The principal curvature l1 (k=0) or l2 (k=1) as a rational function."""
    return RationalFn.var(k, Basis.LAMBDA)


def partial_derivative(f: RationalFn, var: int) -> RationalFn:
    return f.diff(var)


@dataclass(frozen=True)
class Shape:
    symmetric: bool
    homogeneous: bool
    degree: Optional[int]


def symmetry_and_homogeneity(f: RationalFn) -> Shape:
    if f.basis is not Basis.LAMBDA:
        raise BasisMismatch("symmetry is defined in the lambda basis")
    hom = f.is_homogeneous()
    return Shape(f.is_symmetric(), hom, f.homogeneous_degree if hom else None)


# -- basis change ----------------------------------------------------------

_L = Basis.LAMBDA


def _e1() -> BivarPoly:
    return BivarPoly({(1, 0): 1, (0, 1): 1}, _L)


def _e2() -> BivarPoly:
    return BivarPoly({(1, 1): 1}, _L)


class _PowerCache:
    def __init__(self, base: BivarPoly):
        self.pows = [BivarPoly.const(1, base.basis), base]

    def __getitem__(self, n: int) -> BivarPoly:
        while len(self.pows) <= n:
            self.pows.append(self.pows[-1] * self.pows[1])
        return self.pows[n]


_H_L = _PowerCache(_e1())                                            # H in lambda
_K_L = _PowerCache(_e2())                                            # K in lambda
_A_L = _PowerCache(BivarPoly({(2, 0): 1, (0, 2): 1}, _L))           # A in lambda
_H_HA = _PowerCache(BivarPoly({(1, 0): 1}, Basis.HA))
_K_HA = _PowerCache(BivarPoly({(2, 0): Fraction(1, 2), (0, 1): Fraction(-1, 2)}, Basis.HA))


def _sym_poly_to_HA(p: BivarPoly) -> BivarPoly:
    """Rewrite a symmetric polynomial through H and K = (H^2 - A)/2."""
    rest = dict(p.terms)
    out = BivarPoly._raw({}, Basis.HA)
    while rest:
        # lexicographically largest exponent (l1 first); symmetric => i >= j
        (i, j) = max(rest)
        c = rest[(i, j)]
        if i < j:
            raise ValueError("input is not symmetric")
        sub = (_H_L[i - j] * _K_L[j]).scale(c)
        for e, v in sub.terms.items():
            nv = rest.get(e, 0) - v
            if nv:
                rest[e] = _norm(nv)
            else:
                rest.pop(e, None)
        out = out + (_H_HA[i - j] * _K_HA[j]).scale(c)
    return out


def to_HA(f: RationalFn) -> RationalFn:
    """Express a symmetric lambda-basis rational function through H and A."""
    if f.basis is not Basis.LAMBDA:
        raise BasisMismatch("to_HA expects the lambda basis")
    if not f.is_symmetric():
        raise ValueError("to_HA requires a symmetric rational function")
    return RationalFn(_sym_poly_to_HA(f.num), _sym_poly_to_HA(f.den))


def _poly_from_HA(p: BivarPoly) -> BivarPoly:
    out: dict = {}
    for (i, j), c in p.terms.items():
        for e, v in (_H_L[i] * _A_L[j]).terms.items():
            out[e] = out.get(e, 0) + c * v
    return BivarPoly._raw({e: _norm(v) for e, v in out.items() if v}, _L)


def from_HA(f: RationalFn) -> RationalFn:
    """Substitute H = l1 + l2 and A = l1^2 + l2^2."""
    if f.basis is not Basis.HA:
        raise BasisMismatch("from_HA expects the HA basis")
    return RationalFn(_poly_from_HA(f.num), _poly_from_HA(f.den))


def ensure_HA(f: RationalFn) -> RationalFn:
    return f if f.basis is Basis.HA else to_HA(f)


def ensure_lambda(f: RationalFn) -> RationalFn:
    return f if f.basis is Basis.LAMBDA else from_HA(f)


def difference_quotient(F: RationalFn) -> RationalFn:
    """``(dF/dl1 - dF/dl2) / (l1 - l2)`` by exact division.

    Symmetry of F makes the numerator antisymmetric, hence divisible by
    ``l1 - l2``; a failed division means F was not symmetric.
    """
    if F.basis is not Basis.LAMBDA:
        raise BasisMismatch("difference_quotient expects the lambda basis")
    diff = F.diff(0) - F.diff(1)
    if diff.is_zero():
        return diff
    try:
        return diff.exact_div_poly(BivarPoly({(1, 0): 1, (0, 1): -1}, _L))
    except NotDivisible as exc:
        raise NotDivisible("difference quotient failed: velocity is not symmetric") from exc
