"""Dense univariate polynomials over Q.

Coefficients are stored lowest degree first as ``int`` where possible and
``Fraction`` otherwise.  The integer routines (pseudo-remainders, primitive
parts) keep coefficient growth in check for gcd and Sturm computations.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Optional, Sequence, Union

Number = Union[int, Fraction]


def _norm(c: Number) -> Number:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _strip(coeffs: list) -> list:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _sign(c: Number) -> int:
    return (c > 0) - (c < 0)


class UnivarPoly:
    """Immutable dense polynomial ``sum(c[k] * x**k)``."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable[Number] = ()):
        self.coeffs = tuple(_strip([_norm(Fraction(c)) if not isinstance(c, int) else c
                                    for c in coeffs]))
        self._hash = None

    @classmethod
    def _raw(cls, coeffs: list) -> "UnivarPoly":
        obj = cls.__new__(cls)
        obj.coeffs = tuple(_strip(coeffs))
        obj._hash = None
        return obj

    @classmethod
    def x(cls) -> "UnivarPoly":
        return cls._raw([0, 1])

    @classmethod
    def const(cls, c: Number) -> "UnivarPoly":
        return cls([c])

    # -- basic properties -------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Number:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_const(self) -> bool:
        return len(self.coeffs) <= 1

    def __eq__(self, other):
        if isinstance(other, UnivarPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == UnivarPoly.const(other).coeffs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __repr__(self):
        return f"UnivarPoly({list(self.coeffs)!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = str(abs(c)) + ("*" + mono if mono else "")
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        head_sign, head = parts[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = _lift(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = _norm(out[k] + c)
        return UnivarPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return UnivarPoly._raw([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UnivarPoly._raw([])
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return UnivarPoly._raw([_norm(c) for c in out])

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = UnivarPoly._raw([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c: Number) -> "UnivarPoly":
        return UnivarPoly._raw([_norm(c * a) for a in self.coeffs])

    def __divmod__(self, other):
        """Euclidean division over Q."""
        other = _lift(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = [Fraction(c) for c in self.coeffs]
        dlen = len(other.coeffs)
        lc = Fraction(other.lc)
        if len(rem) < dlen:
            return UnivarPoly._raw([]), self
        quot = [Fraction(0)] * (len(rem) - dlen + 1)
        for k in range(len(rem) - dlen, -1, -1):
            q = rem[k + dlen - 1] / lc
            quot[k] = q
            if q:
                for j, c in enumerate(other.coeffs):
                    rem[k + j] -= q * c
        return (UnivarPoly._raw([_norm(c) for c in quot]),
                UnivarPoly._raw([_norm(c) for c in rem[:dlen - 1]]))

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> "UnivarPoly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("polynomial is not divisible")
        return q

    # -- calculus and evaluation -----------------------------------------

    def derivative(self) -> "UnivarPoly":
        return UnivarPoly._raw([k * c for k, c in enumerate(self.coeffs)][1:])

    def __call__(self, x: Number) -> Number:
        acc: Number = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return _norm(acc) if isinstance(acc, Fraction) else acc

    def sign_at(self, x: Number) -> int:
        return _sign(self(x))

    def sign_at_inf(self) -> int:
        return _sign(self.lc)

    def compose(self, other: "UnivarPoly") -> "UnivarPoly":
        acc = UnivarPoly._raw([])
        for c in reversed(self.coeffs):
            acc = acc * other + c
        return acc

    def mobius(self, a: Number, b: Number, c: Number, d: Number) -> "UnivarPoly":
        """Return ``(c*t + d)**deg * p((a*t + b)/(c*t + d))`` as a polynomial in t.

        For a positive denominator on the range of interest the result has
        the same sign as ``p`` at the corresponding point.
        """
        n = self.degree
        if n < 0:
            return self
        num = UnivarPoly([b, a])
        den = UnivarPoly([d, c])
        acc = UnivarPoly._raw([])
        num_pows = [UnivarPoly._raw([1])]
        for _ in range(n):
            num_pows.append(num_pows[-1] * num)
        den_pow = UnivarPoly._raw([1])
        for k in range(n, -1, -1):
            # term c_k * num^k * den^(n-k)
            if self.coeffs[k] != 0:
                acc = acc + (num_pows[k] * den_pow).scale(self.coeffs[k])
            den_pow = den_pow * den
        return acc

    # -- integer normalizations -------------------------------------------

    def integer_coeffs(self) -> list[int]:
        """Scale by a positive rational to integer coefficients (content kept)."""
        den = reduce(lcm, (Fraction(c).denominator for c in self.coeffs), 1)
        return [int(c * den) for c in self.coeffs]

    def primitive(self) -> "UnivarPoly":
        """Positive-scalar multiple with coprime integer coefficients.

        The sign of the polynomial is preserved.
        """
        if not self.coeffs:
            return self
        ints = self.integer_coeffs()
        g = reduce(gcd, ints, 0)
        return UnivarPoly._raw([c // g for c in ints])

    def monic(self) -> "UnivarPoly":
        lc = Fraction(self.lc)
        return UnivarPoly._raw([_norm(c / lc) for c in self.coeffs])


def _lift(x) -> UnivarPoly:
    if isinstance(x, UnivarPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return UnivarPoly.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a polynomial")


# -- integer polynomial kernels (lists of ints, lowest degree first) -------


def int_prem(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Remainder of ``|lc(b)|**k * a`` by ``b`` for the smallest workable k.

    Only positive multipliers are used, so the result has the sign structure
    of the true Euclidean remainder.
    """
    r = list(a)
    db = len(b) - 1
    lcb = b[-1]
    s = 1 if lcb > 0 else -1
    alc = abs(lcb)
    while len(r) - 1 >= db and r:
        c = r[-1]
        shift = len(r) - 1 - db
        r = [alc * x for x in r]
        cs = s * c
        for j, bj in enumerate(b):
            r[shift + j] -= cs * bj
        _strip(r)
    return r


def int_primitive(a: list[int]) -> list[int]:
    g = reduce(gcd, a, 0)
    if g > 1:
        return [x // g for x in a]
    return a


def _eval_int(a: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _xi_adic(h: int, xi: int) -> list[int]:
    """Digits of h in base xi with symmetric remainders, lowest first."""
    out = []
    half = xi // 2
    while h:
        r = h % xi
        if r > half:
            r -= xi
        out.append(r)
        h = (h - r) // xi
    return out


def _int_divides(d: list[int], a: list[int]) -> bool:
    """Whether the integer polynomial d divides a over Z."""
    r = list(a)
    ld = d[-1]
    n = len(d)
    while len(r) >= n:
        q, m = divmod(r[-1], ld)
        if m:
            return False
        shift = len(r) - n
        for j, c in enumerate(d):
            r[shift + j] -= q * c
        _strip(r)
    return not r


def _heu_gcd(a: list[int], b: list[int]) -> Optional[list[int]]:
    """Heuristic gcd by evaluation at a large integer; None when inconclusive.

    A candidate is only returned after it has been checked to divide both
    inputs, and the inputs are primitive, so any returned value is exact.
    """
    xi = 2 * min(max(map(abs, a)), max(map(abs, b))) + 29
    for _ in range(6):
        h = gcd(_eval_int(a, xi), _eval_int(b, xi))
        if h:
            g = _xi_adic(h, xi)
            if g:
                g = _positive_lc(int_primitive(g))
                if _int_divides(g, a) and _int_divides(g, b):
                    return g
        xi = xi * 73794 // 27011 + 1
    return None


def int_gcd(a: list[int], b: list[int]) -> list[int]:
    """Primitive gcd with positive leading coefficient.

    A heuristic evaluation gcd is tried first; the primitive PRS is the
    fallback.
    """
    a = _strip(list(a))
    b = _strip(list(b))
    if not a:
        return _positive_lc(int_primitive(b)) if b else []
    if not b:
        return _positive_lc(int_primitive(a))
    ca = reduce(gcd, a, 0)
    cb = reduce(gcd, b, 0)
    a = [x // ca for x in a]
    b = [x // cb for x in b]
    if len(a) == 1 or len(b) == 1:
        return [1]
    g = _heu_gcd(a, b)
    if g is not None:
        return g
    if len(a) < len(b):
        a, b = b, a
    while b:
        if len(b) == 1:
            return [1]
        r = int_prem(a, b)
        a, b = b, int_primitive(r) if r else r
    return _positive_lc(int_primitive(a))


def _positive_lc(a: list[int]) -> list[int]:
    if a and a[-1] < 0:
        return [-x for x in a]
    return a


def poly_gcd(a: UnivarPoly, b: UnivarPoly) -> UnivarPoly:
    """Greatest common divisor, normalized primitive with positive leading coefficient."""
    if a.is_zero() and b.is_zero():
        return UnivarPoly._raw([])
    return UnivarPoly._raw(int_gcd(a.integer_coeffs() if a.coeffs else [],
                                   b.integer_coeffs() if b.coeffs else []))


def squarefree_part(p: UnivarPoly) -> UnivarPoly:
    if p.degree < 1:
        return UnivarPoly._raw([1]) if not p.is_zero() else p
    g = poly_gcd(p, p.derivative())
    return (p // g).primitive()


def squarefree_decomposition(p: UnivarPoly) -> tuple[Number, list[tuple[UnivarPoly, int]]]:
    """Yun's algorithm: ``p = c * prod(f_i ** m_i)`` with squarefree, coprime f_i.

    The factors are primitive integer polynomials with positive leading
    coefficient; ``c`` is rational.
    """
    if p.is_zero():
        raise ValueError("squarefree decomposition of zero")
    factors: list[tuple[UnivarPoly, int]] = []
    if p.degree == 0:
        return p.lc, factors
    dp = p.derivative()
    a0 = poly_gcd(p, dp)
    b = p // a0
    c = dp // a0
    d = c - b.derivative()
    m = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        if a.degree > 0:
            factors.append((a, m))
        b = b // a
        c = d // a
        d = c - b.derivative()
        m += 1
    prod = UnivarPoly._raw([1])
    for f, mult in factors:
        prod = prod * f ** mult
    const = Fraction(p.lc) / Fraction(prod.lc)
    return _norm(const), factors
