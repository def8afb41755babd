"""Exact sign analysis on the open positive quadrant.

A homogeneous rational function ``f(l1, l2)`` has the sign of
``f(l1/l2, 1)`` for positive arguments, so everything reduces to sign
questions for univariate polynomials on ``(0, inf)``.  Those are settled by
Descartes' rule when it is conclusive and by Sturm sequences otherwise.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .exactpoly import Basis, RationalFn
from .univar import (UnivarPoly, int_prem, int_primitive, poly_gcd,
                     squarefree_decomposition)

__all__ = [
    "UnivarPoly", "SturmChain", "Verdict", "AxisSign", "SignCertificate",
    "PrefilterResult", "NotSquarefree", "sturm_chain", "sturm_count",
    "descartes_bound", "isolate_positive_roots", "sign_on_positive_axis",
    "strict_sign_on", "quadrant_sign", "randomized_prefilter",
]

INF = math.inf


class NotSquarefree(ValueError):
    pass


class Verdict(str, enum.Enum):
    NONNEGATIVE = "NonnegativeOnQuadrant"
    NONPOSITIVE = "NonpositiveOnQuadrant"
    ZERO = "ZeroIdentically"
    INDEFINITE = "Indefinite"

    def satisfies(self, target: str) -> bool:
        """Whether the verdict proves ``f <= 0`` (target 'nonpositive') or ``f >= 0``."""
        if self is Verdict.ZERO:
            return True
        if target == "nonpositive":
            return self is Verdict.NONPOSITIVE
        return self is Verdict.NONNEGATIVE


# -- integer-coefficient helpers --------------------------------------------


def _ints(p: UnivarPoly) -> list[int]:
    return int_primitive(p.integer_coeffs())


def _sign_at(coeffs: Sequence[int], x: Fraction) -> int:
    """Sign of the integer polynomial at x, computed without fractions.

    With ``x = n/d`` and ``d > 0`` this is the sign of
    ``sum c_k n^k d^(deg-k)``.
    """
    n, d = x.numerator, x.denominator
    acc = 0
    if d == 1:
        for c in reversed(coeffs):
            acc = acc * n + c
    else:
        dk = 1
        for c in reversed(coeffs):
            acc = acc * n + c * dk
            dk *= d
    return (acc > 0) - (acc < 0)


def _sign_at_inf(coeffs: Sequence[int]) -> int:
    return (coeffs[-1] > 0) - (coeffs[-1] < 0)


def _sign_changes(signs) -> int:
    prev = 0
    count = 0
    for s in signs:
        if s == 0:
            continue
        if prev and s != prev:
            count += 1
        prev = s
    return count


def descartes_bound(p: UnivarPoly) -> int:
    """Sign changes in the coefficient sequence: an upper bound on positive roots."""
    return _sign_changes((c > 0) - (c < 0) for c in p.coeffs)


# -- Sturm sequences --------------------------------------------------------


@dataclass(frozen=True)
class SturmChain:
    chain: tuple[UnivarPoly, ...]
    _ints: tuple[tuple[int, ...], ...] = field(repr=False, compare=False, default=())

    def variations(self, x) -> int:
        if x == INF:
            return _sign_changes(_sign_at_inf(c) for c in self._ints)
        x = Fraction(x)
        return _sign_changes(_sign_at(c, x) for c in self._ints)

    def count(self, a, b) -> int:
        """Distinct roots in ``(a, b]``."""
        return self.variations(a) - self.variations(b)


def sturm_chain(p: UnivarPoly) -> SturmChain:
    """Sturm sequence built from sign-preserving pseudo-remainders.

    Each member after the second is a positive multiple of the negated
    Euclidean remainder, so sign variations are unaffected by the scaling.
    """
    if p.degree < 1:
        raise ValueError("Sturm chain needs a nonconstant polynomial")
    a = _ints(p)
    b = int_primitive(_ints(p.derivative()))
    chain = [a, b]
    while len(chain[-1]) > 1:
        r = int_prem(chain[-2], chain[-1])
        if not r:
            break
        chain.append(int_primitive([-c for c in r]))
    return SturmChain(tuple(UnivarPoly(c) for c in chain), tuple(tuple(c) for c in chain))


def _check_squarefree(p: UnivarPoly):
    if poly_gcd(p, p.derivative()).degree > 0:
        raise NotSquarefree("polynomial has a repeated factor")


def sturm_count(p: UnivarPoly, a=0, b=INF, check: bool = True) -> int:
    """Number of distinct real roots of the squarefree p in ``(a, b]``.

    ``b`` may be ``math.inf``; ``a`` must be finite.
    """
    if p.is_zero():
        raise ValueError("zero polynomial has infinitely many roots")
    if p.degree < 1:
        return 0
    if check:
        _check_squarefree(p)
    if not (a < b):
        raise ValueError("need a < b")
    return sturm_chain(p).count(a, b)


def _cauchy_bound(coeffs: Sequence[int]) -> Fraction:
    lc = abs(coeffs[-1])
    return 1 + Fraction(max(abs(c) for c in coeffs[:-1]), lc) if len(coeffs) > 1 else Fraction(1)


def isolate_positive_roots(p: UnivarPoly) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals ``(lo, hi]``, one per distinct positive root, sorted.

    Endpoints are positive rationals at which p does not vanish.
    """
    if p.is_zero():
        raise ValueError("zero polynomial")
    coeffs = list(p.integer_coeffs())
    while coeffs and coeffs[0] == 0:      # roots at 0 are not positive
        coeffs.pop(0)
    q = UnivarPoly(coeffs)
    if q.degree < 1:
        return []
    g = poly_gcd(q, q.derivative())
    if g.degree > 0:
        q = (q // g)
    q = q.primitive()
    if descartes_bound(q) == 0:
        return []
    ch = sturm_chain(q)
    ints = ch._ints[0]
    top = _cauchy_bound(list(ints))
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(Fraction(0), top, ch.count(0, top))]
    while stack:
        lo, hi, n = stack.pop()
        if n == 0:
            continue
        if n == 1 and lo > 0:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        k = 1
        while _sign_at(ints, mid) == 0:
            mid = lo + (hi - lo) * Fraction(k, k + 2 ** k)
            k += 1
        left = ch.count(lo, mid)
        stack.append((mid, hi, n - left))
        stack.append((lo, mid, left))
    out.sort()
    return out


# -- one-variable verdicts ---------------------------------------------------


@dataclass(frozen=True)
class AxisSign:
    """Sign of a univariate polynomial on ``(0, inf)``."""

    verdict: Verdict
    witness_pos: Optional[Fraction] = None
    witness_neg: Optional[Fraction] = None
    roots: int = 0               # distinct positive roots
    method: str = "sturm"


def sign_on_positive_axis(p: UnivarPoly) -> AxisSign:
    if p.is_zero():
        return AxisSign(Verdict.ZERO, method="trivial")
    s = [(c > 0) - (c < 0) for c in p.coeffs]
    if _sign_changes(s) == 0:
        # every coefficient shares one sign: strict sign on (0, inf)
        sign = next(x for x in s if x)
        one = Fraction(1)
        if sign > 0:
            return AxisSign(Verdict.NONNEGATIVE, witness_pos=one, method="descartes")
        return AxisSign(Verdict.NONPOSITIVE, witness_neg=one, method="descartes")
    _, factors = squarefree_decomposition(p)
    sqf = UnivarPoly([1])
    for f, _m in factors:
        sqf = sqf * f
    intervals = isolate_positive_roots(sqf)
    samples = [Fraction(1)] if not intervals else [intervals[0][0]] + [hi for _, hi in intervals]
    pos = neg = None
    for x in samples:
        v = p(x)
        if v > 0 and pos is None:
            pos = x
        elif v < 0 and neg is None:
            neg = x
    if pos is not None and neg is not None:
        verdict = Verdict.INDEFINITE
    elif pos is not None:
        verdict = Verdict.NONNEGATIVE
    else:
        verdict = Verdict.NONPOSITIVE
    return AxisSign(verdict, pos, neg, roots=len(intervals))


def strict_sign_on(p: UnivarPoly, where: str) -> int:
    """+1 or -1 if p is strictly one-signed on the open interval, else 0.

    ``where`` is ``"below_one"`` for ``(0, 1)`` or ``"above_one"`` for
    ``(1, inf)``.  Both are mapped onto ``(0, inf)``: ``x = t/(1+t)`` and
    ``x = 1 + t`` respectively; the mapped polynomials keep the sign.
    """
    if p.is_zero():
        return 0
    if where == "below_one":
        q = p.mobius(1, 0, 1, 1)
    elif where == "above_one":
        q = p.compose(UnivarPoly([1, 1]))
    else:
        raise ValueError(where)
    cert = sign_on_positive_axis(q)
    if cert.verdict is Verdict.ZERO or cert.verdict is Verdict.INDEFINITE or cert.roots:
        return 0
    return 1 if cert.verdict is Verdict.NONNEGATIVE else -1


# -- quadrant verdicts --------------------------------------------------------


Point = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class SignCertificate:
    verdict: Verdict
    witness_pos: Optional[Point] = None
    witness_neg: Optional[Point] = None
    method: str = "sturm"
    regular: bool = True         # denominator has no zero in the open quadrant

    @property
    def witness(self) -> Optional[Point]:
        """The violating point for the verdict's natural targets, if any."""
        return self.witness_pos or self.witness_neg

    def witness_for(self, target: str) -> Optional[Point]:
        return self.witness_pos if target == "nonpositive" else self.witness_neg


def _pt(x: Optional[Fraction]) -> Optional[Point]:
    return None if x is None else (x, Fraction(1))


def quadrant_sign(f: RationalFn) -> SignCertificate:
    """Certified sign of a homogeneous f on ``{l1 > 0, l2 > 0}``."""
    if f.basis is not Basis.LAMBDA:
        raise ValueError("quadrant_sign expects the lambda basis")
    if not f.is_homogeneous():
        raise ValueError("quadrant_sign requires a homogeneous rational function")
    if f.is_zero():
        return SignCertificate(Verdict.ZERO, method="trivial")
    n = f.num.dehomogenize(1)
    d = f.den.dehomogenize(1)
    den_cert = sign_on_positive_axis(d)
    regular = den_cert.roots == 0
    # sign(n*d) = sign(n/d) wherever d != 0
    cert = sign_on_positive_axis(n * d)
    if cert.verdict is Verdict.ZERO:     # impossible for f != 0, kept for safety
        return SignCertificate(Verdict.ZERO, method=cert.method, regular=regular)
    return SignCertificate(cert.verdict, _pt(cert.witness_pos), _pt(cert.witness_neg),
                           method="sturm", regular=regular)


# -- randomized testing ---------------------------------------------------------


@dataclass(frozen=True)
class PrefilterResult:
    plausible: bool
    witness: Optional[Point] = None
    samples: int = 0


def random_point(rng: random.Random, box: int = 10, denom: int = 1000) -> Point:
    return (Fraction(rng.randint(1, box * denom), denom),
            Fraction(rng.randint(1, box * denom), denom))


def randomized_prefilter(f: Union[RationalFn, "callable"], n_samples: int, seed=0,
                         box: int = 10, target: str = "nonpositive",
                         rng: Optional[random.Random] = None,
                         max_retries: int = 100) -> PrefilterResult:
    """Evaluate f at seeded random rational points in ``(0, box]^2``.

    Returns the first point violating ``f <= 0`` (or ``f >= 0`` for
    ``target="nonnegative"``).  ``f`` may be any callable of two Fractions
    that raises ``ZeroDivisionError`` at poles.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    rng = rng or random.Random(seed)
    bad = 1 if target == "nonpositive" else -1
    for k in range(n_samples):
        for _ in range(max_retries):
            pt = random_point(rng, box)
            try:
                v = f(*pt)
            except ZeroDivisionError:
                continue
            break
        else:
            raise ArithmeticError("denominator vanished at every resampled point")
        if (v > 0) - (v < 0) == bad:
            return PrefilterResult(False, pt, k + 1)
    return PrefilterResult(True, None, n_samples)
