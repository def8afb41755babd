"""Evolution of a curvature quantity at its critical points.

For a surface moving with normal velocity ``F(l1, l2)`` (negative for
expanding flows) and a symmetric quantity ``w(H, A)`` with ``A = |A|^2``,
the parabolic operator applied to w at a critical point splits into

    dw/dt - F^ij w_;ij = C_w + G_w(l1, l2) h_11;1^2 + G_w(l2, l1) h_22;2^2.

The critical-point condition ties the derivative slots together through
``h_22;1 = a1 h_11;1`` with ``a1 = -w_l1 / w_l2``.  Everything here is exact
and symbolic; :class:`PointEvaluator` evaluates the same formulas at one
rational point without building expressions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Optional

from .exactpoly import (Basis, BivarPoly, RationalFn, difference_quotient,
                        ensure_HA, ensure_lambda, from_HA, to_HA)
from .positivity import SignCertificate, Verdict, quadrant_sign


class DegenerateQuantity(ValueError):
    """The quantity does not depend on l2 (so a1 is undefined) or is not symmetric."""


def _lam_const(c) -> RationalFn:
    return RationalFn.const(c, Basis.LAMBDA)


_L1 = RationalFn.var(0)
_L2 = RationalFn.var(1)
_H = _L1 + _L2
_A2 = _L1 * _L1 + _L2 * _L2
_A3 = _L1 ** 3 + _L2 ** 3


@dataclass(frozen=True)
class CriticalRatio:
    a1: RationalFn
    a2: RationalFn


@dataclass(frozen=True)
class BaseTerms:
    C_H: RationalFn
    G_H: RationalFn
    C_A2: RationalFn
    G_A2: RationalFn


@dataclass(frozen=True)
class EvolutionResult:
    Cw: RationalFn
    G1: RationalFn
    G2: RationalFn
    velocity: RationalFn
    quantity: RationalFn          # HA basis

    @property
    def quantity_lambda(self) -> RationalFn:
        return from_HA(self.quantity)


def _check_symmetric(f: RationalFn, what: str):
    if not f.is_symmetric():
        raise DegenerateQuantity(f"{what} is not symmetric in l1, l2")


def compute_a1(w: RationalFn) -> CriticalRatio:
    """``a1 = -(dw/dl1)/(dw/dl2)`` with w pulled back to the lambda basis."""
    wl = ensure_lambda(w)
    _check_symmetric(wl, "quantity")
    w2 = wl.diff(1)
    if w2.is_zero():
        raise DegenerateQuantity("quantity has dw/dl2 identically zero")
    a1 = -(wl.diff(0) / w2)
    return CriticalRatio(a1, a1.swap())


@dataclass(frozen=True)
class _VelocityParts:
    F: RationalFn
    F1: RationalFn
    F2: RationalFn
    F11: RationalFn
    F12: RationalFn
    F22: RationalFn
    DQ: RationalFn


@lru_cache(maxsize=16)
def _velocity_parts(F: RationalFn) -> _VelocityParts:
    F = ensure_lambda(F)
    _check_symmetric(F, "velocity")
    F1 = F.diff(0)
    F2 = F.diff(1)
    return _VelocityParts(F, F1, F2, F1.diff(0), F1.diff(1), F2.diff(1),
                          difference_quotient(F))


def _base(v: _VelocityParts, a1: RationalFn) -> BaseTerms:
    F, F1, F2 = v.F, v.F1, v.F2
    E = F - F1 * _L1 - F2 * _L2
    S = F1 * _L1 ** 2 + F2 * _L2 ** 2
    a1sq = a1 * a1
    hess = v.F11 + 2 * v.F12 * a1 + v.F22 * a1sq
    dq_a = v.DQ * a1sq
    C_H = S * _H + E * _A2
    G_H = hess + 2 * dq_a
    C_A = 2 * S * _A2 + 2 * E * _A3
    G_A = (-2 * (F1 * (1 + a1sq) + 2 * F2 * a1sq)
           + 2 * hess * _L1 + 4 * dq_a * _L2)
    return BaseTerms(C_H, G_H, C_A, G_A)


def base_terms(F: RationalFn, a: CriticalRatio) -> BaseTerms:
    """Evolution coefficients of H and of |A|^2 at a critical point of w."""
    return _base(_velocity_parts(F), a.a1)


def assemble(w: RationalFn, F: RationalFn, a: CriticalRatio, base: BaseTerms) -> EvolutionResult:
    wHA = ensure_HA(w)
    v = _velocity_parts(ensure_lambda(F))
    F, F1 = v.F, v.F1
    wH = wHA.diff(0)
    wA = wHA.diff(1)
    wHH = from_HA(wH.diff(0))
    wHA_ = from_HA(wH.diff(1))
    wAA = from_HA(wA.diff(1))
    wH = from_HA(wH)
    wA = from_HA(wA)
    a1 = a.a1
    one_a = 1 + a1
    mix = _L1 + a1 * _L2
    Cw = wH * base.C_H + wA * base.C_A2
    G1 = (wH * base.G_H + wA * base.G_A2
          - wHH * F1 * one_a * one_a
          - 4 * wAA * F1 * mix * mix
          - 4 * wHA_ * F1 * one_a * mix)
    return EvolutionResult(Cw, G1, G1.swap(), F, wHA)


def evolve(F: RationalFn, w: RationalFn) -> EvolutionResult:
    """Full pipeline: critical ratio, base terms, assembly."""
    a = compute_a1(w)
    return assemble(w, F, a, base_terms(F, a))


@dataclass(frozen=True)
class MonotonicityReport:
    result: EvolutionResult
    verdict: str                               # "MONOTONE" or "NOT-PROVEN"
    certificates: dict[str, SignCertificate]
    witness: Optional[tuple[str, tuple[Fraction, Fraction]]] = None

    @property
    def monotone(self) -> bool:
        return self.verdict == "MONOTONE"


def certify(result: EvolutionResult) -> MonotonicityReport:
    certs = {"C_w": quadrant_sign(result.Cw), "G1": quadrant_sign(result.G1)}
    witness = None
    for name, cert in certs.items():
        if not cert.verdict.satisfies("nonpositive"):
            witness = (name, cert.witness_pos)
            break
    verdict = "MONOTONE" if witness is None else "NOT-PROVEN"
    return MonotonicityReport(result, verdict, certs, witness)


def verify_monotone(F: RationalFn, w: RationalFn) -> MonotonicityReport:
    """Check ``C_w <= 0`` and ``G1 <= 0`` on the open positive quadrant."""
    return certify(evolve(F, w))


# -- pointwise evaluation ------------------------------------------------------


class _Jet:
    """Value and partial derivatives up to order two of a rational function."""

    def __init__(self, f: RationalFn, order: int = 2):
        self.f = ensure_lambda(f)
        n, d = self.f.num, self.f.den
        self.n = [n, n.diff(0), n.diff(1)]
        self.d = [d, d.diff(0), d.diff(1)]
        if order >= 2:
            self.n += [self.n[1].diff(0), self.n[1].diff(1), self.n[2].diff(1)]
            self.d += [self.d[1].diff(0), self.d[1].diff(1), self.d[2].diff(1)]
        self.order = order

    def at(self, x, y) -> list[Fraction]:
        N = [p(x, y) for p in self.n]
        D = [p(x, y) for p in self.d]
        if D[0] == 0:
            raise ZeroDivisionError("pole")
        if isinstance(D[0], float):
            inv = 1.0 / D[0]
        elif isinstance(D[0], int):
            inv = Fraction(1, D[0])
        else:
            inv = 1 / Fraction(D[0])
        f = N[0] * inv
        f1 = (N[1] - f * D[1]) * inv
        f2 = (N[2] - f * D[2]) * inv
        if self.order < 2:
            return [f, f1, f2]
        f11 = (N[3] - 2 * f1 * D[1] - f * D[3]) * inv
        f12 = (N[4] - f1 * D[2] - f2 * D[1] - f * D[4]) * inv
        f22 = (N[5] - 2 * f2 * D[2] - f * D[5]) * inv
        return [f, f1, f2, f11, f12, f22]


def ha_partials(wj: list[Fraction], x, y) -> tuple[Fraction, ...]:
    """Recover (W_H, W_A, W_HH, W_HA, W_AA) from lambda partials, ``x != y``.

    Uses ``w_i = W_H + 2 l_i W_A`` and the matching second-order identities.
    """
    _, w1, w2, w11, w12, w22 = wj
    dx = x - y
    WA = (w1 - w2) / (2 * dx)
    WH = w1 - 2 * x * WA
    u1 = (w11 - 2 * WA - w12) / dx          # 2 W_HA + 4 x W_AA
    u2 = (w22 - 2 * WA - w12) / -dx         # 2 W_HA + 4 y W_AA
    WAA = (u1 - u2) / (4 * dx)
    WHA = (u1 - 4 * x * WAA) / 2
    WHH = w12 - 2 * (x + y) * WHA - 4 * x * y * WAA
    return WH, WA, WHH, WHA, WAA


class PointEvaluator:
    """Exact values of C_w and G1 at single off-diagonal rational points.

    Equivalent to evaluating :func:`evolve` output, but costs only a few
    polynomial evaluations, which makes it the workhorse of randomized
    screening.
    """

    def __init__(self, F: RationalFn, w: RationalFn):
        self.Fj = _Jet(F)
        self.wj = _Jet(ensure_lambda(w))

    def values(self, x, y) -> tuple[Fraction, Fraction]:
        """``(C_w, G1)`` at ``(x, y)``; exact unless floats are passed in."""
        if isinstance(x, float) or isinstance(y, float):
            x, y = float(x), float(y)
        elif not isinstance(x, int) or not isinstance(y, int):
            x, y = Fraction(x), Fraction(y)
        if x == y:
            raise ZeroDivisionError("diagonal point")
        F, F1, F2, F11, F12, F22 = self.Fj.at(x, y)
        wj = self.wj.at(x, y)
        if wj[2] == 0:
            raise ZeroDivisionError("dw/dl2 vanishes")
        WH, WA, WHH, WHA, WAA = ha_partials(wj, x, y)
        a1 = -wj[1] / wj[2]
        DQ = (F1 - F2) / (x - y)
        E = F - F1 * x - F2 * y
        S = F1 * x * x + F2 * y * y
        A2 = x * x + y * y
        A3 = x ** 3 + y ** 3
        H = x + y
        a1sq = a1 * a1
        hess = F11 + 2 * F12 * a1 + F22 * a1sq
        C_H = S * H + E * A2
        G_H = hess + 2 * DQ * a1sq
        C_A = 2 * S * A2 + 2 * E * A3
        G_A = -2 * (F1 * (1 + a1sq) + 2 * F2 * a1sq) + 2 * hess * x + 4 * DQ * a1sq * y
        mix = x + a1 * y
        Cw = WH * C_H + WA * C_A
        G1 = (WH * G_H + WA * G_A - WHH * F1 * (1 + a1) ** 2
              - 4 * WAA * F1 * mix * mix - 4 * WHA * F1 * (1 + a1) * mix)
        return Cw, G1
