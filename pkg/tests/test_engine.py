import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from invflow.engine import (DegenerateQuantity, PointEvaluator, base_terms, compute_a1, evolve,
                            verify_monotone)
from invflow.exactpoly import Basis, RationalFn, lam, to_HA
from invflow.exprio import parse

from conftest import GOLDEN, positive_rationals

L1, L2 = lam(0), lam(1)
H, A, K = L1 + L2, L1**2 + L2**2, L1 * L2


def test_golden(golden):
    _, F, w, C, G = golden
    res = evolve(parse(F, "lambda"), parse(w, "lambda"))
    assert res.Cw == parse(C, "lambda")
    assert res.G1 == parse(G, "lambda")
    assert res.G2 == res.G1.swap()


def test_golden_in_HA_input(golden):
    _, F, w, C, _ = golden
    wl = parse(w, "lambda")
    assert evolve(parse(F, "lambda"), to_HA(wl)).Cw == parse(C, "lambda")


def test_critical_ratio_examples():
    w = parse("(2*A-H^2)/(H^2-A)^2", "HA")
    assert compute_a1(w).a1 == L2**2 / L1**2
    assert compute_a1(RationalFn.var(0, Basis.HA)).a1 == RationalFn.const(-1)
    assert compute_a1(RationalFn.var(1, Basis.HA)).a1 == -L1 / L2


def test_mean_curvature_identities():
    # for normal velocity H the classical laws are dH/dt = lap H + H|A|^2
    # and d|A|^2/dt = lap |A|^2 - 2|grad A|^2 + 2|A|^4
    bt = base_terms(H, compute_a1(H))
    assert bt.C_H == H * A
    assert bt.C_A2 == 2 * A * A


def test_inverse_gauss_on_H():
    res = evolve(-1 / K, H)
    assert res.Cw == -2 * (L1**2 - L1 * L2 + L2**2) / K
    assert res.Cw == (H**2 - 3 * A) / K
    assert res.Cw(1, 1) == -2


def _fd_Cw(F, w, x, y, h=1e-5):
    """C_w from floating-point central differences only."""
    Ff = lambda a, b: float(F(Fraction(a), Fraction(b)))

    def w_HA(Hv, Av):
        # invert H = l1 + l2, A = l1^2 + l2^2 for l1 > l2
        r = math.sqrt(2 * Av - Hv * Hv)
        return float(w(Fraction((Hv + r) / 2), Fraction((Hv - r) / 2)))

    Hv, Av = x + y, x * x + y * y
    wH = (w_HA(Hv + h, Av) - w_HA(Hv - h, Av)) / (2 * h)
    wA = (w_HA(Hv, Av + h) - w_HA(Hv, Av - h)) / (2 * h)
    F1 = (Ff(x + h, y) - Ff(x - h, y)) / (2 * h)
    F2 = (Ff(x, y + h) - Ff(x, y - h)) / (2 * h)
    Fv = Ff(x, y)
    E = Fv - F1 * x - F2 * y
    S = F1 * x * x + F2 * y * y
    return wH * (S * Hv + E * Av) + wA * (2 * S * Av + 2 * E * (x**3 + y**3))


@pytest.mark.parametrize("g", GOLDEN, ids=lambda g: g[0])
def test_finite_difference_cross_check(g):
    F, w = parse(g[1], "lambda"), parse(g[2], "lambda")
    res = evolve(F, w)
    rng = random.Random(11)
    for _ in range(10):
        x = rng.randint(1100, 3000) / 1000
        y = rng.randint(200, 1000) / 1000
        exact = float(res.Cw(Fraction(x), Fraction(y)))
        assert _fd_Cw(F, w, x, y) == pytest.approx(exact, rel=1e-6)


@pytest.mark.parametrize("w", ["3", "H^2 - A - 2*K", "l1"])
def test_degenerate_quantities(w):
    with pytest.raises(DegenerateQuantity):
        evolve(-1 / K, parse(w, "lambda"))


def test_verify_examples():
    assert verify_monotone(-1 / K, parse(GOLDEN[0][2])).monotone
    assert verify_monotone(-1 / H, parse(GOLDEN[5][2])).monotone
    rep = verify_monotone(-1 / K, 1 / H)
    assert rep.verdict == "NOT-PROVEN"
    name, pt = rep.witness
    value = {"C_w": rep.result.Cw, "G1": rep.result.G1}[name](*pt)
    assert value > 0


def test_degrees(golden):
    _, F, w, _, _ = golden
    Fr, wr = parse(F, "lambda"), parse(w, "lambda")
    res = evolve(Fr, wr)
    dF, dw = Fr.homogeneous_degree, wr.homogeneous_degree
    assert res.Cw.homogeneous_degree == dw + dF + 1
    assert res.G1.homogeneous_degree == dw + dF - 3
    assert res.Cw.is_symmetric()


def test_umbilic_vanishing(golden):
    # the quantities vanish to second order on the diagonal, so does C_w
    _, F, w, _, _ = golden
    res = evolve(parse(F, "lambda"), parse(w, "lambda"))
    assert res.Cw.num.restrict_diagonal().is_zero()


# -- pointwise evaluation -----------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(GOLDEN), positive_rationals, positive_rationals)
def test_point_evaluator_matches_symbolic(g, x, y):
    assume(x != y)
    F, w = parse(g[1], "lambda"), parse(g[2], "lambda")
    res = evolve(F, w)
    try:
        expect = (res.Cw(x, y), res.G1(x, y))
    except ZeroDivisionError:
        assume(False)
    assert PointEvaluator(F, w).values(x, y) == expect


def test_point_evaluator_floats():
    F, w = parse(GOLDEN[4][1], "lambda"), parse(GOLDEN[4][2], "lambda")
    cw, g1 = PointEvaluator(F, w).values(1.7, 0.6)
    res = evolve(F, w)
    assert cw == pytest.approx(float(res.Cw(Fraction(17, 10), Fraction(3, 5))), rel=1e-9)
    assert g1 == pytest.approx(float(res.G1(Fraction(17, 10), Fraction(3, 5))), rel=1e-9)


# -- independent derivation with sympy ------------------------------------------------


def _sympy_evolution(F_text, w_text):
    """Same evolution laws written directly with sympy, starting from w(H, A)."""
    l1, l2, h, a = sympy.symbols("l1 l2 h a", positive=True)
    env = {"l1": l1, "l2": l2, "H": l1 + l2, "A": l1**2 + l2**2, "K": l1 * l2}
    F = sympy.sympify(F_text.replace("^", "**"), locals=env)
    wl = sympy.sympify(w_text.replace("^", "**"), locals=env)
    # rewrite w in (h, a) with l1 l2 = (h^2 - a)/2 and l1^2 + l2^2 = a
    k = (h**2 - a) / 2
    num, den = sympy.fraction(sympy.together(wl))

    def sym_to_ha(p):
        expr, rest, defs = sympy.polys.polyfuncs.symmetrize(sympy.expand(p), [l1, l2],
                                                              formal=True)
        assert rest == 0
        (s1, _), (s2, _) = defs            # s1 = l1 + l2, s2 = l1*l2
        return expr.subs({s1: h, s2: k})

    w = sym_to_ha(num) / sym_to_ha(den)
    back = {h: l1 + l2, a: l1**2 + l2**2}
    wH, wA = [sympy.diff(w, v) for v in (h, a)]
    wHH, wHA, wAA = sympy.diff(w, h, 2), sympy.diff(w, h, a), sympy.diff(w, a, 2)
    wHH, wHA, wAA, wH, wA = [e.subs(back) for e in (wHH, wHA, wAA, wH, wA)]
    w1, w2 = sympy.diff(wl, l1), sympy.diff(wl, l2)
    a1 = -w1 / w2
    F1, F2 = sympy.diff(F, l1), sympy.diff(F, l2)
    F11, F12, F22 = sympy.diff(F, l1, 2), sympy.diff(F, l1, l2), sympy.diff(F, l2, 2)
    DQ = (F1 - F2) / (l1 - l2)
    E = F - F1 * l1 - F2 * l2
    S = F1 * l1**2 + F2 * l2**2
    Hl, A2, A3 = l1 + l2, l1**2 + l2**2, l1**3 + l2**3
    hess = F11 + 2 * F12 * a1 + F22 * a1**2
    C = wH * (S * Hl + E * A2) + wA * (2 * S * A2 + 2 * E * A3)
    GH = hess + 2 * DQ * a1**2
    GA = -2 * (F1 * (1 + a1**2) + 2 * F2 * a1**2) + 2 * hess * l1 + 4 * DQ * a1**2 * l2
    mix = l1 + a1 * l2
    G = (wH * GH + wA * GA - wHH * F1 * (1 + a1)**2 - 4 * wAA * F1 * mix**2
         - 4 * wHA * F1 * (1 + a1) * mix)
    return (l1, l2), C, G


@pytest.mark.parametrize("g", GOLDEN, ids=lambda g: g[0])
def test_sympy_cross_check(g):
    (l1, l2), C, G = _sympy_evolution(g[1], g[2])
    res = evolve(parse(g[1], "lambda"), parse(g[2], "lambda"))
    rng = random.Random(5)
    for _ in range(4):
        x, y = Fraction(rng.randint(1, 60), 7), Fraction(rng.randint(1, 60), 11)
        if x == y:
            continue
        pt = {l1: sympy.Rational(x.numerator, x.denominator),
              l2: sympy.Rational(y.numerator, y.denominator)}
        cx = sympy.nsimplify(C.subs(pt))
        gx = sympy.nsimplify(G.subs(pt))
        assert cx == sympy.Rational(*_nd(res.Cw(x, y)))
        assert gx == sympy.Rational(*_nd(res.G1(x, y)))


def _nd(v):
    v = Fraction(v)
    return v.numerator, v.denominator
