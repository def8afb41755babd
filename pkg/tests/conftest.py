"""Shared fixtures: published evolution results and random-expression strategies."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from invflow.exactpoly import Basis, BivarPoly, RationalFn

# velocity F, quantity w, expected C_w, expected G1 (all lambda basis)
GOLDEN = [
    ("1/K row 1",
     "-1/K", "(l1-l2)^2/(4*l1^2*l2^2)",
     "-(l1+l2)*(l1-l2)^2/(2*l1^3*l2^3)",
     "-2/(l1^6*l2)"),
    ("1/K improved",
     "-1/K", "(l1^2+l2^2)*(l1-l2)^2/(8*(l1+l2)*l1^3*l2^3)",
     "-3*(l1^4+2*l1^3*l2-2*l1^2*l2^2+2*l1*l2^3+l2^4)*(l1-l2)^2/(8*(l1+l2)^2*l1^4*l2^4)",
     "-(18*l1^9-9*l1^8*l2+12*l1^7*l2^2+72*l1^6*l2^3-12*l1^5*l2^4+70*l1^4*l2^5"
     "+60*l1^3*l2^6+18*l1*l2^8+27*l2^9)"
     "/((3*l1^3+3*l1^2*l2-l1*l2^2+3*l2^3)^2*(l1+l2)^2*l1^7*l2^2)"),
    ("H^2/K^2",
     "-H^2/K^2", "(l1-l2)^2/(2*(l1+l2)*l1*l2)",
     "-5*(l1-l2)^2/(l1^2*l2^2)",
     "-128/((l1+3*l2)^2*l1^4)"),
    ("A/K^2",
     "-A/K^2", "(l1-l2)^2/(2*(l1+l2)*l1*l2)",
     "-2*(2*l1^2+l1*l2+2*l2^2)*(l1-l2)^2/((l1+l2)^2*l1^2*l2^2)",
     "-4*(21*l1^4+24*l1^3*l2+18*l1^2*l2^2+l2^4)/((l1+3*l2)^2*(l1+l2)^2*l1^6)"),
    ("H^3/K^3",
     "-H^3/K^3", "(l1+l2)^6*(l1-l2)^2/(16*(l1^2+l2^2)*(l1^2+l1*l2+l2^2)*l1^3*l2^3)",
     "-(l1+l2)^8*(l1-l2)^2*(l1^6-l1^5*l2+8*l1^4*l2^2+2*l1^3*l2^3+8*l1^2*l2^4-l1*l2^5+l2^6)"
     "/(4*(l1^2+l2^2)^2*(l1^2+l1*l2+l2^2)^2*l1^6*l2^6)",
     "-3*(l1+l2)^8*(2*l1^18-4*l1^17*l2+57*l1^16*l2^2-108*l1^15*l2^3+508*l1^14*l2^4"
     "-428*l1^13*l2^5+2152*l1^12*l2^6-156*l1^11*l2^7+4784*l1^10*l2^8+172*l1^9*l2^9"
     "+4942*l1^8*l2^10-612*l1^7*l2^11+2676*l1^6*l2^12-772*l1^5*l2^13+872*l1^4*l2^14"
     "-340*l1^3*l2^15+126*l1^2*l2^16-56*l1*l2^17+9*l2^18)"
     "/(8*(3*l1^6+11*l1^4*l2^2+2*l1^3*l2^3+9*l1^2*l2^4-2*l1*l2^5+l2^6)^2"
     "*(l1^2+l1*l2+l2^2)^2*(l1^2+l2^2)^2*l1^8*l2^6)"),
    ("1/H first",
     "-1/H", "(l1-l2)^2/(2*(l1+l2)*l1*l2)",
     "-(l1^2+4*l1*l2+l2^2)*(l1-l2)^2/(2*(l1+l2)^3*l1*l2)",
     "-2*(5*l1^2+2*l1*l2+l2^2)*l2/((l1+3*l2)^2*(l1+l2)*l1^5)"),
    ("1/H second",
     "-1/H", "(l1^2+l2^2)*(l1-l2)^2/(8*(l1+l2)*l1^3*l2^3)",
     "-(3*l1^4-2*l1^2*l2^2+3*l2^4)*(l1-l2)^2/(8*(l1+l2)^3*l1^3*l2^3)",
     "-(9*l1^10-9*l1^8*l2^2+96*l1^7*l2^3-38*l1^6*l2^4+96*l1^5*l2^5+30*l1^4*l2^6"
     "+45*l1^2*l2^8+27*l2^10)"
     "/(2*(3*l1^3+3*l1^2*l2-l1*l2^2+3*l2^3)^2*(l1+l2)^3*l1^7*l2)"),
    ("H/K",
     "-H/K", "(l1-l2)^2/(4*l1^2*l2^2)",
     "-(l1-l2)^2/(l1^2*l2^2)",
     "-2/l1^6"),
]

# speed G = -F with its monotone quantity, as used by the simulator checks
SPEED_PAIRS = [
    ("1/K", "(l1-l2)^2/(4*l1^2*l2^2)"),
    ("H^2/K^2", "(l1-l2)^2/(2*(l1+l2)*l1*l2)"),
    ("A/K^2", "(l1-l2)^2/(2*(l1+l2)*l1*l2)"),
    ("H^3/K^3", "(l1+l2)^6*(l1-l2)^2/(16*(l1^2+l2^2)*(l1^2+l1*l2+l2^2)*l1^3*l2^3)"),
    ("1/H", "(l1-l2)^2/(2*(l1+l2)*l1*l2)"),
    ("H/K", "(l1-l2)^2/(4*l1^2*l2^2)"),
]


@pytest.fixture(params=GOLDEN, ids=[g[0] for g in GOLDEN])
def golden(request):
    return request.param


small_ints = st.integers(-6, 6)


@st.composite
def bivar_polys(draw, max_deg: int = 3, basis: Basis = Basis.LAMBDA, nonzero: bool = False):
    n = draw(st.integers(1 if nonzero else 0, 5))
    terms = {}
    for _ in range(n):
        i = draw(st.integers(0, max_deg))
        j = draw(st.integers(0, max_deg - i))
        terms[(i, j)] = draw(small_ints.filter(bool))
    p = BivarPoly(terms, basis)
    if nonzero and p.is_zero():
        p = BivarPoly.const(draw(st.sampled_from([1, -1, 2, 3])), basis)
    return p


@st.composite
def rational_fns(draw, max_deg: int = 3):
    num = draw(bivar_polys(max_deg))
    den = draw(bivar_polys(max_deg, nonzero=True))
    return RationalFn(num, den)


rationals = st.fractions(min_value=-20, max_value=20, max_denominator=50)
positive_rationals = st.fractions(min_value=Fraction(1, 50), max_value=50, max_denominator=50)


@st.composite
def homogeneous_polys(draw, degree: int):
    terms = {(i, degree - i): draw(small_ints) for i in range(degree + 1)}
    p = BivarPoly(terms)
    return p if not p.is_zero() else BivarPoly({(degree, 0): 1})


@st.composite
def homogeneous_fns(draw, max_deg: int = 3):
    num = draw(homogeneous_polys(draw(st.integers(0, max_deg))))
    den = draw(homogeneous_polys(draw(st.integers(0, max_deg))))
    return RationalFn(num, den)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
