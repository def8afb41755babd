"""Text input and output for exact rational functions.

Grammar (``^`` binds tightest and is right-associative, unary minus sits
between ``^`` and the multiplicative operators)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | '+' unary | power
    power    := atom ('^' exponent)?
    exponent := INT ('^' exponent)?
    atom     := NUMBER | NAME | '(' expr ')'

Names are ``l1``, ``l2`` in the lambda basis and ``H``, ``A`` in the HA
basis.  ``K`` (the Gauss curvature) is accepted in both, and ``H``/``A``
are accepted in the lambda basis as shorthands for ``l1 + l2`` and
``l1^2 + l2^2``.  Numbers may be integers or decimals; decimals are read
exactly.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Optional, Union

from .exactpoly import Basis, BivarPoly, RationalFn, poly_gcd2

MAX_EXPONENT = 64


class ParseError(ValueError):
    """Syntax or semantic error in an expression, with a 0-based column."""

    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        self.message = message
        super().__init__(f"{message} at position {pos}")

    def pointer(self) -> str:
        return f"{self.text}\n{' ' * self.pos}^"


@dataclass(frozen=True)
class ExprSource:
    text: str
    basis: Union[Basis, str] = "auto"


_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")

_LAMBDA_NAMES = {"l1", "l2"}
_HA_NAMES = {"H", "A"}
_ALL_NAMES = _LAMBDA_NAMES | _HA_NAMES | {"K"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break                 # trailing whitespace
        if m.group(1) is not None:
            toks.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), m.start(2)))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", m.start(3), text)
            toks.append(("op", ch, m.start(3)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


def detect_basis(text: str) -> Basis:
    """``HA`` when the text uses only H, A, K; otherwise lambda."""
    names = set(re.findall(r"[A-Za-z_][A-Za-z_0-9]*", text))
    if names & _LAMBDA_NAMES:
        return Basis.LAMBDA
    if names and names <= _HA_NAMES | {"K"} and names & _HA_NAMES:
        return Basis.HA
    return Basis.LAMBDA


def _coerce_basis(basis, text: str) -> Basis:
    if isinstance(basis, Basis):
        return basis
    key = str(basis).lower()
    if key == "auto":
        return detect_basis(text)
    if key in ("lambda", "l", "lam"):
        return Basis.LAMBDA
    if key == "ha":
        return Basis.HA
    raise ValueError(f"unknown basis {basis!r}")


class _Parser:
    def __init__(self, text: str, basis: Basis):
        self.text = text
        self.basis = basis
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg: str, pos: Optional[int] = None):
        raise ParseError(msg, self.peek()[2] if pos is None else pos, self.text)

    def parse(self) -> RationalFn:
        if self.peek()[0] == "end":
            self.error("empty expression")
        value = self.expr()
        kind, tok, pos = self.peek()
        if kind != "end":
            self.error(f"unexpected {tok!r}")
        return value

    def expr(self) -> RationalFn:
        value = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RationalFn:
        value = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", pos, self.text)
                value = value / rhs
        return value

    def unary(self) -> RationalFn:
        kind, tok, _ = self.peek()
        if kind == "op" and tok == "-":
            self.take()
            return -self.unary()
        if kind == "op" and tok == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> RationalFn:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            n, pos = self.exponent()
            if base.is_zero() and n == 0:
                return RationalFn.const(1, self.basis)
            return base ** n
        return base

    def exponent(self) -> tuple[int, int]:
        kind, tok, pos = self.take()
        if kind != "num" or not tok.isdigit():
            raise ParseError("exponent must be a nonnegative integer literal", pos, self.text)
        n = int(tok)
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            m, _ = self.exponent()
            if n > 1 and m > 6:
                raise ParseError(f"exponent exceeds {MAX_EXPONENT}", pos, self.text)
            n = n ** m
        if n > MAX_EXPONENT:
            raise ParseError(f"exponent exceeds {MAX_EXPONENT}", pos, self.text)
        return n, pos

    def atom(self) -> RationalFn:
        kind, tok, pos = self.take()
        if kind == "num":
            return RationalFn.const(Fraction(tok), self.basis)
        if kind == "name":
            return self.variable(tok, pos)
        if kind == "op" and tok == "(":
            value = self.expr()
            kind2, tok2, pos2 = self.take()
            if tok2 != ")":
                raise ParseError("expected ')'", pos2, self.text)
            return value
        if kind == "end":
            raise ParseError("unexpected end of input", pos, self.text)
        raise ParseError(f"unexpected {tok!r}", pos, self.text)

    def variable(self, name: str, pos: int) -> RationalFn:
        b = self.basis
        if name not in _ALL_NAMES:
            raise ParseError(f"unknown variable {name!r}", pos, self.text)
        if b is Basis.LAMBDA:
            l1 = RationalFn.var(0, b)
            l2 = RationalFn.var(1, b)
            return {"l1": l1, "l2": l2, "H": l1 + l2,
                    "A": l1 * l1 + l2 * l2, "K": l1 * l2}[name]
        if name in _LAMBDA_NAMES:
            raise ParseError(f"variable {name!r} is not available in the HA basis",
                             pos, self.text)
        H = RationalFn.var(0, b)
        A = RationalFn.var(1, b)
        if name == "K":
            return (H * H - A) * Fraction(1, 2)
        return H if name == "H" else A


def parse(src: Union[ExprSource, str], basis: Union[Basis, str] = "auto") -> RationalFn:
    """Parse an expression into a reduced RationalFn."""
    if isinstance(src, ExprSource):
        text, basis = src.text, src.basis
    else:
        text = src
    return _Parser(text, _coerce_basis(basis, text)).parse()


# -- printing --------------------------------------------------------------


def _fmt_coeff(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_monomial(exp: tuple[int, int], names: tuple[str, str]) -> str:
    parts = []
    for e, n in zip(exp, names):
        if e == 1:
            parts.append(n)
        elif e > 1:
            parts.append(f"{n}^{e}")
    return "*".join(parts)


def format_poly(p: BivarPoly, compact: bool = False) -> str:
    """Expanded form, terms in decreasing graded lexicographic order."""
    if p.is_zero():
        return "0"
    names = p.basis.names
    out = []
    for k, (exp, c) in enumerate(p.sorted_terms()):
        mono = _fmt_monomial(exp, names)
        mag = abs(Fraction(c))
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{_fmt_coeff(mag)}*{mono}"
        else:
            body = _fmt_coeff(mag)
        if k == 0:
            out.append(("-" if c < 0 else "") + body)
        elif compact:
            out.append(("-" if c < 0 else "+") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def _is_single_factor(p: BivarPoly) -> bool:
    """True when ``p`` prints as a number, a variable or a variable power."""
    if len(p.terms) != 1:
        return False
    (i, j), c = next(iter(p.terms.items()))
    if i == 0 and j == 0:
        return Fraction(c).denominator == 1 and c > 0
    return c == 1 and (i == 0 or j == 0)


def format_expr(f: RationalFn) -> str:
    """Canonical expanded text: ``num`` or ``num/den``."""
    num = format_poly(f.num)
    if f.den == 1:
        return num
    den = format_poly(f.den)
    if len(f.num.terms) > 1:
        num = f"({num})"
    if not _is_single_factor(f.den):
        den = f"({den})"
    return f"{num}/{den}"


def _linear_candidates(bound: int = 4) -> list[BivarPoly]:
    from math import gcd
    cands = []
    for a in range(1, bound + 1):
        for b in range(-bound, bound + 1):
            if b != 0 and gcd(a, abs(b)) == 1:
                cands.append((a, b))
    cands.sort(key=lambda ab: -Fraction(ab[1], ab[0]))
    return [BivarPoly({(1, 0): a, (0, 1): b}, Basis.LAMBDA) for a, b in cands]


_LINEAR = None


def _factor_side(p: BivarPoly):
    """Split p into sign*content, linear factors, cofactor and a monomial."""
    global _LINEAR
    if _LINEAR is None:
        _LINEAR = _linear_candidates()
    if p.is_const():
        return Fraction(p.const_value()), [], [], (0, 0)
    a, b = p.min_exponents()
    rest = BivarPoly({(i - a, j - b): c for (i, j), c in p.terms.items()}, p.basis)
    linear = []
    if p.basis is Basis.LAMBDA:
        for lin in _LINEAR:
            if rest.degree < 1:
                break
            m = 0
            while rest.degree >= 1 and lin.divides(rest):
                rest = rest.divmod_exact(lin)
                m += 1
            if m:
                linear.append((lin, m))
    if rest.is_const():
        return Fraction(rest.const_value()), linear, [], (a, b)
    prim = rest.primitive()
    content = Fraction(rest.lc) / Fraction(prim.lc)
    return content, linear, _squarefree_split(prim), (a, b)


def _squarefree_split(p: BivarPoly) -> list[tuple[BivarPoly, int]]:
    """Yun's algorithm in l1 (factors free of l1 stay in the first slot)."""
    dp = p.diff(0)
    if dp.is_zero():
        return [(p, 1)]
    a0 = poly_gcd2(p, dp)
    if a0.is_const():
        return [(p, 1)]
    out = []
    b = p.divmod_exact(a0)
    d = dp.divmod_exact(a0) - b.diff(0)
    m = 1
    while b.degree > 0:
        g = poly_gcd2(b, d)
        if g.degree > 0:
            out.append((g, m))
        b = b.divmod_exact(g)
        d = d.divmod_exact(g) - b.diff(0)
        m += 1
    prod = BivarPoly.const(1, p.basis)
    for g, k in out:
        prod = prod * g ** k
    rest = p.divmod_exact(prod)
    if not rest.is_const():
        out.insert(0, (rest.primitive(), 1))
    return out


def format_factored(f: RationalFn) -> str:
    """Human-oriented factored layout, e.g. ``-(l1+l2)*(l1-l2)^2/(2*l1^3*l2^3)``.

    Each side is written as integer content, small linear factors in l1, l2
    (ordered by decreasing l2/l1 ratio), the remaining primitive cofactor,
    then the monomial part.  The overall sign leads.  The result parses back
    to ``f``.
    """
    if f.is_zero():
        return "0"
    names = f.basis.names

    def side(p: BivarPoly) -> tuple[Fraction, list[str]]:
        content, linear, cof, mono = _factor_side(p)
        parts = []
        for lin, m in linear:
            s = f"({format_poly(lin, compact=True)})"
            parts.append(s if m == 1 else f"{s}^{m}")
        for g, m in cof:
            s = format_poly(g, compact=True)
            s = f"({s})" if len(g.terms) > 1 else s
            parts.append(s if m == 1 else f"{s}^{m}")
        mono_s = _fmt_monomial(mono, names)
        if mono_s:
            parts.append(mono_s)
        return content, parts

    nc, nparts = side(f.num)
    dc, dparts = side(f.den)
    ratio = nc / dc
    sign = "-" if ratio < 0 else ""
    ratio = abs(ratio)
    numc, denc = ratio.numerator, ratio.denominator
    if numc != 1 or not nparts:
        nparts = [str(numc)] + nparts
    if denc != 1:
        dparts = [str(denc)] + dparts
    num = "*".join(nparts)
    if not dparts:
        return sign + num
    den = "*".join(dparts)
    if any(ch in den for ch in "*+-/"):
        den = f"({den})"
    return f"{sign}{num}/{den}"


# -- files and reports -----------------------------------------------------


def iter_expr_lines(text: str) -> Iterator[tuple[int, str]]:
    """Yield (line number, expression) for non-empty, non-comment lines."""
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if body:
            yield lineno, body


def read_expr_file(path: Union[str, Path], basis: Union[Basis, str] = "auto") -> list[RationalFn]:
    text = Path(path).read_text(encoding="utf-8")
    out = []
    for lineno, body in iter_expr_lines(text):
        try:
            out.append(parse(body, basis))
        except ParseError as exc:
            raise ParseError(f"{path}:{lineno}: {exc.message}", exc.pos, body) from None
    return out


def write_expr_file(path: Union[str, Path], exprs, header: str = "") -> None:
    lines = [f"# {h}" for h in header.splitlines()] if header else []
    lines += [format_expr(e) for e in exprs]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def fmt_point(pt) -> Optional[list[str]]:
    if pt is None:
        return None
    return [_fmt_coeff(x) for x in pt]


REPORT_FIELDS = ("velocity", "candidate", "verdict", "C_w", "G1", "certificates", "witness")


def dumps_report(report: dict) -> str:
    """Deterministic JSON (sorted keys, no float noise)."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False)
