"""Candidate search for monotone quantities.

Candidates are ``w = p1/p2`` with ``p1 = (l1 - l2)^2 * s1`` and ``s1``, ``p2``
symmetric homogeneous polynomials whose coefficients in the monomial
symmetric basis come from a small range.  Each candidate runs through the
stages below in order and stops at the first failure:

    1a  p1 >= 0 and p2 >= 0 on the positive quadrant
    1b  p1 vanishes on the diagonal
    2   deg p1 < deg p2
    3   d/dy w(1, y) < 0 on (0, 1) and > 0 on (1, inf)
    4r  C_w <= 0 and G1 <= 0 at seeded random points
    4x  exact certificates for C_w <= 0 and G1 <= 0
"""

from __future__ import annotations

import itertools
import logging
import multiprocessing
import os
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Optional

from .engine import DegenerateQuantity, PointEvaluator, certify, evolve
from .exactpoly import Basis, BivarPoly, NotDivisible, RationalFn, ensure_lambda
from .exprio import fmt_point, format_expr, format_factored
from .positivity import (_sign_at, quadrant_sign, random_point, sign_on_positive_axis,
                         strict_sign_on)

log = logging.getLogger(__name__)

SAMPLE_DENOM = 1000
STAGES = ("degenerate", "1a", "1b", "2", "3", "4r", "4x")


@dataclass(frozen=True)
class SearchSpace:
    velocity: RationalFn
    max_degree: int = 6
    coeff_range: tuple[int, int] = (1, 4)
    require_diagonal_factor: bool = True
    seed: int = 0
    n_samples: int = 64
    min_degree: int = 3

    def __post_init__(self):
        if self.max_degree < 2:
            raise ValueError("max_degree must be at least 2")
        lo, hi = self.coeff_range
        if lo > hi or lo < 1:
            raise ValueError("coeff_range must be a nonempty range of positive integers")

    @property
    def coeff_values(self) -> tuple[int, ...]:
        lo, hi = self.coeff_range
        return (0,) + tuple(range(lo, hi + 1))


@dataclass
class CandidateReport:
    index: int
    candidate: RationalFn
    stage: str                          # failing stage, or "verified"
    reason: str = ""
    witness: Optional[tuple] = None
    Cw: Optional[RationalFn] = None
    G1: Optional[RationalFn] = None
    certificates: dict = field(default_factory=dict)
    timing: float = 0.0

    @property
    def verified(self) -> bool:
        return self.stage == "verified"

    def to_dict(self, velocity: RationalFn) -> dict:
        certs = [{"target": name, "verdict": c.verdict.value, "method": c.method,
                  "witness_pos": fmt_point(c.witness_pos),
                  "witness_neg": fmt_point(c.witness_neg)}
                 for name, c in self.certificates.items()]
        return {
            "index": self.index,
            "velocity": format_expr(velocity),
            "candidate": format_expr(self.candidate),
            "candidate_factored": format_factored(self.candidate),
            "verdict": "MONOTONE" if self.verified else "REJECTED",
            "stage": self.stage,
            "reason": self.reason,
            "C_w": format_expr(self.Cw) if self.Cw is not None else None,
            "G1": format_expr(self.G1) if self.G1 is not None else None,
            "certificates": certs,
            "witness": fmt_point(self.witness),
        }


# -- enumeration ---------------------------------------------------------------


def symmetric_basis(d: int) -> list[BivarPoly]:
    """Monomial symmetric polynomials of degree d, ``l1^i l2^j + l1^j l2^i`` (i >= j)."""
    out = []
    for j in range(d // 2 + 1):
        i = d - j
        terms = {(i, j): 1, (j, i): 1} if i != j else {(i, j): 1}
        out.append(BivarPoly(terms))
    return out


def _combo(basis: list[BivarPoly], coeffs: tuple[int, ...]) -> BivarPoly:
    terms = {}
    for b, c in zip(basis, coeffs):
        if c:
            for e in b.terms:
                terms[e] = c
    return BivarPoly(terms)


_DIAG2 = BivarPoly({(2, 0): 1, (1, 1): -2, (0, 2): 1})


def raw_candidates(space: SearchSpace) -> Iterator[tuple[int, int, tuple, tuple]]:
    """Coefficient tuples ``(deg p2, deg s1, s1 coeffs, p2 coeffs)``.

    Coefficient vectors with a common factor are skipped, since they only
    rescale w.
    """
    vals = space.coeff_values
    for d2 in range(space.min_degree, space.max_degree + 1):
        n2 = d2 // 2 + 1
        p2_list = [c for c in itertools.product(vals, repeat=n2) if gcd(*c) == 1]
        if space.require_diagonal_factor:
            s_degrees = range(0, d2 - 2)
        else:
            s_degrees = range(0, d2)
        for ds in s_degrees:
            ns = ds // 2 + 1
            for s in itertools.product(vals, repeat=ns):
                if gcd(*s) != 1:
                    continue
                for p in p2_list:
                    yield d2, ds, s, p


def build_candidate(spec, space: SearchSpace) -> RationalFn:
    d2, ds, s, p = spec
    s1 = _combo(symmetric_basis(ds), s)
    p2 = _combo(symmetric_basis(d2), p)
    p1 = _DIAG2 * s1 if space.require_diagonal_factor else s1
    return RationalFn(p1, p2)


def dedup_key(w: RationalFn) -> tuple:
    """Canonical key of w up to nonzero scalar multiples."""
    n = w.num.scale(Fraction(1) / w.num.lc) if not w.is_zero() else w.num
    d = w.den.scale(Fraction(1) / w.den.lc)
    return (frozenset(n.terms.items()), frozenset(d.terms.items()))


def enumerate_candidates(space: SearchSpace) -> Iterator[RationalFn]:
    """Deduplicated candidates in deterministic order."""
    for _, w in _indexed_candidates(space):
        yield w


def _indexed_candidates(space: SearchSpace) -> Iterator[tuple[int, RationalFn]]:
    seen = set()
    for index, spec in enumerate(raw_candidates(space)):
        w = build_candidate(spec, space)
        key = dedup_key(w)
        if key in seen:
            continue
        seen.add(key)
        yield index, w


# -- filtering -----------------------------------------------------------------


def _oriented(w: RationalFn) -> tuple[BivarPoly, BivarPoly]:
    """``(p1, p2)`` with the sign chosen so that p2 is not negative at (1, 1)."""
    n, d = w.num, w.den
    if d(1, 1) < 0:
        n, d = -n, -d
    return n, d


def _nonnegative_fast(p: BivarPoly) -> bool:
    """Sufficient test: p or p/(l1-l2)^2 has only nonnegative coefficients."""
    if all(c > 0 for c in p.terms.values()):
        return True
    try:
        q = p.divmod_exact(_DIAG2)
    except NotDivisible:
        return False
    return all(c > 0 for c in q.terms.values())


def condition_three(w: RationalFn) -> tuple[bool, str, Optional[tuple]]:
    """Exact check of the monotonicity of ``w(1, y)`` away from ``y = 1``."""
    n, d = w.num, w.den
    # w(1, y) = P(y)/Q(y)
    P = n.dehomogenize(0)
    Q = d.dehomogenize(0)
    deriv = P.derivative() * Q - P * Q.derivative()      # sign of d/dy w(1, y)
    # cheap probes first; both signs are exact
    for y, want in ((Fraction(1, 2), -1), (Fraction(1, 5), -1), (Fraction(2), 1), (Fraction(5), 1)):
        if _sign_at(deriv.coeffs, y) != want:
            return False, f"derivative has the wrong sign at y={y}", (Fraction(1), y)
    if any(c < 0 for c in Q.coeffs) and sign_on_positive_axis(Q).roots:
        return False, "pole of w(1, y) on the positive axis", None
    if strict_sign_on(deriv, "below_one") != -1:
        return False, "derivative not negative on (0, 1)", None
    if strict_sign_on(deriv, "above_one") != 1:
        return False, "derivative not positive on (1, inf)", None
    return True, "", None


def _randomized_four(pe: PointEvaluator, n: int, rng: random.Random):
    # C_w and G1 are homogeneous, so the sign at (x, y) equals the sign at
    # (D*x, D*y); the scaled point has integer coordinates.
    for _ in range(n):
        for _retry in range(50):
            x, y = random_point(rng)
            x, y = int(x * SAMPLE_DENOM), int(y * SAMPLE_DENOM)
            if x == y:
                continue
            try:
                cw, g1 = pe.values(float(x), float(y))
                if cw > 0 or g1 > 0:
                    # confirm exactly; float noise must not reject
                    cw, g1 = pe.values(x, y)
            except ZeroDivisionError:
                try:
                    cw, g1 = pe.values(x, y)
                except ZeroDivisionError:
                    continue
            break
        else:
            return "no admissible sample point", None
        if cw > 0 or g1 > 0:
            name = "C_w" if cw > 0 else "G1"
            return f"{name} > 0 at a sample point", (Fraction(x, SAMPLE_DENOM),
                                                     Fraction(y, SAMPLE_DENOM))
    return None, None


def filter_candidate(F: RationalFn, w: RationalFn, space: Optional[SearchSpace] = None,
                     index: int = 0, rng: Optional[random.Random] = None) -> CandidateReport:
    """Run the staged checks for a single candidate."""
    t0 = time.perf_counter()
    seed = space.seed if space is not None else 0
    n_samples = space.n_samples if space is not None else 64
    rng = rng or random.Random(f"{seed}/{index}")
    w = ensure_lambda(w)
    F = ensure_lambda(F)

    def done(stage, reason="", witness=None, **kw):
        return CandidateReport(index, w, stage, reason, witness,
                               timing=time.perf_counter() - t0, **kw)

    if w.is_zero() or w.is_const():
        return done("degenerate", "constant quantity")
    if not w.is_homogeneous():
        return done("degenerate", "quantity is not homogeneous")
    if not w.is_symmetric():
        return done("degenerate", "quantity is not symmetric")
    p1, p2 = _oriented(w)
    for name, poly in (("p1", p1), ("p2", p2)):
        if not _nonnegative_fast(poly):
            cert = quadrant_sign(RationalFn._reduced(poly, BivarPoly.const(1)))
            if not cert.verdict.satisfies("nonnegative"):
                return done("1a", f"{name} takes negative values", cert.witness_neg)
    if not p1.restrict_diagonal().is_zero():
        return done("1b", "p1 does not vanish on the diagonal", (Fraction(1), Fraction(1)))
    if p1.degree >= p2.degree:
        return done("2", "deg p1 >= deg p2")
    ok, reason, wit = condition_three(w)
    if not ok:
        return done("3", reason, wit)
    try:
        pe = PointEvaluator(F, w)
        reason, wit = _randomized_four(pe, n_samples, rng)
        if reason:
            return done("4r", reason, wit)
        result = evolve(F, w)
    except (DegenerateQuantity, NotDivisible, ZeroDivisionError) as exc:
        return done("degenerate", str(exc))
    rep = certify(result)
    if rep.monotone:
        return done("verified", Cw=result.Cw, G1=result.G1, certificates=rep.certificates)
    name, pt = rep.witness
    return done("4x", f"{name} is not nonpositive", pt,
                Cw=result.Cw, G1=result.G1, certificates=rep.certificates)


# -- search --------------------------------------------------------------------


@dataclass
class SearchResult:
    space: SearchSpace
    reports: list[CandidateReport]
    counts: Counter
    elapsed: float = 0.0

    @property
    def verified(self) -> list[CandidateReport]:
        return [r for r in self.reports if r.verified]

    def summary(self) -> dict:
        return {"candidates": sum(self.counts.values()),
                "verified": len(self.verified),
                "rejected_by_stage": {s: self.counts.get(s, 0) for s in STAGES}}


_WORKER_SPACE: Optional[SearchSpace] = None


def _init_worker(space: SearchSpace):
    global _WORKER_SPACE
    _WORKER_SPACE = space


def _work(item):
    index, spec = item
    space = _WORKER_SPACE
    w = build_candidate(spec, space)
    return filter_candidate(space.velocity, w, space, index)


def default_workers() -> int:
    env = os.environ.get("INVFLOW_WORKERS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def search(space: SearchSpace, workers: Optional[int] = None, keep_rejected: bool = True,
           progress=None) -> SearchResult:
    """Filter every candidate of the space; output order follows enumeration.

    Duplicates (same quantity up to scale) are dropped after filtering, in
    enumeration order, so the outcome does not depend on ``workers``.
    """
    t0 = time.perf_counter()
    workers = workers or default_workers()
    items = enumerate(raw_candidates(space))
    if workers == 1:
        _init_worker(space)
        results: Iterable[CandidateReport] = map(_work, items)
        pool = None
    else:
        ctx = multiprocessing.get_context("fork" if hasattr(os, "fork") else "spawn")
        pool = ctx.Pool(workers, initializer=_init_worker, initargs=(space,))
        results = pool.imap(_work, items, chunksize=64)
    seen = set()
    reports = []
    counts: Counter = Counter()
    try:
        for k, rep in enumerate(results):
            key = dedup_key(rep.candidate)
            if key in seen:
                continue
            seen.add(key)
            counts[rep.stage] += 1
            if keep_rejected or rep.verified:
                reports.append(rep)
            if progress is not None and k % 5000 == 0:
                progress(k)
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    if not keep_rejected:
        log.info("kept %d verified candidates", len(reports))
    return SearchResult(space, reports, counts, time.perf_counter() - t0)


def contains(result: SearchResult, w: RationalFn) -> bool:
    key = dedup_key(ensure_lambda(w))
    return any(dedup_key(r.candidate) == key for r in result.verified)
