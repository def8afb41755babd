"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines
appear in the "acceptance criteria" section at the end.  Criterion 3 is the
slow one (a few minutes on one core).
"""

from __future__ import annotations

import math
import random
import time

import numpy as np
import pytest

from invflow import flowsim
from invflow.cli import main
from invflow.engine import evolve
from invflow.exprio import parse
from invflow.positivity import Verdict, quadrant_sign, sturm_count
from invflow.sieve import SearchSpace, contains, search
from invflow.univar import UnivarPoly, poly_gcd

from conftest import ACCEPTANCE_LINES, GOLDEN, SPEED_PAIRS
from oracles import positive_root_count


def report(n: int, ok: bool, detail: str):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_golden_suite():
    t0 = time.perf_counter()
    bad = []
    for name, F, w, C, G in GOLDEN:
        res = evolve(parse(F, "lambda"), parse(w, "lambda"))
        if res.Cw != parse(C, "lambda") or res.G1 != parse(G, "lambda"):
            bad.append(name)
    dt = time.perf_counter() - t0
    report(1, not bad and dt < 10,
           f"{len(GOLDEN) - len(bad)}/{len(GOLDEN)} evolution results exact, {dt:.2f} s"
           + (f"; mismatched: {', '.join(bad)}" if bad else ""))


def test_criterion_2_sign_certification():
    t0 = time.perf_counter()
    bad = []
    for name, F, w, _, _ in GOLDEN:
        res = evolve(parse(F, "lambda"), parse(w, "lambda"))
        for label, f in (("C_w", res.Cw), ("G1", res.G1)):
            if quadrant_sign(f).verdict is not Verdict.NONPOSITIVE:
                bad.append(f"{name}/{label}")
    dt = time.perf_counter() - t0
    report(2, not bad and dt < 30,
           f"{2 * len(GOLDEN) - len(bad)}/{2 * len(GOLDEN)} certified nonpositive, {dt:.2f} s")


@pytest.mark.slow
def test_criterion_3_sieve_rediscovery():
    t0 = time.perf_counter()
    checks = [
        ("-1/K", 6, ["(l1-l2)^2/(4*l1^2*l2^2)"]),
        ("-H^2/K^2", 6, ["(l1-l2)^2/((l1+l2)*l1*l2)"]),
        ("-1/H", 7, ["(l1-l2)^2/((l1+l2)*l1*l2)",
                     "(l1^2+l2^2)*(l1-l2)^2/((l1+l2)*l1^3*l2^3)"]),
    ]
    found, parts = [], []
    for F, deg, targets in checks:
        t1 = time.perf_counter()
        res = search(SearchSpace(parse(F, "lambda"), max_degree=deg), keep_rejected=False)
        hits = [contains(res, parse(w, "lambda")) for w in targets]
        found.extend(hits)
        parts.append(f"{F} deg {deg}: {sum(hits)}/{len(hits)} "
                     f"({len(res.verified)} verified, {time.perf_counter() - t1:.0f} s)")
    dt = time.perf_counter() - t0
    report(3, all(found) and dt < 600, "; ".join(parts) + f"; total {dt:.0f} s")


def test_criterion_4_sturm_oracle():
    rng = random.Random(20240601)
    n = mismatches = 0
    while n < 1000:
        deg = rng.randint(1, 8)
        c = [rng.randint(-9, 9) for _ in range(deg + 1)]
        if c[-1] == 0:
            continue
        p = UnivarPoly(c)
        if poly_gcd(p, p.derivative()).degree > 0:
            continue
        n += 1
        if sturm_count(p) != positive_root_count(c):
            mismatches += 1
    report(4, mismatches == 0, f"{n - mismatches}/{n} root counts agree with bisection oracle")


SPHERE_LAWS = [("1/K", 1.0), ("H^2/K^2", 0.25), ("A/K^2", 0.5), ("H^3/K^3", 1 / 16)]


def test_criterion_5_sphere_laws():
    parts, ok = [], True
    for G, T in SPHERE_LAWS:
        state = flowsim.make_state([1.0], 64, G)
        res = flowsim.run(state, max_u=10.0)
        sp = state.speed
        exact = sp.sphere_radius(1.0, res.column("t"), T)
        rel = float(np.max(np.abs(res.column("max_u") / exact - 1)))
        terr = abs(res.T_hat - T)
        ok &= rel < 1e-3 and terr < 1e-3
        parts.append(f"{G}: rel {rel:.1e}, T err {terr:.1e}")
    report(5, ok, "; ".join(parts))


SPHEROID = [0.95, 0.0, 0.15]      # 1 + 0.05 (3 cos^2 - 1)


def _spheroid_run(G, w):
    state = flowsim.make_state(SPHEROID, 64, G)
    return flowsim.run(state, max_u=20 * float(state.u.max()), w=parse(w, "lambda"))


def test_criterion_6_numerical_monotonicity():
    tol = 10 * (math.pi / 64) ** 2
    parts, ok = [], True
    for G, w in SPEED_PAIRS:
        res = _spheroid_run(G, w)
        vw = flowsim.monotone_violation(res.column("max_w"))
        vk = flowsim.monotone_violation(res.column("max_curv"))
        pinch = res.column("pinch") - 1
        osc = flowsim.rescaled_osc(res)
        good = (vw <= tol and vk <= tol and pinch[-1] < pinch[0] / 10
                and osc[-1] < osc[0] / 10)
        ok &= good
        parts.append(f"{G}: dw {vw:.0e}, dk {vk:.0e}, pinch-1 {pinch[0]:.2f}->{pinch[-1]:.0e},"
                     f" osc {osc[0]:.2f}->{osc[-1]:.0e}")
    report(6, ok, "; ".join(parts))


def test_criterion_7_convergence_report():
    parts, ok = [], True
    for G, w in SPEED_PAIRS[:4]:
        rep = flowsim.convergence_report(_spheroid_run(G, w))
        vals = (rep.radius_slope, rep.gap_slope, rep.gap_ratio_final)
        ok &= all(isinstance(v, float) and math.isfinite(v) for v in vals)
        parts.append(f"{G}: r+ slope {rep.radius_slope:.2f}, gap slope {rep.gap_slope:.2f}, "
                     f"gap/K^1.25 {rep.gap_ratio_final:.2e}")
    report(7, ok, "reported (not gated): " + "; ".join(parts))


def test_criterion_8_determinism(tmp_path):
    outs = []
    for workers in (1, 2, 3):
        path = tmp_path / f"w{workers}.jsonl"
        code = main(["search", "-F", "-1/K", "--max-degree", "5", "--all", "--seed", "7",
                     "--workers", str(workers), "-o", str(path)])
        assert code == 0
        outs.append(path.read_bytes())
    same = all(o == outs[0] for o in outs)
    report(8, same and len(outs[0]) > 0,
           f"reports for 1, 2, 3 workers byte-identical ({len(outs[0])} bytes)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
