import math

import numpy as np
import pytest

from invflow import flowsim
from invflow.flowsim import (CSV_COLUMNS, ConvexityLost, Speed, estimate_T, make_state,
                             monotone_violation, observables, parse_cosine_series, radii, run,
                             step)


def test_speed_validation():
    sp = Speed.from_expr("1/K")
    assert (sp.g0, sp.gamma) == (1.0, 2.0)
    assert sp.blowup_time(1.0) == pytest.approx(1.0)
    assert Speed.from_expr("H^3/K^3").blowup_time(1.0) == pytest.approx(1 / 16)
    assert Speed.from_expr("1/H").gamma == 1.0
    for bad in ("l1/l2", "1 + 1/K", "-1/K"):
        with pytest.raises(ValueError):
            Speed.from_expr(bad)


def test_cosine_series():
    assert parse_cosine_series("1 + 0.05*(3*cos(theta)^2 - 1)") == pytest.approx([0.95, 0, 0.15])
    assert parse_cosine_series("2") == [2.0]
    with pytest.raises(ValueError):
        parse_cosine_series("1/cos(theta)")


def test_grid_minimum():
    with pytest.raises(ValueError):
        make_state([1.0], 8, "1/K")


def test_sphere_radii():
    r1, r2 = radii(make_state([1.0], 32, "1/K"))
    assert np.allclose(r1, 1, atol=1e-12) and np.allclose(r2, 1, atol=1e-12)


def test_translated_sphere_radii():
    # exact up to the second-order truncation error of the stencil
    h = math.pi / 32
    r1, r2 = radii(make_state([1.0, 0.1], 32, "1/K"))
    assert np.abs(r1 - 1).max() < 0.1 * h * h and np.abs(r2 - 1).max() < 0.1 * h * h


def test_sphere_observables():
    ob = observables(make_state([1.0], 32, "1/K"))
    assert ob.q_z == pytest.approx(0, abs=1e-12)
    assert (ob.r_plus, ob.r_minus, ob.pinch) == pytest.approx((1, 1, 1))
    ob = observables(make_state([1.0, 0.1], 32, "1/K"))
    assert ob.q_z == pytest.approx(0.1, abs=1e-5)
    assert (ob.r_plus, ob.r_minus) == pytest.approx((1, 1), abs=1e-5)
    assert ob.pinch == pytest.approx(1, abs=1e-3)
    assert (ob.rho_plus, ob.rho_minus) == pytest.approx((1, 1), abs=1e-6)


def test_w_vanishes_on_sphere():
    from invflow.exprio import parse
    wf = flowsim.compile_float(parse("(l1-l2)^2/(4*l1^2*l2^2)"))
    assert observables(make_state([1.0], 32, "1/K"), wf).max_w == pytest.approx(0, abs=1e-20)


def test_spheroid_radii_second_order():
    a, b = 0.95, 0.15

    def error(N):
        s = make_state([a, 0, b], N, "1/K")
        c = np.cos(s.theta)
        exact1 = a + b * c * c - 2 * b * (2 * c * c - 1)
        exact2 = a + b * c * c - 2 * b * c * c
        r1, r2 = radii(s)
        return max(np.abs(r1 - exact1).max(), np.abs(r2 - exact2).max())

    e1, e2 = error(32), error(64)
    assert e1 < 1e-2
    assert e1 / e2 > 3.5          # halving the step quarters the error


def test_nonconvex_initial_surface():
    with pytest.raises(ConvexityLost):
        make_state([1.0, 0, -2.0], 32, "1/K")


@pytest.mark.parametrize("r0, rate", [(1.0, 1.0), (2.0, 4.0)])
def test_one_step_sphere(r0, rate):
    s = make_state([r0], 32, "1/K")
    dt = 1e-4
    s1 = step(s, dt)
    # r' = r^2, so r(dt) = r0 / (1 - r0 dt)
    exact = r0 / (1 - r0 * dt)
    assert np.allclose(s1.u, exact, rtol=1e-12)
    assert (s1.u[0] - r0) / dt == pytest.approx(rate, rel=1e-3)


def test_short_sphere_run_matches_law():
    s = make_state([1.0], 32, "H^2/K^2")
    res = run(s, max_u=3.0, samples=60)
    t = res.column("t")
    exact = s.speed.sphere_radius(1.0, t)
    assert np.max(np.abs(res.column("max_u") / exact - 1)) < 1e-6
    assert res.T_hat == pytest.approx(0.25, rel=1e-4)
    assert res.stop_reason == "max_u"


def test_exponential_law():
    s = make_state([1.0], 32, "1/H")
    res = run(s, t_end=1.0, samples=20)
    assert res.final.u.max() == pytest.approx(math.exp(0.5), rel=1e-6)
    assert math.isinf(res.T_hat)


def test_translation_invariance():
    a = run(make_state([0.95, 0, 0.15], 32, "1/K"), t_end=0.1, samples=10)
    b = run(make_state([0.95, 0.05, 0.15], 32, "1/K"), t_end=0.1, samples=10)
    ka, kb = a.column("max_curv"), b.column("max_curv")
    assert np.max(np.abs(ka - kb)) < 10 * (math.pi / 32) ** 2
    assert b.column("q_z")[-1] - a.column("q_z")[-1] == pytest.approx(0.05, abs=1e-2)


def test_estimate_T_synthetic():
    t = np.linspace(0, 0.9, 40)
    assert estimate_T(t, 1 / (1 - t), 2.0)[0] == pytest.approx(1.0, abs=1e-12)
    assert estimate_T(t, (16 * (1.5 - t)) ** -0.5, 3.0)[0] == pytest.approx(1.5, abs=1e-12)
    with pytest.raises(ValueError):
        estimate_T(t[:5], 1 / (1 - t[:5]), 2.0)


def test_monotone_violation():
    assert monotone_violation([3, 2, 2, 1]) == 0
    assert monotone_violation([3, 2, 2.5, 1]) == pytest.approx(0.5)


def test_csv_output():
    res = run(make_state([1.0], 16, "1/K"), max_u=1.5, samples=10)
    lines = res.to_csv().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == len(res.series) + 1
    assert all(len(row.split(",")) == len(CSV_COLUMNS) for row in lines[1:])


def test_runs_are_reproducible():
    a = run(make_state([0.95, 0, 0.15], 16, "1/K"), max_u=1.5, samples=10).to_csv()
    b = run(make_state([0.95, 0, 0.15], 16, "1/K"), max_u=1.5, samples=10).to_csv()
    assert a == b
