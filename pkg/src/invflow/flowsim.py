"""Axisymmetric expanding convex surfaces via the support function.

A strictly convex body of revolution about the z axis is described by its
support function ``u(theta)`` on the unit normals, ``theta`` being the polar
angle of the normal.  The principal radii are

    rho1 = u'' + u,        rho2 = u' cot(theta) + u,

and a surface moving outward with normal speed ``G(l1, l2)`` (``l_i = 1/rho_i``)
has ``du/dt = G``.  The grid holds ``N + 1`` nodes on ``[0, pi]`` with
even reflection across both poles.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import minimize_scalar

from .exactpoly import Basis, BivarPoly, RationalFn, ensure_lambda
from .exprio import parse

CSV_COLUMNS = ("t", "max_u", "min_u", "max_w", "max_curv", "pinch",
               "r_plus", "r_minus", "q_z", "est_T")


class ConvexityLost(ArithmeticError):
    pass


class NumericFailure(ArithmeticError):
    pass


# -- float compilation of exact expressions ----------------------------------------


def _compile_poly(p: BivarPoly) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    terms = [(i, j, float(c)) for (i, j), c in p.terms.items()]
    mi = max((i for i, _, _ in terms), default=0)
    mj = max((j for _, j, _ in terms), default=0)

    def ev(x, y):
        xp = [np.ones_like(x)]
        for _ in range(mi):
            xp.append(xp[-1] * x)
        yp = [np.ones_like(y)]
        for _ in range(mj):
            yp.append(yp[-1] * y)
        out = np.zeros_like(x)
        for i, j, c in terms:
            out = out + c * xp[i] * yp[j]
        return out

    return ev


def compile_float(f: RationalFn) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Vectorized float evaluator of a lambda-basis rational function."""
    f = ensure_lambda(f)
    num = _compile_poly(f.num)
    den = _compile_poly(f.den)
    return lambda x, y: num(x, y) / den(x, y)


@dataclass(frozen=True)
class Speed:
    """Expansion speed ``G > 0`` with the pieces the solver needs."""

    G: RationalFn
    g: Callable = field(repr=False, compare=False)
    d1: Callable = field(repr=False, compare=False)      # dG/dl1
    d2: Callable = field(repr=False, compare=False)
    g0: float = 1.0                                      # G(1, 1)
    gamma: float = 1.0                                   # G(1/r, 1/r) = g0 r^gamma

    @classmethod
    def from_expr(cls, G) -> "Speed":
        if isinstance(G, str):
            G = parse(G, "lambda")
        G = ensure_lambda(G)
        if not G.is_symmetric():
            raise ValueError("speed must be symmetric")
        deg = G.homogeneous_degree
        if deg is None:
            raise ValueError("speed must be homogeneous")
        g0 = float(G(1, 1))
        if not g0 > 0:
            raise ValueError("speed must be positive on spheres")
        return cls(G, compile_float(G), compile_float(G.diff(0)), compile_float(G.diff(1)),
                   g0, float(-deg))

    def sphere_radius(self, r0: float, t, T: Optional[float] = None):
        """Radius of the sphere solution ``r' = g0 r^gamma`` with ``r(0) = r0``.

        With ``T`` given, the law is anchored at that blow-up time instead.
        """
        t = np.asarray(t, dtype=float)
        gam, g0 = self.gamma, self.g0
        if gam == 1:
            return r0 * np.exp(g0 * t)
        if T is None:
            T = self.blowup_time(r0)
        return ((gam - 1) * g0 * (T - t)) ** (-1.0 / (gam - 1))

    def blowup_time(self, r0: float) -> float:
        if self.gamma <= 1:
            return math.inf
        return r0 ** (1 - self.gamma) / ((self.gamma - 1) * self.g0)


# -- grid and state ------------------------------------------------------------------


@dataclass(frozen=True)
class FlowState:
    theta: np.ndarray
    u: np.ndarray
    t: float
    speed: Speed

    @property
    def N(self) -> int:
        return len(self.theta) - 1

    @property
    def dtheta(self) -> float:
        return math.pi / self.N

    def with_u(self, u: np.ndarray, t: float) -> "FlowState":
        return replace(self, u=u, t=t)


def theta_grid(N: int) -> np.ndarray:
    if N < 16:
        raise ValueError("N must be at least 16")
    return np.linspace(0.0, math.pi, N + 1)


def make_state(u0, N: int, speed, t: float = 0.0) -> FlowState:
    """``u0`` may be an array on the grid, a callable of theta or cosine coefficients."""
    theta = theta_grid(N)
    if not isinstance(speed, Speed):
        speed = Speed.from_expr(speed)
    if callable(u0):
        u = np.asarray(u0(theta), dtype=float)
    else:
        arr = np.asarray(u0, dtype=float)
        if arr.shape == theta.shape:
            u = arr.copy()
        else:
            u = np.polynomial.polynomial.polyval(np.cos(theta), arr)
    u = np.broadcast_to(u, theta.shape).astype(float)
    state = FlowState(theta, u, t, speed)
    radii(state)          # validates convexity
    return state


_COS_TERM = re.compile(r"cos\s*\(\s*theta\s*\)")


def parse_cosine_series(text: str) -> list[float]:
    """Coefficients ``[a0, a1, ...]`` of a polynomial in ``cos(theta)``."""
    f = parse(_COS_TERM.sub("l1", text), "lambda")
    if not f.is_polynomial() or f.num.degree_in(1) > 0:
        raise ValueError("u0 must be a polynomial in cos(theta)")
    p = f.num.dehomogenize(1)
    scale = 1 / f.den.const_value()
    return [float(c * scale) for c in p.coeffs] or [0.0]


def _derivs(u: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    ext = np.empty(len(u) + 2)
    ext[1:-1] = u
    ext[0] = u[1]                 # even reflection at theta = 0
    ext[-1] = u[-2]               # and at theta = pi
    du = (ext[2:] - ext[:-2]) / (2 * h)
    d2u = (ext[2:] - 2 * u + ext[:-2]) / (h * h)
    return du, d2u


_COT_CACHE: dict[int, np.ndarray] = {}


def _cot(theta: np.ndarray) -> np.ndarray:
    key = len(theta)
    if key not in _COT_CACHE:
        c = np.zeros_like(theta)
        c[1:-1] = 1.0 / np.tan(theta[1:-1])
        _COT_CACHE[key] = c
    return _COT_CACHE[key]


def radii_of(u: np.ndarray, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    h = theta[1] - theta[0]
    du, d2u = _derivs(u, h)
    rho1 = d2u + u
    rho2 = du * _cot(theta) + u
    rho2[0] = rho1[0]
    rho2[-1] = rho1[-1]
    return rho1, rho2


def radii(state: FlowState, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Principal radii ``(rho1, rho2)`` at every node."""
    rho1, rho2 = radii_of(state.u, state.theta)
    if check:
        if not (np.all(np.isfinite(rho1)) and np.all(np.isfinite(rho2))):
            raise NumericFailure(f"non-finite radii at t={state.t}")
        if rho1.min() <= 0 or rho2.min() <= 0:
            raise ConvexityLost(f"convexity lost at t={state.t}")
    return rho1, rho2


principal_radii = radii


def _rhs(u: np.ndarray, theta: np.ndarray, speed: Speed) -> np.ndarray:
    rho1, rho2 = radii_of(u, theta)
    if rho1.min() <= 0 or rho2.min() <= 0:
        raise ConvexityLost("convexity lost inside a Runge-Kutta stage")
    return speed.g(1 / rho1, 1 / rho2)


def stable_dt(state: FlowState, safety: float = 0.2) -> float:
    """``safety * dtheta^2 / max(a1 + a2)`` with ``a_i = -dG/dl_i * l_i^2``.

    ``a_i`` is the coefficient of ``u''`` in the linearized equation; the sum
    covers the pole nodes, where both radii depend on ``u''``.
    """
    rho1, rho2 = radii(state)
    l1, l2 = 1 / rho1, 1 / rho2
    a = np.abs(state.speed.d1(l1, l2)) * l1 ** 2 + np.abs(state.speed.d2(l1, l2)) * l2 ** 2
    amax = float(a.max())
    if not math.isfinite(amax) or amax <= 0:
        raise NumericFailure("degenerate diffusion coefficient")
    return safety * state.dtheta ** 2 / amax


def step(state: FlowState, dt: float) -> FlowState:
    """One classical RK4 step of ``du/dt = G``."""
    th, sp, u = state.theta, state.speed, state.u
    k1 = _rhs(u, th, sp)
    k2 = _rhs(u + 0.5 * dt * k1, th, sp)
    k3 = _rhs(u + 0.5 * dt * k2, th, sp)
    k4 = _rhs(u + dt * k3, th, sp)
    new = u + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(new)):
        raise NumericFailure(f"non-finite support function at t={state.t + dt}")
    out = state.with_u(new, state.t + dt)
    radii(out)
    return out


# -- observables -------------------------------------------------------------------


@dataclass(frozen=True)
class Observables:
    t: float
    max_u: float
    min_u: float
    max_w: float
    max_curv: float
    pinch: float
    r_plus: float
    r_minus: float
    q_z: float
    rho_plus: float
    rho_minus: float
    max_gap: float             # max |l1 - l2|
    max_K: float
    osc_u: float

    def row(self, est_T: float) -> list[float]:
        return [self.t, self.max_u, self.min_u, self.max_w, self.max_curv, self.pinch,
                self.r_plus, self.r_minus, self.q_z, est_T]


def pseudocenter_z(state: FlowState) -> float:
    """Height of the pseudocenter, ``(1/2) int_0^pi (u cos - u' sin) sin dtheta``.

    Integrating the ``u'`` term by parts leaves ``(3/2) int u cos sin``,
    which Simpson's rule handles without a finite-difference derivative.
    """
    th = state.theta
    return 1.5 * float(simpson(state.u * np.cos(th) * np.sin(th), x=th))


def embedding(state: FlowState) -> tuple[np.ndarray, np.ndarray]:
    """Profile curve ``(r, z)`` of ``X = u nu + grad u``."""
    du, _ = _derivs(state.u, state.dtheta)
    th = state.theta
    return (state.u * np.sin(th) + du * np.cos(th),
            state.u * np.cos(th) - du * np.sin(th))


def _radius_about(u: np.ndarray, cos: np.ndarray, outer: bool) -> float:
    span = float(u.max() - u.min()) + 1e-12
    if outer:
        fun = lambda c: float(np.max(u - c * cos))
    else:
        fun = lambda c: -float(np.min(u - c * cos))
    res = minimize_scalar(fun, bounds=(-span, span), method="bounded",
                          options={"xatol": 1e-12 * max(1.0, span)})
    return res.fun if outer else -res.fun


def observables(state: FlowState, w: Optional[Callable] = None) -> Observables:
    rho1, rho2 = radii(state)
    l1, l2 = 1 / rho1, 1 / rho2
    u = state.u
    cos = np.cos(state.theta)
    qz = pseudocenter_z(state)
    shifted = u - qz * cos
    max_w = float(np.max(w(l1, l2))) if w is not None else float("nan")
    return Observables(
        t=state.t,
        max_u=float(u.max()),
        min_u=float(u.min()),
        max_w=max_w,
        max_curv=float(np.maximum(l1, l2).max()),
        pinch=float(np.maximum(rho1 / rho2, rho2 / rho1).max()),
        r_plus=float(shifted.max()),
        r_minus=float(shifted.min()),
        q_z=qz,
        rho_plus=_radius_about(u, cos, True),
        rho_minus=_radius_about(u, cos, False),
        max_gap=float(np.abs(l1 - l2).max()),
        max_K=float((l1 * l2).max()),
        osc_u=float(u.max() - u.min()),
    )


# -- driver -------------------------------------------------------------------------


@dataclass
class RunResult:
    series: list[Observables]
    final: FlowState
    steps: int
    stop_reason: str
    T_hat: float = math.nan
    T_residual: float = math.nan

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(o, name) for o in self.series])

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(CSV_COLUMNS)
        for o in self.series:
            wr.writerow([f"{v:.12g}" for v in o.row(self.T_hat)])
        return buf.getvalue()


def run(state: FlowState, max_u: Optional[float] = None, max_steps: int = 2_000_000,
        w: Optional[RationalFn] = None, samples: int = 400, safety: float = 0.2,
        t_end: Optional[float] = None) -> RunResult:
    """Integrate until ``max(u) >= max_u``, ``t >= t_end`` or ``max_steps``.

    Observables are recorded at evenly spaced values of ``log max(u)`` (or
    of t when only ``t_end`` is given), which keeps the sampling dense near
    the blow-up.
    """
    if max_u is None and t_end is None:
        raise ValueError("need a stop rule")
    wf = compile_float(w) if w is not None else None
    u_start = float(state.u.max())
    series = [observables(state, wf)]
    if max_u is not None:
        marks = np.exp(np.linspace(math.log(u_start), math.log(max_u), samples + 1))[1:]
        key = lambda s: float(s.u.max())
    else:
        marks = np.linspace(state.t, t_end, samples + 1)[1:]
        key = lambda s: s.t
    k = 0
    steps = 0
    reason = "max_steps"
    while steps < max_steps:
        dt = stable_dt(state, safety)
        if t_end is not None and state.t + dt > t_end:
            dt = t_end - state.t
        state = step(state, dt)
        steps += 1
        while k < len(marks) and key(state) >= marks[k] * (1 - 1e-12):
            series.append(observables(state, wf))
            k += 1
        if max_u is not None and state.u.max() >= max_u:
            reason = "max_u"
            break
        if t_end is not None and state.t >= t_end - 1e-15:
            reason = "t_end"
            break
    if series[-1].t != state.t:
        series.append(observables(state, wf))
    result = RunResult(series, state, steps, reason)
    if state.speed.gamma != 1 and len(series) >= 8:
        result.T_hat, result.T_residual = estimate_T(result.column("t"), result.column("max_u"),
                                                     state.speed.gamma)
    elif state.speed.gamma == 1:
        result.T_hat = math.inf
    return result


def estimate_T(t: Sequence[float], max_u: Sequence[float], gamma: float) -> tuple[float, float]:
    """Blow-up time from a least-squares line through ``max_u^(1-gamma)`` vs t.

    Uses the final quarter of the samples (at least 8).  Returns the zero
    crossing and the root-mean-square residual of the fit.
    """
    t = np.asarray(t, dtype=float)
    m = np.asarray(max_u, dtype=float)
    if gamma == 1:
        return math.inf, 0.0
    n = len(t)
    k = max(8, n // 4)
    if n < 8:
        raise ValueError("need at least 8 samples")
    if np.any(np.diff(m[-k:]) < 0):
        raise NumericFailure("max u is not increasing")
    y = m[-k:] ** (1 - gamma)
    A = np.vstack([t[-k:], np.ones(k)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ np.array([slope, icpt]) - y) ** 2)))
    return float(-icpt / slope), resid


# -- derived diagnostics ----------------------------------------------------------------


def sphere_reference(result: RunResult, r0: float) -> np.ndarray:
    """Analytic sphere radius at the recorded times."""
    return result.final.speed.sphere_radius(r0, result.column("t"))


def rescaled_osc(result: RunResult) -> np.ndarray:
    """``osc(u / r_s(t))`` with the sphere law anchored at the estimated T."""
    sp = result.final.speed
    t = result.column("t")
    osc = result.column("osc_u")
    if sp.gamma == 1:
        scale = np.exp(sp.g0 * t)
    else:
        scale = sp.sphere_radius(1.0, t, result.T_hat)
    return osc / scale


def monotone_violation(series: np.ndarray) -> float:
    """Largest increase between consecutive samples (0 if non-increasing)."""
    d = np.diff(np.asarray(series, dtype=float))
    return float(max(0.0, d.max())) if len(d) else 0.0


def loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    if ok.sum() < 3:
        return math.nan
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])


@dataclass(frozen=True)
class ConvergenceReport:
    radius_slope: float       # log-log slope of r_plus/r_s - 1 against (T - t)
    gap_slope: float          # log-log slope of max|l1 - l2| against max K
    gap_ratio_final: float    # max|l1 - l2| / K^(5/4) at the last sample
    gap_ratio_max: float


def convergence_report(result: RunResult) -> ConvergenceReport:
    """Exploratory rates; nothing here is asserted."""
    sp = result.final.speed
    t = result.column("t")
    rp = result.column("r_plus")
    gap = result.column("max_gap")
    K = result.column("max_K")
    half = len(t) // 2
    if sp.gamma == 1:
        dist = np.exp(-sp.g0 * t)
        rs = np.exp(sp.g0 * t)
        ratio = rp / rs
        # only the shape is meaningful for exponential growth
        excess = np.abs(ratio / ratio[-1] - 1)
    else:
        dist = result.T_hat - t
        rs = sp.sphere_radius(1.0, t, result.T_hat)
        excess = np.abs(rp / rs - 1)
    ratio_g = gap / K ** 1.25
    return ConvergenceReport(
        radius_slope=loglog_slope(dist[half:-1], excess[half:-1]),
        gap_slope=loglog_slope(K[half:], gap[half:]),
        gap_ratio_final=float(ratio_g[-1]),
        gap_ratio_max=float(ratio_g.max()),
    )
