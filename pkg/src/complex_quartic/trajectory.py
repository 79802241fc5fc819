"""Real-time trajectories from the closed-form solution and from Hamilton's equations.

The two generators are independent: one evaluates the elliptic-function
solution, the other integrates

    dx/dt = 2 p,    dp/dt = -(4 a x**3 + k b x**(k-1))

with an embedded Runge-Kutta pair. Each is used to check the other.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import minimize_scalar

from .elliptic import ellipj_fraction
from .exceptions import Blowup, InsufficientSpan, PoleProximity, StepUnderflow
from .periodicity import PeriodicityContext
from .quartic import QuarticSystem, solve_turning_points

CLOSURE_TOL = 1e-6
BLOWUP_FACTOR = 1e6
STEP_FLOOR = 1e-14


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    system: QuarticSystem
    measured_period: Optional[float] = None
    closed: bool = False
    max_energy_drift: float = 0.0
    method: str = field(default="ode")

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.x) + np.abs(self.p)))

    def energy_drift(self) -> float:
        E = self.system.E
        H = self.system.hamiltonian(self.x, self.p)
        return float(np.max(np.abs(H - E)) / max(1.0, abs(E)))


def _closed_form(ctx: PeriodicityContext, u):
    x0, x1, x2, _ = ctx.tp.roots
    A = x1 * (x0 - x2)
    B = x0 * (x1 - x2)
    C = x0 - x2
    D = x1 - x2
    s, c, d, q = ellipj_fraction(u, ctx.ell.kappa_sq)
    q2 = q * q
    s2 = s * s
    den = C * q2 - D * s2
    norm = np.abs(C) * np.abs(q2) + np.abs(D) * np.abs(s2)
    if np.any(np.abs(den) < 1e-8 * norm):
        raise PoleProximity("trajectory denominator vanishes at a requested point")
    x = (A * q2 - B * s2) / den
    # dx/d(sn^2) = (A D - B C) / (C - D sn^2)^2 and d(sn^2)/du = 2 sn cn dn
    dxdu = (A * D - B * C) * 2 * s * c * d * q / den**2
    return x, dxdu


def position_at(ctx: PeriodicityContext, u) -> np.ndarray:
    """x as a function of the sn argument u (u = i z t on real time)."""
    return _closed_form(ctx, u)[0]


def analytic_trajectory(
    ctx: PeriodicityContext, sys: QuarticSystem, t_grid
) -> Trajectory:
    """Evaluate the closed-form motion starting at rest on turning point x1.

    x(t) = (x1 (x0 - x2) - x0 (x1 - x2) sn^2) / ((x0 - x2) - (x1 - x2) sn^2)
    with sn = sn(i z t | kappa^2); p is half the time derivative.
    """
    t = np.asarray(t_grid, dtype=float)
    x, dxdu = _closed_form(ctx, 1j * ctx.z * t)
    p = dxdu * (1j * ctx.z) / 2
    traj = Trajectory(t=t, x=x, p=p, system=sys, method="analytic")
    traj.max_energy_drift = traj.energy_drift()
    return traj


def _rhs(sys: QuarticSystem):
    def f(_t, y):
        x = y[0] + 1j * y[1]
        p = y[2] + 1j * y[3]
        dx = 2 * p
        dp = sys.force(x)
        return [dx.real, dx.imag, dp.real, dp.imag]

    return f


def ode_trajectory(
    sys: QuarticSystem,
    x0: complex,
    p0: complex,
    t_end: float,
    dt_max: float = np.inf,
    t_eval=None,
    rtol: float = 1e-13,
    atol: float = 1e-13,
) -> Trajectory:
    """Integrate Hamilton's equations from (x0, p0) over [0, t_end].

    Samples are the accepted steps unless ``t_eval`` is given, in which case
    the dense output is evaluated there. The energy drift is measured on
    every accepted step and every sample.
    """
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    x0, p0 = complex(x0), complex(p0)
    h0 = sys.hamiltonian(x0, p0)
    if abs(h0 - sys.E) > 1e-10 * max(1.0, abs(sys.E)):
        raise ValueError(f"initial point has energy {h0}, expected {sys.E}")

    limit = BLOWUP_FACTOR * max(1.0, abs(x0) + abs(p0))

    def escape(_t, y):
        return limit - np.hypot(y[0], y[1])

    escape.terminal = True

    sol = solve_ivp(
        _rhs(sys),
        (0.0, float(t_end)),
        [x0.real, x0.imag, p0.real, p0.imag],
        method="DOP853",
        rtol=rtol,
        atol=atol,
        max_step=dt_max,
        dense_output=t_eval is not None,
        events=escape,
    )
    if sol.status == -1:
        raise StepUnderflow(sol.message)
    if sol.status == 1:
        raise Blowup(f"|x| exceeded {limit:.3g} at t = {sol.t_events[0][0]:.6g}")

    steps_x = sol.y[0] + 1j * sol.y[1]
    steps_p = sol.y[2] + 1j * sol.y[3]
    if len(sol.t) > 1 and np.min(np.diff(sol.t)) < STEP_FLOOR:
        raise StepUnderflow("accepted step below 1e-14")

    if t_eval is None:
        t, x, p = sol.t, steps_x, steps_p
    else:
        t = np.asarray(t_eval, dtype=float)
        y = sol.sol(t)
        x = y[0] + 1j * y[1]
        p = y[2] + 1j * y[3]
    traj = Trajectory(t=t, x=x, p=p, system=sys, method="ode")
    step_traj = Trajectory(t=sol.t, x=steps_x, p=steps_p, system=sys)
    traj.max_energy_drift = max(traj.energy_drift(), step_traj.energy_drift())
    return traj


def _splines(traj: Trajectory):
    dx = 2 * traj.p
    dp = traj.system.force(traj.x)
    return CubicHermiteSpline(traj.t, traj.x, dx), CubicHermiteSpline(traj.t, traj.p, dp)


def _return_distance(traj: Trajectory, sx, sp, t: float) -> float:
    idx = np.searchsorted(traj.t, t)
    if idx < len(traj.t) and traj.t[idx] == t:
        xt, pt = traj.x[idx], traj.p[idx]
    else:
        xt, pt = sx(t), sp(t)
    return float(abs(xt - traj.x[0]) + abs(pt - traj.p[0]))


def closure_residual(traj: Trajectory, T: float) -> float:
    """Phase-space return distance at time T relative to the trajectory scale."""
    sx, sp = _splines(traj)
    return _return_distance(traj, sx, sp, T) / traj.scale


def detect_closure(traj: Trajectory, candidate_period: float):
    """Decide whether ``traj`` returns to its start after ``candidate_period``.

    Returns ``(closed, measured_period)``. The period is refined by
    minimising the squared return distance within +-2% of the candidate.
    """
    T = float(candidate_period)
    if traj.t[-1] < 1.1 * T:
        raise InsufficientSpan(
            f"trajectory ends at t = {traj.t[-1]:.6g}, need {1.1 * T:.6g}"
        )
    sx, sp = _splines(traj)
    scale = traj.scale
    closed = _return_distance(traj, sx, sp, T) <= CLOSURE_TOL * scale

    def sq(t):
        return float(abs(sx(t) - traj.x[0]) ** 2 + abs(sp(t) - traj.p[0]) ** 2)

    res = minimize_scalar(
        sq, bounds=(0.98 * T, 1.02 * T), method="bounded", options={"xatol": 1e-12 * T}
    )
    return closed, float(res.x)


def mark_closure(traj: Trajectory, candidate_period: float) -> Trajectory:
    closed, measured = detect_closure(traj, candidate_period)
    return replace(traj, closed=closed, measured_period=measured)


def pure_quartic_closure(
    mu: complex, E: float, T: float, rtol: float = 1e-12, atol: float = 1e-12
) -> tuple[float, complex]:
    """Closure residual of p**2 + mu x**4 at energy E after time T.

    The motion starts at rest on the principal turning point (E/mu)**(1/4).
    If that orbit runs off to infinity first, the remaining turning points
    are tried in order of increasing argument. Returns ``(residual, start)``.
    """
    sys_ = QuarticSystem(mu, 0.0, 1, E)
    principal = (E / complex(mu)) ** 0.25
    roots = solve_turning_points(sys_).as_array()
    i0 = int(np.argmin(np.abs(roots - principal)))
    ang = np.angle(roots / roots[i0]) % (2 * np.pi)
    last: Optional[Exception] = None
    for idx in np.argsort(ang, kind="stable"):
        x0 = complex(roots[idx])
        try:
            traj = ode_trajectory(sys_, x0, 0.0, 1.15 * T, rtol=rtol, atol=atol)
        except Blowup as exc:
            last = exc
            continue
        return closure_residual(traj, T), x0
    raise last
