"""Periods, escape times and the real-period condition for quartic systems.

With the labeling (x0, x1, x2, x3) of the turning points, the trajectory that
starts at rest on x1 is a rational function of sn(i*z*t | kappa^2), where

    z**2     = a (x0 - x2)(x1 - x3)
    kappa**2 = (x1 - x2)(x0 - x3) / ((x0 - x2)(x1 - x3)).

Time shifts by ``(4 m K + 2 n i K') / (i z)`` leave the motion unchanged, so a
pair (m, n) produces a closed real-time orbit exactly when that quantity is
real.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from .elliptic import EllipticData, complete_K, inverse_sn
from .exceptions import DegenerateRatio
from .quartic import QuarticSystem, TurningPoints, relabel, solve_turning_points

_RATIO_TOL = 1e-14
_REAL_SNAP = 1e-13


@dataclass(frozen=True)
class PeriodicityContext:
    tp: TurningPoints
    z: complex
    ell: EllipticData
    z0: complex
    a: complex = 1.0


@dataclass(frozen=True)
class PeriodicSolution:
    """A located periodic orbit.

    ``located_parameter`` is the phase angle of b for theta scans and the real
    energy for energy scans. ``labeling`` indexes :data:`quartic.LABELINGS`
    and ``roots`` holds the turning points in the labeling that was used.
    """

    m: int
    n: int
    located_parameter: float
    T_p: float
    residual: float
    labeling: int = 0
    escapes_first: bool = False
    roots: Optional[tuple] = None

    @property
    def r(self) -> float:
        return self.n / self.m if self.m else math.inf


def context_from_roots(tp: TurningPoints, a: complex, z_ref: Optional[complex] = None):
    """Assemble the elliptic data for one labeling of the turning points.

    ``z_ref`` selects the sign of z closest to a previous value, which keeps
    z continuous along a parameter sweep.
    """
    x0, x1, x2, x3 = tp.roots
    d02, d13, d12 = x0 - x2, x1 - x3, x1 - x2
    z = cmath.sqrt(a * d02 * d13)
    if z_ref is not None and (z * z_ref.conjugate()).real < 0:
        z = -z
    kappa_sq = d12 * (x0 - x3) / (d02 * d13)
    if abs(kappa_sq.imag) <= _REAL_SNAP * abs(kappa_sq):
        # rounding noise must not pick the side of the cut of K or K'
        kappa_sq = complex(kappa_sq.real, 0.0)
    ell = EllipticData.from_parameter(kappa_sq)
    z0 = cmath.sqrt(d02 / d12)
    return PeriodicityContext(tp=tp, z=z, ell=ell, z0=z0, a=complex(a))


def build_context(sys: QuarticSystem, labeling=None) -> PeriodicityContext:
    """Context for ``sys`` using the canonical turning-point order.

    ``labeling`` is an optional permutation applied to the canonical order.
    """
    tp = solve_turning_points(sys)
    if labeling is not None:
        tp = relabel(tp, labeling)
    return context_from_roots(tp, sys.a)


def period(ctx: PeriodicityContext, m, n) -> complex:
    """Complex period (4 m K + 2 n i K') * (-i) / z."""
    return -1j * (4 * m * ctx.ell.K + 2j * n * ctx.ell.K_prime) / ctx.z


def escape_time(ctx: PeriodicityContext) -> complex:
    """Principal escape time sn^{-1}(z0) * (-i) / z (motion starting at x1)."""
    return -1j * inverse_sn(ctx.z0, ctx.ell.kappa_sq) / ctx.z


def escape_attained(
    ctx: PeriodicityContext, t_max: float, rtol: float = 1e-8
) -> Optional[float]:
    """First real time in (0, t_max] at which the trajectory reaches infinity.

    The denominator of the trajectory vanishes where sn(u)**2 = z0**2, i.e. at
    u = +-u0 + 2jK + 2l iK'. Returns None if no such point lies on the
    real-time ray u = i z t within the window.
    """
    u0 = inverse_sn(ctx.z0, ctx.ell.kappa_sq)
    w1 = 2 * ctx.ell.K
    w2 = 2j * ctx.ell.K_prime
    basis = np.array([[w1.real, w2.real], [w1.imag, w2.imag]])
    ray_end = 1j * ctx.z * t_max
    rc = np.linalg.solve(basis, [ray_end.real, ray_end.imag])
    hits = []
    for sign in (1, -1):
        c0 = np.linalg.solve(basis, [sign * u0.real, sign * u0.imag])
        j_range = range(
            math.floor(min(0.0, rc[0]) - c0[0]) - 1, math.ceil(max(0.0, rc[0]) - c0[0]) + 2
        )
        l_range = range(
            math.floor(min(0.0, rc[1]) - c0[1]) - 1, math.ceil(max(0.0, rc[1]) - c0[1]) + 2
        )
        for j in j_range:
            for l in l_range:
                t = (sign * u0 + j * w1 + l * w2) / (1j * ctx.z)
                if 0 < t.real <= t_max and abs(t.imag) <= rtol * max(1.0, abs(t)):
                    hits.append(t.real)
    return min(hits) if hits else None


def rationality_ratio(ctx: PeriodicityContext) -> float:
    """r = Im[2iK/z] / Im[K'/z]; period(m, n) is real iff n/m = r."""
    den = (ctx.ell.K_prime / ctx.z).imag
    if abs(den) < _RATIO_TOL * max(1.0, abs(ctx.ell.K_prime / ctx.z)):
        raise DegenerateRatio("Im[K'/z] vanishes; only n = 0 can be real")
    return (2j * ctx.ell.K / ctx.z).imag / den


def convergents(x: float) -> Iterator[Fraction]:
    """Continued-fraction convergents of ``x``."""
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    frac = Fraction(x)
    while True:
        a = math.floor(frac)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield Fraction(h1, k1)
        rem = frac - a
        if rem == 0:
            return
        frac = 1 / rem


def rational_approximation(r: float, max_den: int = 50, tol: float = 1e-4):
    """(m, n) with n/m the first convergent of r within ``tol``, or None."""
    for c in convergents(r):
        if c.denominator > max_den:
            return None
        if abs(r - c) <= tol:
            return c.denominator, c.numerator
    return None


def pure_quartic_angle(m: int, n: int) -> float:
    """Phase of mu for which p**2 + mu*x**4 has a real (m, n) period.

    Returns 4*arctan(n / (2m + n)) in (-2*pi, 2*pi].
    """
    if m == 0 and n == 0:
        raise ValueError("(m, n) = (0, 0) has no period")
    den = 2 * m + n
    if den == 0:
        return 2 * math.pi
    return 4 * math.atan(n / den)


def pure_quartic_period(mu_r: float, E: float, m: int, n: int) -> float:
    """Real period of p**2 + mu_r e^{i theta} x**4 at energy E for the pair (m, n).

    Uses the lemniscatic K = K(-1); the angle is the quantized one, so the
    imaginary part vanishes identically.
    """
    if mu_r <= 0 or E <= 0:
        raise ValueError("mu_r and E must be positive")
    theta = pure_quartic_angle(m, n)
    K = complete_K(-1.0).real
    q = theta / 4
    scale = K / (mu_r * E) ** 0.25
    re = (2 * m + n) * math.cos(q) + n * math.sin(q)
    return abs(scale * re)


def pure_quartic_period_complex(mu_r: float, E: float, m: int, n: int, theta: float):
    """Full complex (2mK + n i K') / (mu E)^{1/4} for an arbitrary angle."""
    K = complete_K(-1.0)
    Kp = K * (1 - 1j)
    mu_quarter = (mu_r * E) ** 0.25 * cmath.exp(1j * theta / 4)
    return (2 * m * K + 1j * n * Kp) / mu_quarter
