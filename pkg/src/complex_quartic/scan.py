"""Parameter sweeps that locate closed orbits.

A sweep follows the turning points continuously along a one-dimensional
parameter grid (the phase of b, or the real energy), evaluates Im T_p for
every requested (m, n) at each grid point, brackets sign changes and refines
them with Brent's method. Brackets that straddle a branch cut of K rather
than a genuine zero are discarded by re-checking the residual.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .exceptions import QuarticError
from .periodicity import (
    PeriodicityContext,
    PeriodicSolution,
    context_from_roots,
    escape_attained,
    period,
    pure_quartic_angle,
    pure_quartic_period,
)
from .quartic import (
    LABELINGS,
    QuarticSystem,
    TurningPoints,
    relabel,
    relabel_cyclic,
    solve_turning_points,
    tracked_turning_points,
)

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8
DEDUP_TOL = 1e-8


@dataclass(frozen=True)
class ScanConfig:
    """Settings for theta sweeps (``b = b_r e^{i theta}`` at fixed E) and
    energy sweeps (fixed complex ``b``)."""

    a: float = 1.0
    b_r: float = 1.0
    k: int = 1
    E: float = 1.0
    b: complex = 1 + 1j
    mn_max: int = 3
    grid_points: int = 2000
    refine_tol: float = 1e-10

    def __post_init__(self):
        if self.mn_max < 1:
            raise ValueError("mn_max must be at least 1")
        if self.grid_points < 100:
            raise ValueError("grid_points must be at least 100")
        if self.refine_tol > 1e-8:
            raise ValueError("refine_tol must not exceed 1e-8")
        if self.k not in (1, 2):
            raise ValueError("k must be 1 or 2")


def coprime_pairs(mn_max: int) -> list[tuple[int, int]]:
    """Coprime (m, n) with |m|, |n| <= mn_max, one of each +-(m, n)."""
    pairs = []
    for m in range(0, mn_max + 1):
        for n in range(-mn_max, mn_max + 1):
            if math.gcd(m, n) != 1:
                continue
            if m == 0 and n < 0:
                continue
            pairs.append((m, n))
    return pairs


# -- sweep machinery ---------------------------------------------------------


def _track(make_system: Callable[[float], QuarticSystem], grid: Sequence[float]):
    """Turning points along ``grid`` with labels followed continuously."""
    tracked: list[Optional[TurningPoints]] = []
    ref = None
    for p in grid:
        sys = make_system(p)
        try:
            tp = solve_turning_points(sys) if ref is None else tracked_turning_points(sys, ref)
        except QuarticError as exc:
            log.debug("grid point %r skipped: %s", p, exc)
            tracked.append(None)
            continue
        tracked.append(tp)
        ref = tp.roots
    return tracked


class _Sweep:
    """Contexts along a grid for one labeling of the tracked roots."""

    def __init__(self, make_system, grid, tracked, perm):
        self.make_system = make_system
        self.grid = np.asarray(grid, dtype=float)
        self.perm = perm
        self.contexts: list[Optional[PeriodicityContext]] = []
        z_ref = None
        for p, tp in zip(self.grid, tracked):
            ctx = None
            if tp is not None:
                try:
                    ctx = context_from_roots(relabel(tp, perm), make_system(p).a, z_ref)
                except QuarticError as exc:
                    log.debug("context at %r failed: %s", p, exc)
            if ctx is not None:
                z_ref = ctx.z
            self.contexts.append(ctx)
        self._tracked = tracked

    def context_near(self, i: int, p: float) -> PeriodicityContext:
        """Context at ``p`` following the labels and z sign at grid index i."""
        base = self._tracked[i]
        sys = self.make_system(p)
        tp = tracked_turning_points(sys, base.roots)
        return context_from_roots(relabel(tp, self.perm), sys.a, self.contexts[i].z)

    def imag_period(self, m: int, n: int) -> np.ndarray:
        out = np.full(len(self.grid), np.nan)
        for i, ctx in enumerate(self.contexts):
            if ctx is not None:
                T = period(ctx, m, n)
                out[i] = T.imag / abs(T)
        return out

    def roots_of(self, m: int, n: int, tol: float):
        """Refined parameters where Im T_p(m, n) changes sign."""
        g = self.imag_period(m, n)
        found = []
        for i in range(len(self.grid) - 1):
            g0, g1 = g[i], g[i + 1]
            if not (np.isfinite(g0) and np.isfinite(g1)):
                continue
            if g0 == 0:
                found.append((float(self.grid[i]), self.contexts[i]))
                continue
            if g0 * g1 > 0:
                continue

            def f(p, i=i):
                T = period(self.context_near(i, p), m, n)
                return T.imag / abs(T)

            try:
                p = brentq(f, self.grid[i], self.grid[i + 1], xtol=tol, rtol=4 * np.finfo(float).eps)
                ctx = self.context_near(i, p)
            except (QuarticError, ValueError) as exc:
                log.debug("bracket at %r rejected: %s", self.grid[i], exc)
                continue
            found.append((float(p), ctx))
        return found


def _solutions_from_roots(roots, m, n, labeling, include_escaping):
    sols = []
    for p, ctx in roots:
        T = period(ctx, m, n)
        if abs(T.imag) > RESIDUAL_TOL * abs(T):
            continue
        t_esc = escape_attained(ctx, abs(T.real))
        escapes = t_esc is not None and t_esc < abs(T.real)
        if escapes and not include_escaping:
            log.info("(m, n) = (%d, %d) at %r escapes before one period", m, n, p)
            continue
        sols.append(
            PeriodicSolution(
                m=m,
                n=n,
                located_parameter=p,
                T_p=abs(T.real),
                residual=abs(T.imag),
                labeling=labeling,
                escapes_first=escapes,
                roots=ctx.tp.roots,
            )
        )
    return sols


def _dedupe(sols: Iterable[PeriodicSolution]) -> list[PeriodicSolution]:
    out: list[PeriodicSolution] = []
    for s in sorted(sols, key=lambda s: (s.located_parameter, s.labeling)):
        if any(
            (o.m, o.n) == (s.m, s.n)
            and abs(o.located_parameter - s.located_parameter) <= DEDUP_TOL
            for o in out
        ):
            continue
        out.append(s)
    return out


# -- public scans ------------------------------------------------------------


def theta_grid(grid_points: int) -> np.ndarray:
    """Interior grid on (0, 2*pi)."""
    return (np.arange(grid_points) + 0.5) * (2 * math.pi / grid_points)


def scan_theta(
    cfg: ScanConfig,
    shift: int = 0,
    pairs: Optional[Sequence[tuple[int, int]]] = None,
    labelings: Optional[Sequence[int]] = None,
    include_escaping: bool = False,
) -> list[PeriodicSolution]:
    """Phases theta of b = b_r e^{i theta} with a real (m, n) period at energy E.

    The turning points are followed along the sweep starting from the
    canonical order (cyclically shifted by ``shift``); every labeling in
    ``labelings`` (default: all six) is searched.
    """
    grid = theta_grid(cfg.grid_points)

    def make(theta):
        return QuarticSystem(cfg.a, cfg.b_r * np.exp(1j * theta), cfg.k, cfg.E)

    tracked = _track(make, grid)
    if shift % 4:
        tracked = [None if tp is None else relabel_cyclic(tp, shift) for tp in tracked]
    pairs = coprime_pairs(cfg.mn_max) if pairs is None else pairs
    labelings = range(len(LABELINGS)) if labelings is None else labelings
    sols = []
    for li in labelings:
        sweep = _Sweep(make, grid, tracked, LABELINGS[li])
        for m, n in pairs:
            roots = sweep.roots_of(m, n, cfg.refine_tol)
            sols.extend(_solutions_from_roots(roots, m, n, li, include_escaping))
    return _dedupe(sols)


def discretize_energy_pairs(
    cfg: ScanConfig,
    pairs: Sequence[tuple[int, int]],
    e_range: tuple[float, float] = (-5.0, 5.0),
    labelings: Optional[Sequence[int]] = None,
    include_escaping: bool = False,
) -> dict[tuple[int, int], list[PeriodicSolution]]:
    """Energy scan for several (m, n) sharing one sweep per labeling."""
    e_lo, e_hi = map(float, e_range)
    if not (np.isfinite(e_lo) and np.isfinite(e_hi) and e_lo < e_hi):
        raise ValueError(f"invalid energy range {e_range}")
    grid = np.linspace(e_lo, e_hi, cfg.grid_points)

    def make(E):
        return QuarticSystem(cfg.a, cfg.b, cfg.k, E)

    tracked = _track(make, grid)
    labelings = range(len(LABELINGS)) if labelings is None else labelings
    found: dict[tuple[int, int], list[PeriodicSolution]] = {tuple(p): [] for p in pairs}
    for li in labelings:
        sweep = _Sweep(make, grid, tracked, LABELINGS[li])
        for m, n in pairs:
            roots = sweep.roots_of(m, n, cfg.refine_tol)
            found[(m, n)].extend(_solutions_from_roots(roots, m, n, li, include_escaping))
    return {pair: _dedupe(sols) for pair, sols in found.items()}


def discretize_energy(
    cfg: ScanConfig, m: int, n: int, e_range: tuple[float, float] = (-5.0, 5.0), **kw
) -> list[PeriodicSolution]:
    """Real energies in ``e_range`` for which the (m, n) period of the
    fixed-b system is real, searched over all six labelings."""
    if (m, n) == (0, 0):
        raise ValueError("(m, n) = (0, 0) has no period")
    return discretize_energy_pairs(cfg, [(m, n)], e_range, **kw)[(m, n)]


def duality_check(
    b: complex,
    a: float,
    solutions: Sequence[PeriodicSolution],
    window: float = 1e-2,
    tol: float = 1e-4,
    grid_points: int = 200,
    strict: bool = False,
) -> list[tuple[float, float, bool]]:
    """Look for each periodic energy E of p^2 + a x^4 + b x at -E in the
    dual system p^2 - a x^4 + i conj(b) x.

    The map y = i conj(x) carries orbits of one system onto orbits of the
    other with the same real period, but it conjugates the period lattice,
    so the dual pair is (m, n) or its mirror (m, -n) depending on the
    orientation of the labeling. ``strict=True`` accepts only (m, n).
    """
    dual_b = 1j * np.conj(complex(b))
    out = []
    for s in solutions:
        E = s.located_parameter
        cfg = ScanConfig(a=-a, b=dual_b, k=1, grid_points=grid_points)
        pairs = [(s.m, s.n)] if strict or s.n == 0 else [(s.m, s.n), (s.m, -s.n)]
        found = discretize_energy_pairs(cfg, pairs, (-E - window, -E + window))
        dual = [d for sols in found.values() for d in sols]
        if not dual:
            out.append((E, math.nan, False))
            continue
        gap, dual_E = min((abs(d.located_parameter + E), d.located_parameter) for d in dual)
        out.append((E, dual_E, gap <= tol))
    return out


def pure_quartic_catalog(mn_max: int) -> list[tuple[int, int, float, str]]:
    """(m, n, theta, flag) for every coprime pair; flag is ``"+"`` for the
    Hermitian endpoint n = 0, ``"-"`` for the wrong-sign endpoint m = 0,
    empty otherwise."""
    if mn_max < 1:
        raise ValueError("mn_max must be at least 1")
    rows = []
    for m, n in coprime_pairs(mn_max):
        flag = "+" if n == 0 else "-" if m == 0 else ""
        rows.append((m, n, pure_quartic_angle(m, n), flag))
    return rows


def pure_quartic_rows(mn_max: int, mu_r: float, E: float):
    """Catalog rows extended with the real period."""
    return [
        (m, n, theta, flag, pure_quartic_period(mu_r, E, m, n))
        for m, n, theta, flag in pure_quartic_catalog(mn_max)
    ]
