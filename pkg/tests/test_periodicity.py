import math
from fractions import Fraction

import numpy as np
import pytest

from complex_quartic.elliptic import EllipticData, complete_K
from complex_quartic.exceptions import Blowup, DegenerateRatio
from complex_quartic.periodicity import (
    PeriodicityContext,
    PeriodicSolution,
    build_context,
    context_from_roots,
    convergents,
    escape_attained,
    escape_time,
    period,
    pure_quartic_angle,
    pure_quartic_period,
    pure_quartic_period_complex,
    rational_approximation,
    rationality_ratio,
)
from complex_quartic.quartic import LABELINGS, QuarticSystem, TurningPoints, relabel_cyclic, solve_turning_points
from complex_quartic.trajectory import ode_trajectory

from conftest import LEMNISCATE_K


def contexts(sys):
    return [build_context(sys, perm) for perm in LABELINGS]


# -- context ------------------------------------------------------------------


def test_context_pure_quartic_definitions():
    ctx = build_context(QuarticSystem(1, 0, 1, 1))
    x0, x1, x2, x3 = ctx.tp
    assert ctx.z**2 == pytest.approx((x0 - x2) * (x1 - x3), rel=1e-14)
    assert ctx.ell.kappa_sq == pytest.approx((x1 - x2) * (x0 - x3) / ((x0 - x2) * (x1 - x3)), rel=1e-14)
    assert ctx.z0**2 == pytest.approx((x0 - x2) / (x1 - x2), rel=1e-14)


def test_context_from_independent_roots():
    sys = QuarticSystem(1, 1 + 1j, 1, 0.27499)
    ctx = build_context(sys)
    # independent root solve: companion matrix eigenvalues
    comp = np.diag(np.ones(3, dtype=complex), -1)
    comp[:, -1] = -sys.coefficients[::-1][:-1] / sys.a
    eig = np.linalg.eigvals(comp)
    for x in ctx.tp:
        assert np.min(np.abs(eig - x)) < 1e-10
    x0, x1, x2, x3 = ctx.tp
    assert abs(ctx.z**2 - (x0 - x2) * (x1 - x3)) < 1e-10
    k2 = (x1 - x2) * (x0 - x3) / ((x0 - x2) * (x1 - x3))
    assert abs(ctx.ell.kappa_sq - k2) < 1e-10 * abs(k2)


def test_shift_by_two_preserves_modulus():
    sys = QuarticSystem(1, 0.4 - 1.2j, 2, 0.9)
    tp = solve_turning_points(sys)
    c0 = context_from_roots(tp, sys.a)
    c2 = context_from_roots(relabel_cyclic(tp, 2), sys.a)
    assert abs(c0.ell.kappa_sq - c2.ell.kappa_sq) < 1e-13
    assert abs(c0.z**2 - c2.z**2) < 1e-13


@pytest.mark.parametrize("b,E", [(1 + 1j, 0.3), (2 - 1j, -0.7), (0.3 + 2j, 1.5)])
def test_shift_by_one_exchanges_K_and_K_prime(b, E):
    sys = QuarticSystem(1, b, 1, E)
    tp = solve_turning_points(sys)
    c0 = context_from_roots(tp, sys.a)
    c1 = context_from_roots(relabel_cyclic(tp, 1), sys.a)
    assert abs(c1.ell.kappa_sq - (1 - c0.ell.kappa_sq)) < 1e-12
    for m, n in [(1, 0), (0, 1), (2, 3), (-1, 4)]:
        T1 = period(c1, m, n)
        T0 = period(c0, n / 2, -2 * m)
        assert min(abs(T1 - T0), abs(T1 + T0)) <= 1e-12 * abs(T1)


def test_z_sign_follows_reference():
    sys = QuarticSystem(1, 1 + 1j, 1, 0.5)
    tp = solve_turning_points(sys)
    c = context_from_roots(tp, sys.a)
    flipped = context_from_roots(tp, sys.a, z_ref=-c.z)
    assert flipped.z == -c.z


def test_near_real_modulus_is_snapped():
    # rounding-level imaginary parts must not pick a side of the cut
    ctx = context_from_roots(TurningPoints((1 + 1e-15j, 2, 3, 4)), 1.0)
    assert ctx.ell.kappa_sq == 0.75 and ctx.ell.kappa_sq.imag == 0.0
    ctx = context_from_roots(TurningPoints((1, 2, 3, 4 + 1e-6j)), 1.0)
    assert ctx.ell.kappa_sq.imag != 0.0


# -- period -------------------------------------------------------------------


def test_period_linear():
    ctx = build_context(QuarticSystem(1, 1 + 1j, 2, 0.3))
    assert period(ctx, 3, -1) + period(ctx, -1, 4) == pytest.approx(period(ctx, 2, 3), rel=1e-14)
    assert period(ctx, 4, 6) == pytest.approx(2 * period(ctx, 2, 3), rel=1e-15)


def test_period_pure_quartic_hermitian():
    T = period(build_context(QuarticSystem(1, 0, 1, 1)), 1, 0)
    assert abs(abs(T.real) - 2 * LEMNISCATE_K) < 1e-12
    # (1, -2) is real: two traversals of the real oscillation through x = 1
    assert abs(period(build_context(QuarticSystem(1, 0, 1, 1)), 1, -2) + 4 * LEMNISCATE_K) < 1e-12


@pytest.mark.parametrize("k,m,n,E", [(1, 1, 2, 0.71624), (1, 1, 1, 0.27499), (2, 3, 2, 0.81963)])
def test_reference_energy_makes_period_nearly_real(k, m, n, E):
    sys = QuarticSystem(1, 1 + 1j, k, E)
    best = min(abs(period(c, m, n).imag) / abs(period(c, m, n)) for c in contexts(sys))
    assert best <= 1e-3


# -- rationality ratio --------------------------------------------------------


@pytest.mark.parametrize("k,E,r", [(1, 0.27499, 1.0), (2, 1.45802, 0.5)])
def test_ratio_reference_values(k, E, r):
    sys = QuarticSystem(1, 1 + 1j, k, E)
    assert min(abs(rationality_ratio(c) - r) for c in contexts(sys)) < 1e-3


def test_ratio_defines_real_period():
    ctx = build_context(QuarticSystem(1, 0.6 + 1.1j, 1, 0.4))
    r = rationality_ratio(ctx)
    for eps in (1e-12, -1e-12, 0.0):
        T = period(ctx, 1, r + eps)
        assert abs(T.imag) <= 1e-8 * abs(T)


def test_ratio_degenerate():
    ell = EllipticData.from_parameter(0.5)
    tp = TurningPoints((1, 1j, -1, -1j))
    ctx = PeriodicityContext(tp=tp, z=1.0 + 0j, ell=ell, z0=1.0 + 0j)
    with pytest.raises(DegenerateRatio):
        rationality_ratio(ctx)


def test_convergents_of_pi():
    cs = list(zip(range(4), convergents(math.pi)))
    assert [c for _, c in cs] == [Fraction(3), Fraction(22, 7), Fraction(333, 106), Fraction(355, 113)]


def test_convergents_terminate_for_rationals():
    assert list(convergents(0.75))[-1] == Fraction(3, 4)


def test_rational_approximation():
    assert rational_approximation(0.5) == (2, 1)
    assert rational_approximation(-1.5000001) == (2, -3)
    assert rational_approximation(math.pi, max_den=50, tol=1e-4) is None
    assert rational_approximation(math.pi, max_den=200, tol=1e-4) == (106, 333)
    assert rational_approximation(math.pi, max_den=200, tol=1e-6) == (113, 355)


def test_solution_ratio():
    assert PeriodicSolution(2, 1, 0.0, 1.0, 0.0).r == 0.5
    assert PeriodicSolution(0, 1, 0.0, 1.0, 0.0).r == math.inf


# -- escape -------------------------------------------------------------------


def test_escape_not_attained_for_periodic_reference_orbit():
    sys = QuarticSystem(1, 1 + 1j, 1, 0.27499416447154795)
    for ctx in contexts(sys):
        T = period(ctx, 1, 1)
        if abs(T.imag) <= 1e-8 * abs(T):
            break
    T = abs(T.real)
    assert escape_attained(ctx, 5 * T) is None
    assert abs(escape_time(ctx).imag) > 1e-3
    traj = ode_trajectory(sys, ctx.tp[1], 0.0, 5 * T)
    assert traj.t[-1] == pytest.approx(5 * T)


def test_escape_time_matches_ode_blowup():
    # starting at rest on x = i the quartic oscillator runs off along the imaginary axis
    sys = QuarticSystem(1, 0, 1, 1)
    ctx = build_context(sys)
    assert ctx.tp[1] == pytest.approx(1j)
    t_esc = escape_attained(ctx, 2.0)
    assert t_esc is not None
    with pytest.raises(Blowup):
        ode_trajectory(sys, ctx.tp[1], 0.0, 2.0)
    # the pole is reached where |x| diverges; the ODE stops just before it
    traj = ode_trajectory(sys, ctx.tp[1], 0.0, t_esc * (1 - 1e-4))
    assert np.max(np.abs(traj.x)) > 100
    with pytest.raises(Blowup):
        ode_trajectory(sys, ctx.tp[1], 0.0, t_esc * (1 + 1e-4))


# -- pure quartic -------------------------------------------------------------


def test_pure_quartic_angle_examples():
    assert pure_quartic_angle(1, 0) == 0
    assert pure_quartic_angle(0, 1) == pytest.approx(math.pi, abs=1e-15)
    assert pure_quartic_angle(1, 1) == pytest.approx(4 * math.atan(1 / 3), abs=1e-15)
    assert pure_quartic_angle(1, -2) == pytest.approx(2 * math.pi)
    with pytest.raises(ValueError):
        pure_quartic_angle(0, 0)


def test_pure_quartic_cotangent_form():
    for m in range(-20, 21):
        for n in range(-20, 21):
            if n == 0 or 2 * m + n == 0:
                continue
            theta = pure_quartic_angle(m, n)
            assert abs(m / n - (1 / math.tan(theta / 4) - 1) / 2) <= 1e-12 * max(1, abs(m / n))


def test_pure_quartic_period_values():
    assert pure_quartic_period(1, 1, 1, 0) == pytest.approx(2 * LEMNISCATE_K, abs=1e-12)
    assert pure_quartic_period(1, 1, 1, 0) == pytest.approx(2.6220576, abs=1e-7)
    assert pure_quartic_period(1, 1, 0, 1) == pytest.approx(2 * LEMNISCATE_K / math.sqrt(2), abs=1e-12)
    assert pure_quartic_period(1, 1, 0, 1) == pytest.approx(1.8540747, abs=1e-7)
    for mu in (0.3, 1.0, 7.0):
        for E in (0.5, 2.0):
            assert abs(pure_quartic_period(4 * mu, E, 1, 0) - pure_quartic_period(mu, E, 0, 1)) <= 1e-12


def test_pure_quartic_period_is_real_and_positive():
    for m in range(-4, 5):
        for n in range(-4, 5):
            if (m, n) == (0, 0):
                continue
            theta = pure_quartic_angle(m, n)
            Tc = pure_quartic_period_complex(1.7, 0.6, m, n, theta)
            T = pure_quartic_period(1.7, 0.6, m, n)
            assert abs(Tc.imag) <= 1e-12 * abs(Tc)
            assert T > 0
            assert T == pytest.approx(abs(Tc.real), rel=1e-13)


def test_pure_quartic_period_validation():
    with pytest.raises(ValueError):
        pure_quartic_period(-1, 1, 1, 0)
    with pytest.raises(ValueError):
        pure_quartic_period(1, 0, 1, 0)


def test_lemniscatic_K_is_used():
    assert abs(complete_K(-1) - LEMNISCATE_K) < 1e-12
