"""Elliptic integrals of the first kind and Jacobi functions for complex parameter.

All functions use the parameter convention ``m = kappa**2``. Square roots are
taken on the principal branch throughout, so a value sitting exactly on a cut
inherits the side selected by the sign of its zero imaginary part.

The Jacobi functions are evaluated as quotients of theta series. Before the
series is summed, the parameter is moved to whichever of ``m``, ``1 - m`` or
``1 / m`` has the smallest modulus (Jacobi's imaginary and reciprocal-modulus
transformations), which keeps the nome well inside the unit disc, and the
argument is reduced onto the fundamental period cell.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NonConvergent, PoleProximity, SingularModulus

_EPS = np.finfo(float).eps
_RF_MAX_ITER = 100
_SINGULAR_TOL = 1e-14
_POLE_TOL = 1e-8


@dataclass(frozen=True)
class EllipticData:
    """Parameter, complementary parameter and the two complete integrals."""

    kappa_sq: complex
    kappa_prime_sq: complex
    K: complex
    K_prime: complex

    @classmethod
    def from_parameter(cls, kappa_sq: complex) -> "EllipticData":
        kappa_sq = complex(kappa_sq)
        return cls(
            kappa_sq=kappa_sq,
            kappa_prime_sq=1.0 - kappa_sq,
            K=complete_K(kappa_sq),
            K_prime=complete_K_prime(kappa_sq),
        )


def carlson_rf(x: complex, y: complex, z: complex) -> complex:
    """Carlson's symmetric integral R_F(x, y, z) by duplication.

    At most one argument may be zero. Arguments on the negative real axis
    are taken on the side given by the sign of their imaginary zero.
    """
    x, y, z = complex(x), complex(y), complex(z)
    if sum(v == 0 for v in (x, y, z)) > 1:
        raise SingularModulus("R_F diverges when two arguments vanish")

    a0 = (x + y + z) / 3.0
    q = (3.0 * _EPS) ** (-1.0 / 8.0) * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    a = a0
    xn, yn, zn = x, y, z
    f = 1.0
    for _ in range(_RF_MAX_ITER):
        if q < abs(a):
            break
        sx, sy, sz = cmath.sqrt(xn), cmath.sqrt(yn), cmath.sqrt(zn)
        lam = sx * sy + sx * sz + sy * sz
        xn = (xn + lam) / 4.0
        yn = (yn + lam) / 4.0
        zn = (zn + lam) / 4.0
        a = (a + lam) / 4.0
        q /= 4.0
        f *= 4.0
    else:
        raise NonConvergent("R_F duplication did not contract in 100 steps")

    X = (a0 - x) / (a * f)
    Y = (a0 - y) / (a * f)
    Z = -(X + Y)
    e2 = X * Y - Z * Z
    e3 = X * Y * Z
    series = (
        1.0
        + e3 * (1.0 / 14 + 3 * e3 / 104)
        + e2 * (-1.0 / 10 + e2 / 24 - 3 * e3 / 44 - 5 * e2 * e2 / 208 + e2 * e3 / 16)
    )
    return series / cmath.sqrt(a)


def complete_K(kappa_sq: complex) -> complex:
    """Complete integral of the first kind, K(m) = R_F(0, 1 - m, 1)."""
    m = complex(kappa_sq)
    if abs(m - 1.0) < _SINGULAR_TOL:
        raise SingularModulus(f"K is singular at m = 1 (got m = {m})")
    return carlson_rf(0.0, 1.0 - m, 1.0)


def complete_K_prime(kappa_sq: complex) -> complex:
    """Complementary complete integral K'(m) = K(1 - m) = R_F(0, m, 1).

    Equivalent to integrating over the straight segment t in [0, 1] with
    both square roots continued from 1 at t = 0.
    """
    m = complex(kappa_sq)
    if abs(m) < _SINGULAR_TOL:
        raise SingularModulus(f"K' is singular at m = 0 (got m = {m})")
    return carlson_rf(0.0, m, 1.0)


def _f_principal(phi: complex, m: complex) -> complex:
    s = cmath.sin(phi)
    c = cmath.cos(phi)
    if s == 0:
        return 0j
    return s * carlson_rf(c * c, 1.0 - m * s * s, 1.0)


def incomplete_F(phi: complex, kappa_sq: complex) -> complex:
    """Incomplete integral of the first kind F(phi | m).

    The Carlson form is exact for ``|Re phi| <= pi/2``; other amplitudes are
    shifted into that strip using F(phi + j*pi) = F(phi) + 2*j*K.
    """
    phi = complex(phi)
    m = complex(kappa_sq)
    j = round(phi.real / math.pi)
    if j == 0:
        return _f_principal(phi, m)
    return 2 * j * complete_K(m) + _f_principal(phi - j * math.pi, m)


def inverse_sn(s: complex, kappa_sq: complex) -> complex:
    """Principal value of sn^{-1}(s | m), i.e. F(arcsin s | m)."""
    s = complex(s)
    m = complex(kappa_sq)
    if s == 0:
        return 0j
    return s * carlson_rf(1.0 - s * s, 1.0 - m * s * s, 1.0)


# -- theta-series evaluation -------------------------------------------------


def _n_terms(tau: complex) -> int:
    # terms decay like exp(-pi Im(tau) (n^2 - 2n)) on the reduced cell
    t = math.pi * tau.imag
    n = 3
    while t * (n * n - 2 * n) < 45.0 and n < 400:
        n += 1
    return n


def _thetas(v: np.ndarray, tau: complex) -> tuple[np.ndarray, ...]:
    """theta_1..theta_4 at ``v`` (array) for nome exp(i*pi*tau)."""
    N = _n_terms(tau)
    n = np.arange(-N, N + 1)[:, None]
    v = v[None, :]
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    half = np.exp(1j * math.pi * tau * (n + 0.5) ** 2 + 1j * (2 * n + 1) * v)
    full = np.exp(1j * math.pi * tau * n**2 + 2j * n * v)
    th1 = -1j * np.sum(sign * half, axis=0)
    th2 = np.sum(half, axis=0)
    th3 = np.sum(full, axis=0)
    th4 = np.sum(sign * full, axis=0)
    return th1, th2, th3, th4


def _direct_parts(u: np.ndarray, m: complex):
    """Numerators of sn, cn, dn over a shared theta_4 denominator."""
    if m == 0:
        return np.sin(u), np.cos(u), np.ones_like(u), np.ones_like(u)
    K = complete_K(m)
    Kp = complete_K_prime(m)
    tau = 1j * Kp / K
    zero = np.zeros(1, dtype=complex)
    _, t2, t3, t4 = (t[0] for t in _thetas(zero, tau))
    v = u / t3**2
    # reduce onto the cell spanned by 2*pi and 2*pi*tau (common periods)
    b = np.round(v.imag / (2 * math.pi * tau.imag))
    v = v - b * 2 * math.pi * tau
    a = np.round(v.real / (2 * math.pi))
    v = v - a * 2 * math.pi
    th1, th2, th3, th4 = _thetas(v, tau)
    return (t3 / t2) * th1, (t4 / t2) * th2, (t4 / t3) * th3, th4


def _ellipj_parts(u: np.ndarray, m: complex):
    """(sn_num, cn_num, dn_num, den) with sn = sn_num / den etc."""
    choice = min(
        ("direct", abs(m)),
        ("imaginary", abs(1.0 - m)),
        ("reciprocal", 1.0 / abs(m) if m != 0 else math.inf),
        key=lambda c: c[1],
    )[0]
    if choice == "direct":
        return _direct_parts(u, m)
    if choice == "imaginary":
        # sn(u|m) = -i sc(iu|1-m), cn(u|m) = nc(iu|1-m), dn(u|m) = dc(iu|1-m)
        s, c, d, den = _direct_parts(1j * u, 1.0 - m)
        return -1j * s, den, d, c
    # sn(u|m) = sn(ku|1/m)/k, cn(u|m) = dn(ku|1/m), dn(u|m) = cn(ku|1/m)
    k = cmath.sqrt(m)
    s, c, d, den = _direct_parts(k * u, 1.0 / m)
    return s / k, d, c, den


def ellipj_fraction(u, kappa_sq: complex):
    """Pole-free representation of (sn, cn, dn) as numerators over one denominator.

    Returns arrays ``(sn_num, cn_num, dn_num, den)``; every quotient by
    ``den`` gives the corresponding Jacobi function. Useful for rational
    expressions in sn that stay finite where sn itself has a pole.
    """
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    return _ellipj_parts(u, complex(kappa_sq))


def jacobi_ellipj(u, kappa_sq: complex):
    """Jacobi sn, cn and dn for complex argument and complex parameter.

    Scalar input gives scalar output. Raises :class:`PoleProximity` if any
    argument lies within 1e-8 of a pole.
    """
    scalar = np.ndim(u) == 0
    m = complex(kappa_sq)
    s, c, d, den = ellipj_fraction(u, m)
    # near a pole sn ~ 1/(sqrt(m) (u - u_pole))
    with np.errstate(divide="ignore", invalid="ignore"):
        dist = np.abs(den) / (abs(cmath.sqrt(m)) * np.abs(s))
    if m != 0 and np.any(dist < _POLE_TOL):
        raise PoleProximity("argument within 1e-8 of a pole of sn")
    sn, cn, dn = s / den, c / den, d / den
    if scalar:
        return complex(sn[0]), complex(cn[0]), complex(dn[0])
    return sn, cn, dn


def jacobi_sn(u, kappa_sq: complex):
    """Jacobi sn(u | m); periods 4K and 2iK'."""
    return jacobi_ellipj(u, kappa_sq)[0]
