"""The quartic Hamiltonian family and its turning points."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateRoots

_DEGENERATE_TOL = 1e-8
_ARG_TIE = 1e-9

# One permutation per distinct cross ratio of four points. Each pair of
# entries shares a root pairing {x0, x2} / {x1, x3}; the second entry is the
# first shifted cyclically by one, which swaps the roles of K and K'.
LABELINGS: tuple[tuple[int, int, int, int], ...] = (
    (0, 1, 2, 3),
    (1, 2, 3, 0),
    (0, 2, 1, 3),
    (2, 1, 3, 0),
    (0, 1, 3, 2),
    (1, 3, 2, 0),
)


@dataclass(frozen=True)
class QuarticSystem:
    """H = p**2 + a*x**4 + b*x**k at energy E (particle mass 1/2).

    ``a`` is real in the perturbed family; it may be complex to describe the
    pure quartic p**2 + mu*x**4 with complex ``mu``.
    """

    a: complex
    b: complex = 0.0
    k: int = 1
    E: complex = 1.0

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("quartic coefficient a must be non-zero")
        if self.k not in (1, 2):
            raise ValueError(f"perturbation power k must be 1 or 2, got {self.k}")
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "E", complex(self.E))

    @property
    def coefficients(self) -> np.ndarray:
        """Coefficients of a*x**4 + b*x**k - E, highest power first."""
        c = np.array([self.a, 0, 0, 0, -self.E], dtype=complex)
        c[4 - self.k] += self.b
        return c

    def potential(self, x):
        return self.a * x**4 + self.b * x**self.k

    def force(self, x):
        """-dV/dx."""
        return -(4 * self.a * x**3 + self.k * self.b * x ** (self.k - 1))

    def hamiltonian(self, x, p):
        return p * p + self.potential(x)

    def with_energy(self, E: complex) -> "QuarticSystem":
        return QuarticSystem(self.a, self.b, self.k, E)

    def dual(self) -> "QuarticSystem":
        """(a, b, E) -> (-a, i*conj(b), -E); an involution."""
        return QuarticSystem(-self.a, 1j * np.conj(self.b), self.k, -self.E)


@dataclass(frozen=True)
class TurningPoints:
    """Four turning points (x0, x1, x2, x3) in a definite labeling."""

    roots: tuple[complex, complex, complex, complex]

    def __post_init__(self):
        if len(self.roots) != 4:
            raise ValueError("exactly four turning points are required")
        object.__setattr__(self, "roots", tuple(complex(r) for r in self.roots))

    def __iter__(self):
        return iter(self.roots)

    def __getitem__(self, i):
        return self.roots[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.roots, dtype=complex)


def _polish(coeffs: np.ndarray, x: np.ndarray, steps: int = 2) -> np.ndarray:
    deriv = np.polyder(coeffs)
    for _ in range(steps):
        f = np.polyval(coeffs, x)
        d = np.polyval(deriv, x)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            step = x - f / d
            better = np.isfinite(step) & (np.abs(np.polyval(coeffs, step)) <= np.abs(f))
        # keep a step only where it does not make the residual worse
        x = np.where(better, step, x)
    return x


def canonical_order(roots) -> list[complex]:
    """Sort by argument about the centroid in [0, 2*pi), ties by modulus."""
    roots = [complex(r) for r in roots]
    centroid = sum(roots) / len(roots)

    def key(r):
        ang = float(np.angle(r - centroid)) % (2 * np.pi)
        if ang > 2 * np.pi - _ARG_TIE:
            ang = 0.0
        return (round(ang / _ARG_TIE), abs(r - centroid))

    return sorted(roots, key=key)


def check_separation(roots) -> None:
    roots = np.asarray(roots, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(roots))))
    for i, j in itertools.combinations(range(len(roots)), 2):
        if abs(roots[i] - roots[j]) < _DEGENERATE_TOL * scale:
            raise DegenerateRoots(
                f"turning points {roots[i]:.6g} and {roots[j]:.6g} coincide"
            )


def solve_turning_points(sys: QuarticSystem) -> TurningPoints:
    """Zeros of E - a*x**4 - b*x**k in canonical order.

    Companion-matrix eigenvalues refined by Newton steps. Raises
    :class:`DegenerateRoots` when two roots are closer than 1e-8 (relative).
    """
    coeffs = sys.coefficients
    est = np.roots(coeffs)
    roots = _polish(coeffs, est.astype(complex))
    check_separation(roots)
    return TurningPoints(tuple(canonical_order(roots)))


def relabel_cyclic(tp: TurningPoints, shift: int) -> TurningPoints:
    """Rotate the labels: shift=1 maps (x0, x1, x2, x3) to (x1, x2, x3, x0)."""
    s = shift % 4
    r = tp.roots
    return TurningPoints(r[s:] + r[:s])


def relabel(tp: TurningPoints, perm) -> TurningPoints:
    """New labeling with x_j <- old x_{perm[j]}."""
    if sorted(perm) != [0, 1, 2, 3]:
        raise ValueError(f"not a permutation of 0..3: {perm}")
    return TurningPoints(tuple(tp.roots[i] for i in perm))


def match_roots(reference, roots) -> list[complex]:
    """Order ``roots`` so that each lands next to the same-index reference root.

    Used to follow a labeling continuously while a parameter varies.
    """
    ref = np.asarray(reference, dtype=complex)
    new = np.asarray(roots, dtype=complex)
    dist = np.abs(ref[:, None] - new[None, :])
    best = min(
        itertools.permutations(range(4)),
        key=lambda p: sum(dist[i, p[i]] for i in range(4)),
    )
    return [complex(new[j]) for j in best]


def tracked_turning_points(sys: QuarticSystem, reference) -> TurningPoints:
    """Turning points of ``sys`` labelled to follow ``reference`` continuously."""
    coeffs = sys.coefficients
    roots = _polish(coeffs, np.roots(coeffs).astype(complex))
    check_separation(roots)
    return TurningPoints(tuple(match_roots(reference, roots)))
