"""Complex classical orbits of the quartic family H = p**2 + a x**4 + b x**k."""

from .elliptic import (
    EllipticData,
    carlson_rf,
    complete_K,
    complete_K_prime,
    incomplete_F,
    inverse_sn,
    jacobi_ellipj,
    jacobi_sn,
)
from .exceptions import (
    Blowup,
    DegenerateRatio,
    DegenerateRoots,
    InsufficientSpan,
    NonConvergent,
    PoleProximity,
    QuarticError,
    SingularModulus,
    StepUnderflow,
)
from .periodicity import (
    PeriodicityContext,
    PeriodicSolution,
    build_context,
    escape_attained,
    escape_time,
    period,
    pure_quartic_angle,
    pure_quartic_period,
    rational_approximation,
    rationality_ratio,
)
from .quartic import LABELINGS, QuarticSystem, TurningPoints, solve_turning_points
from .scan import ScanConfig, discretize_energy, duality_check, pure_quartic_catalog, scan_theta
from .trajectory import (
    Trajectory,
    analytic_trajectory,
    closure_residual,
    detect_closure,
    ode_trajectory,
    position_at,
    pure_quartic_closure,
)

__version__ = "0.1.0"
