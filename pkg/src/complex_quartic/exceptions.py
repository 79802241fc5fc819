"""Error types raised by the numerical routines."""


class QuarticError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateRoots(QuarticError):
    """Two turning points coincide; the elliptic parametrisation breaks down."""


class SingularModulus(QuarticError):
    """The elliptic parameter sits on a logarithmic singularity (0 or 1)."""


class NonConvergent(QuarticError):
    """An iterative scheme failed to contract within its iteration budget."""


class PoleProximity(QuarticError):
    """The requested argument is too close to a pole of an elliptic function."""


class DegenerateRatio(QuarticError):
    """The rationality ratio is undefined because its denominator vanishes."""


class Blowup(QuarticError):
    """The integrated trajectory escaped towards infinity."""


class StepUnderflow(QuarticError):
    """The adaptive step-size controller shrank the step below its floor."""


class InsufficientSpan(QuarticError):
    """A trajectory is too short for the requested closure test."""
