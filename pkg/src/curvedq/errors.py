"""Exception hierarchy for curvedq."""


class CurvedQError(Exception):
    """Base class for all curvedq errors."""


class DegenerateChart(CurvedQError):
    """The chart tangent vectors are (numerically) parallel at a point."""


class OutOfDomain(CurvedQError):
    """A coordinate lies outside the chart domain on a non-periodic axis."""


class NonPositiveFactor(CurvedQError):
    """Norm-rescale factor <= 0: the offset lies beyond the focal surface."""


class QuadratureFailure(CurvedQError):
    """Normal-gauge quadrature hit a non-finite integrand."""


class PeriodicityViolation(CurvedQError):
    """A potential or gauge function is not single-valued on a periodic axis."""


class BadResolution(CurvedQError):
    """Grid resolution too small to carry the stencils."""


class GridMismatch(CurvedQError):
    """Operands live on different grids."""


class NonHermitianAssembly(CurvedQError):
    """Internal hermiticity check failed after operator assembly."""


class ConvergenceFailure(CurvedQError):
    """Iterative eigensolver did not converge."""


class LinearSolveFailure(CurvedQError):
    """Sparse linear solve failed during time propagation."""


class ConfigError(CurvedQError):
    """Run configuration could not be parsed or validated."""


class TaskError(CurvedQError):
    """A pipeline task failed; wraps the originating module error."""
