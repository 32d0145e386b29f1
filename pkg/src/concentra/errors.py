"""Exception taxonomy shared across the package.

Every failure mode that callers are expected to handle gets its own class so
that the CLI can map them onto exit codes without string matching.
"""


class ConcentraError(Exception):
    """Base class for all package-specific errors."""


class QuadratureNotConverged(ConcentraError):
    """An adaptive quadrature could not reach the requested tolerance."""


class DomainError(ConcentraError):
    """Parameters violate a mathematical domain restriction."""


class ResonantMode(ConcentraError):
    """lambda is not strictly below the first Dirichlet eigenvalue."""


class PointsTooCloseToBoundary(ConcentraError):
    """Mode series would need more than the configured maximum order."""


class CoincidentPoints(ConcentraError):
    """x == y where a distinct pair is required."""


class SeriesNotConverging(ConcentraError):
    """A series argument lies outside its region of convergence."""


class DuplicatePoints(ConcentraError):
    """Two configuration points closer than the degeneracy cutoff."""


class NoConvergence(ConcentraError):
    """An iterative solver hit its iteration cap."""


class AsymmetricRow(ConcentraError):
    """Circulant first row violates the reflection symmetry a_j = a_{k-j}."""


class WrongRegime(ConcentraError):
    """Formula invoked outside the parameter regime where it is valid."""


class DegenerateDenominator(ConcentraError):
    """A closed-form denominator is zero or has the wrong sign."""


class NoPositiveStart(ConcentraError):
    """Bisection predicate already false at the lower bracket end."""


class GridTooCoarse(ConcentraError):
    """Grid-based minimum disagrees with its local refinement."""


class StencilLeavesDomain(ConcentraError):
    """A finite-difference stencil point falls outside the domain."""


class StepOutOfRange(ConcentraError):
    """Finite-difference step pushes a parameter out of its valid range."""


class FitIllConditioned(ConcentraError):
    """Least-squares design matrix is numerically rank deficient."""


class InvalidConfiguration(ConcentraError):
    """Bubble configuration violates the ansatz invariants."""
