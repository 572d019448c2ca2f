"""Exception taxonomy for the bubble lab.

Physics-level failures (nonpositive density, leaving the perturbative
regime) are distinguished from numerical failures (eigensolver breakdown,
inconclusive winding counts) and from plumbing errors (bad config, I/O),
because the CLI maps them to different exit codes.
"""


class BubbleLabError(Exception):
    """Base class for all package errors."""


class ConfigError(BubbleLabError):
    """Invalid parameters or run configuration.  CLI exit code 2."""


class NumericalFailure(BubbleLabError):
    """A numerical method failed to converge or lost validity.  CLI exit code 3."""


class IoError(BubbleLabError):
    """Missing or unwritable input/output files.  CLI exit code 4."""


class NoPositiveRoot(NumericalFailure):
    """The equilibrium cubic has no positive root (sigma far below the coercive range)."""


class NonDirichlet(ConfigError):
    """A field handed to the Dirichlet mode projector does not vanish at y=1."""


class NonPhysicalState(NumericalFailure):
    """Reconstructed density or radius is nonpositive somewhere."""


class SingularSystem(NumericalFailure):
    """(I - N1(w)) is numerically singular; the state left the perturbative regime."""


class StepFailure(NumericalFailure):
    """Time stepper exceeded the rejection budget."""


class AdmissibilityLost(NumericalFailure):
    """A time step produced a nonphysical state that could not be rescued."""


class EigensolverFailure(NumericalFailure):
    """Dense eigensolver did not converge."""


class PoleProximity(NumericalFailure):
    """Dispersion function evaluated too close to one of its poles."""


class WindingInconclusive(NumericalFailure):
    """A contour passes too near a zero/pole of Q after maximum refinement."""


class MassNotPreserved(ConfigError):
    """A probe required a mass-preserving perturbation but got one that is not."""


class ChartExceeded(ConfigError):
    """Center-manifold chart coordinate |alpha| >= R*."""


class WindowNotFound(NumericalFailure):
    """Decay-fit window [1e-8, 1e-3] is never visited by the quantity."""


class SchemaMismatch(IoError):
    """An input file does not match the declared CSV/JSON schema."""
