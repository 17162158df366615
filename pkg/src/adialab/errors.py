"""Exception types shared across the package."""


class AdialabError(Exception):
    """Base class for all adialab errors."""


class NotHermitianError(AdialabError):
    """Matrix failed a Hermiticity check."""


class NoConvergenceError(AdialabError):
    """Iterative diagonalization exceeded its sweep budget."""


class DimensionMismatchError(AdialabError):
    """Operands have incompatible dimensions."""


class SourceWindowError(AdialabError):
    """Hamiltonian source evaluated outside its defined time window."""


class NonMonotoneTimesError(AdialabError):
    """Sample times are not strictly increasing."""


class InvalidParamsError(AdialabError):
    """Model parameters violate their constraints."""


class DegenerateSpectrumError(AdialabError):
    """Spectrum too close to degenerate for gauge-fixed frame construction."""


class BranchMatchError(AdialabError):
    """Eigenbranch continuation between grid nodes is ambiguous."""


class GridMismatchError(AdialabError):
    """Objects built on different time grids were combined."""


class EigenResidualError(AdialabError):
    """Constructed eigenvectors fail their residual bound."""


class NotNormalizedError(AdialabError):
    """State vector is not normalized."""


class TooFewSamplesError(AdialabError):
    """Signal too short for spectral estimation."""


class ConfigError(AdialabError):
    """Scenario configuration is invalid (CLI exit code 2)."""


class NumericalFailure(AdialabError):
    """A numerical invariant failed during a run (CLI exit code 3)."""
