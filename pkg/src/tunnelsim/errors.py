"""Exception hierarchy.

The CLI maps these onto its stable exit codes: configuration/schema
problems exit 2, numerical divergence exits 3, an unmet stop criterion
exits 4.
"""


class TunnelSimError(Exception):
    """Base class for all package errors."""


class ConfigurationError(TunnelSimError):
    """Invalid physical parameters, run configuration, or file schema."""


class DerivationDomainError(ConfigurationError):
    """A closed-form derivation was evaluated outside its domain
    (e.g. Thomas-Fermi chemical potential for non-repulsive coupling)."""


class SolverError(TunnelSimError):
    """Base class for numerical failures during a run."""


class DivergenceError(SolverError):
    """NaN/Inf appeared in the evolved state.  Carries the step index."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class NormDriftError(SolverError):
    """Wavefunction norm drifted beyond tolerance; the step size or grid
    is inadequate."""


class DomainViolationError(SolverError):
    """Density or samples reached the guarded edge of the spatial domain."""


class ConvergenceError(SolverError):
    """An iterative solve (imaginary time, curve fit) failed to converge.
    Carries the last residual when available."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class UnconvergedStopError(SolverError):
    """The transmission stop criterion was not met before the time cap."""


class PrematureMeasurementError(SolverError):
    """Transmission was requested from a state that has not met the stop
    criterion."""


class SamplingError(TunnelSimError):
    """Monte-Carlo initialisation was handed an unusable distribution."""


class AggregationError(TunnelSimError):
    """Realization statistics were requested over an inconsistent set."""


class PairingError(TunnelSimError):
    """Quantum/classical results with mismatched parameters were paired."""


class FitError(TunnelSimError):
    """Nonlinear least squares failed.  Carries the residual trace."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals
