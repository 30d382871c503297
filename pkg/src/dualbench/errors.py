"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Bad user input: unknown ports, malformed configs or files."""


class ValidationError(ValueError):
    """A physical invariant is violated (non-unitary matrix, bad state norm, ...)."""


class NotReducibleError(ValidationError):
    """Two photons share the chosen label value, so the labeling defines no qubit pair."""


class NumericalError(RuntimeError):
    """A numerical routine produced an unusable result."""


class ConvergenceError(NumericalError):
    """Iterative reconstruction did not converge.

    Carries the best iterate seen so far and the log-likelihood trace so a
    caller can inspect or restart.
    """

    def __init__(self, message, best_density_matrix=None, likelihood_trace=None):
        super().__init__(message)
        self.best_density_matrix = best_density_matrix
        self.likelihood_trace = likelihood_trace


class ScenarioFailure(RuntimeError):
    """A scenario ran to completion but violated its acceptance thresholds."""
