"""Exception types shared across the package."""


class HelmtrapError(Exception):
    """Base class for all package-specific errors."""


class DomainError(HelmtrapError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ParameterError(HelmtrapError, ValueError):
    """A configuration or constructor parameter is invalid."""


class AssemblyError(HelmtrapError):
    """Operator assembly failed (unknown kind, invalid wavenumber, ...)."""


class SolveError(HelmtrapError):
    """A linear solve or factorisation failed."""


class SpectralError(HelmtrapError):
    """A dense eigenvalue/singular-value computation failed.

    Carries a ``fingerprint`` of the offending matrix so failures can be
    reproduced from logs.
    """

    def __init__(self, message, fingerprint=None):
        super().__init__(message)
        self.fingerprint = fingerprint


class QuadratureError(HelmtrapError):
    """Adaptive quadrature failed to converge; carries the refinement history."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history or [])


class SearchError(HelmtrapError):
    """A root/mode search exhausted its scan range; carries the scan trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class BoundAssumptionError(HelmtrapError):
    """Input violates the hypotheses of the cluster-plus-outliers bound.

    ``report`` lists the offending eigenvalues / quantities.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
