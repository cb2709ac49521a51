"""Exception hierarchy for tailfit."""


class TailfitError(Exception):
    """Base class for every error raised by the package."""


class DomainError(TailfitError, ValueError):
    """Argument outside the domain of a function or model support."""


class DivergentSeriesError(DomainError):
    """An infinite series requested with parameters where it diverges."""


class NonConvergenceError(TailfitError):
    """A truncated series hit its term cap before the error bound was certified."""

    def __init__(self, message, partial_sum=None, bound=None):
        super().__init__(message)
        self.partial_sum = partial_sum
        self.bound = bound


class InvalidModelError(TailfitError, ValueError):
    """Model parameters outside their admissible range."""


class DegenerateDataError(TailfitError, ValueError):
    """Data for which the likelihood has no finite maximizer."""


class FitFailure(TailfitError):
    """Maximum likelihood did not converge from any start.

    ``best`` holds the best parameter vector seen (natural parametrization)
    and ``loglik`` its log-likelihood, both possibly ``None``.
    """

    def __init__(self, message, best=None, loglik=None):
        super().__init__(message)
        self.best = best
        self.loglik = loglik


class EmptyTailError(TailfitError, ValueError):
    """No observation at or above the requested cutoff."""


class InsufficientTailError(TailfitError):
    """No candidate cutoff leaves a tail of the configured minimum size."""


class BootstrapFailure(TailfitError):
    """More than half of the bootstrap replicates failed."""


class GofFailure(TailfitError):
    """Too many synthetic goodness-of-fit replicates failed to refit."""


class IndistinguishableModelsError(TailfitError):
    """Pointwise log-likelihood differences have zero spread."""


class LikelihoodEvaluationError(TailfitError):
    """A log-likelihood evaluated to a non-finite value."""


class NestingViolationError(TailfitError):
    """The nesting model fit worse than the nested one beyond tolerance."""


class ParseError(TailfitError, ValueError):
    """Malformed input file; ``line`` is the 1-based offending line."""

    def __init__(self, message, path=None, line=None):
        loc = f"{path}:{line}: " if path is not None and line is not None else ""
        super().__init__(loc + message)
        self.path = path
        self.line = line


class ConfigError(TailfitError, ValueError):
    """Invalid run configuration."""
