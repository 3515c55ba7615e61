"""Exception hierarchy shared by all engines."""


class MinlabError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(MinlabError, ValueError):
    """Operand shapes are incompatible with the operation."""


class ContractError(MinlabError, ValueError):
    """An input violates a documented precondition."""


class NotSingularError(MinlabError):
    """A matrix expected to be singular has full rank."""


class NonRegularPointError(MinlabError):
    """The point lies on the singular locus (corank too large); resample."""


class SingularPointError(MinlabError):
    """The defining function has (numerically) vanishing gradient."""


class NotImmersionError(MinlabError):
    """The chart differential is degenerate at the requested point."""


class SamplingError(MinlabError):
    """A rejection sampler exhausted its retry budget."""

    def __init__(self, message, seed=None):
        super().__init__(message if seed is None else f"{message} (seed={seed})")
        self.seed = seed


class ConfigError(MinlabError, ValueError):
    """A scenario configuration is invalid; nothing was computed."""
