class HeraldMuxError(Exception):
    """Base class for errors raised by heraldmux."""


class DomainError(HeraldMuxError, ValueError):
    """An argument lies outside the domain of the quantity requested."""


class UndefinedPosteriorError(DomainError):
    """Conditioning on an event that has probability zero (e.g. a click with eta=0)."""


class UndefinedConditioningError(UndefinedPosteriorError):
    """The trigger can never fire, so a trigger-conditioned probability does not exist."""
