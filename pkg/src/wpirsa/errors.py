"""Exception hierarchy shared by all modules."""


class WpirsaError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(WpirsaError, ValueError):
    """A model parameter is outside its valid domain."""


class DegenerateChannelError(WpirsaError, ValueError):
    """A beamformer cannot be built from the given channel."""


class InsufficientEnergyError(WpirsaError, ValueError):
    """A spend was requested that the battery cannot cover.

    Raised only when a caller skipped the feasibility mask, so seeing it
    means a bug upstream rather than a modelling condition.
    """


class InvalidRequestError(WpirsaError, ValueError):
    """A request is inconsistent with the frame geometry."""


class ContractViolationError(WpirsaError, RuntimeError):
    pass


class UndefinedStatisticError(WpirsaError, ValueError):
    """A statistic was requested over an empty sample."""


class ConfigError(WpirsaError, ValueError):
    """A configuration file or value could not be accepted.

    Attributes
    ----------
    key : str or None
        The offending key, when the problem can be pinned to one.
    """

    def __init__(self, message, key=None):
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)
        self.key = key
