"""Exception hierarchy. Each class maps to a CLI exit code via ``exit_code``."""


class GrenlabError(Exception):
    exit_code = 1


class InvalidInputError(GrenlabError, ValueError):
    """Malformed point sets or step data."""

    exit_code = 2


class InvalidParameterError(GrenlabError, ValueError):
    exit_code = 2


class RangeError(GrenlabError, ValueError):
    exit_code = 2


class ConfigurationError(GrenlabError):
    exit_code = 2


class InvalidExperimentError(ConfigurationError):
    pass


class InsufficientReplicatesError(ConfigurationError, ValueError):
    pass


class InvalidWindowError(GrenlabError, ValueError):
    exit_code = 2


class InvalidEstimateError(GrenlabError, ValueError):
    exit_code = 2


class ModelMisconfigurationError(GrenlabError):
    exit_code = 3


class ModelInvalidError(GrenlabError):
    """Raised when a truth model violates one of its regularity checks.

    ``failures`` holds one human-readable line per failed check.
    """

    exit_code = 3

    def __init__(self, message, failures=()):
        super().__init__(message)
        self.failures = list(failures)
