"""
Domain errors shared by every module.

Library code raises these; the CLI maps them to exit code 1 and the API to 422.
"""


class MatchLabError(Exception):
    code = "matchlab_error"

    def __init__(self, message: str, details: str | None = None):
        super().__init__(message)
        self.message = message
        self.details = details


class InvalidInstanceError(MatchLabError):
    code = "invalid_instance"


class IndexOutOfRangeError(MatchLabError):
    code = "index_out_of_range"


class ModelParameterError(MatchLabError):
    code = "model_parameter"


class UnsupportedModelError(MatchLabError):
    code = "unsupported_model"


class OracleGuardExceeded(MatchLabError):
    code = "oracle_guard_exceeded"


class UnknownExperimentError(MatchLabError):
    code = "unknown_experiment"


class BoundDomainError(MatchLabError):
    code = "bound_domain"
