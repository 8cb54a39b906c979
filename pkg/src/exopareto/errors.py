"""Exception hierarchy shared by the library and the CLI.

Exit-code mapping used by the CLI: 0 success, 1 numeric failure,
2 configuration/schema failure.
"""


class ExoParetoError(Exception):
    """Base class; `exit_code` drives the CLI exit status."""

    exit_code = 1

    def __init__(self, message, **detail):
        super().__init__(message)
        self.detail = detail

    def to_json_dict(self):
        payload = {"type": type(self).__name__, "message": str(self)}
        if self.detail:
            payload["detail"] = {k: v for k, v in sorted(self.detail.items())}
        return payload


class NumericError(ExoParetoError):
    """Solver non-convergence or violated numeric contract."""

    exit_code = 1


class SchemaError(ExoParetoError):
    """A file is missing a required column or key."""

    exit_code = 2


class FormatError(ExoParetoError):
    """A file is structurally malformed (grid, duplicate rows, parse)."""

    exit_code = 2


class DataError(ExoParetoError):
    """A file parsed but carries invalid values (NaN, out of range)."""

    exit_code = 2


class DomainError(ExoParetoError):
    """An argument is outside the documented domain of an operation."""

    exit_code = 2


class ConfigError(ExoParetoError):
    """A run configuration value is missing or invalid."""

    exit_code = 2
