"""Exception hierarchy shared by the library and the command line."""


class AwarenessError(Exception):
    """Base class for every error raised by cityaware."""


class ParseError(AwarenessError, ValueError):
    """Malformed input file content.

    ``line`` is the 1-based physical line of the offending row when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)


class CityResolutionError(ParseError):
    """A city name or id could not be mapped to exactly one catalog entry."""


class CatalogError(ParseError):
    """The catalog itself violates an identity or range rule."""


class PeriodError(AwarenessError, ValueError):
    """Ill-formed period, or a record period straddling a query period."""


class ValidationError(AwarenessError, ValueError):
    """Numerical precondition failure (zero local-awareness, shape mismatch)."""


class ConfigError(AwarenessError, ValueError):
    """Invalid run configuration."""
