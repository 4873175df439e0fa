"""Exception hierarchy shared by the library and the CLI."""


class CournotError(Exception):
    """Base class for all library errors."""


class ValidationError(CournotError):
    """Invalid parameter values or malformed inputs."""


class DimensionError(ValidationError):
    """History window or vector dimensions do not match the configuration."""


class AssumptionError(ValidationError):
    """A positivity assumption required by the requested operation fails.

    ``failed`` names the violated assumptions ("A.1", "A.2").
    """

    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = tuple(failed)


class ConfigError(ValidationError):
    """Bad configuration file or command-line options."""


class NumericalError(CournotError):
    """A numerical procedure could not produce a result."""


class DivergenceError(NumericalError):
    """An orbit left the blow-up bound where divergence is fatal."""


class NoCrossingError(NumericalError):
    """No stability crossing found inside the requested bracket."""


class NotStableAtStartError(NumericalError):
    """The scanned bracket does not start inside the stable region."""


class DegenerateBoundaryError(NumericalError):
    """A closed-form boundary expression is degenerate for these parameters."""
