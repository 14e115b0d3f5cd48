"""Exception hierarchy.

Every error raised by the package derives from :class:`ContactWaveError` and
carries the exit code the command line uses for it.
"""


class ContactWaveError(Exception):
    exit_code = 3
    category = "error"


class ParameterError(ContactWaveError, ValueError):
    """Physical or wave parameters outside their admissible domain."""

    exit_code = 2
    category = "parameter"


class GridError(ContactWaveError, ValueError):
    """Grid too small for a stencil, or fields living on different grids."""

    exit_code = 2
    category = "grid"


class ConfigError(ContactWaveError, ValueError):
    exit_code = 2
    category = "config"


class StateError(ContactWaveError):
    """Loss of positivity of specific volume or temperature."""

    category = "state"

    def __init__(self, message, dump=None):
        super().__init__(message)
        self.dump = dump or {}


class TimeStepError(ContactWaveError):
    """A step could not be completed with the requested dt (Newton failure,
    dt above the stability bound). Callers may retry with a smaller dt."""

    category = "timestep"


class ContaminationError(ContactWaveError):
    """The perturbation reached the truncation boundary."""

    category = "contamination"

    def __init__(self, message, required_length=None):
        super().__init__(message)
        self.required_length = required_length


class DiagnosticError(ContactWaveError, ValueError):
    category = "diagnostic"
