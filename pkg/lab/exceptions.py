"""
Exceptions raised by the lab app.

Every error carries the name of the operation that failed so that the
experiment runner can report it and pick the exit status.
"""


class DisplabError(Exception):
    """Base class for all lab errors."""

    operation = 'displab'

    def __init__(self, message, operation=None):
        super().__init__(message)
        if operation is not None:
            self.operation = operation


class GridError(DisplabError, ValueError):
    operation = 'make_grid'


class SampleError(DisplabError, ValueError):
    operation = 'sample_function'


class SpectralError(DisplabError, ValueError):
    operation = 'spectral'


class ParameterRangeError(DisplabError, ValueError):
    """Raised when parameters fall outside the range an operation is defined on."""


class WeightError(DisplabError, ValueError):
    """Raised when a weight cannot be used, e.g. a zero node under inversion."""


class ZeroDenominatorError(DisplabError, ArithmeticError):
    pass


class RegionInconsistencyError(DisplabError, RuntimeError):
    operation = 'admissible_region'


class PicardDivergenceError(DisplabError, ArithmeticError):
    """
    Raised when the Picard iterates grow instead of contracting.

    Attributes:
        contraction_estimates: the measured per-iteration contraction ratios
            up to the point of failure.
    """

    operation = 'picard_solve'

    def __init__(self, message, contraction_estimates=()):
        super().__init__(message)
        self.contraction_estimates = list(contraction_estimates)


class SchemaError(DisplabError, ValueError):
    operation = 'emit_csv'


class ConfigError(DisplabError, ValueError):
    """
    Raised for invalid experiment configurations.

    Attributes:
        line: 1-based line in the config file the problem refers to, or None.
    """

    operation = 'config'

    def __init__(self, message, line=None):
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message)
        self.line = line
