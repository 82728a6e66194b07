"""Exception hierarchy shared by the library and the command-line front end."""


class ForestSpectraError(Exception):
    """Base class; ``kind`` is the short name used in CLI error reports."""

    kind = "error"


class InputError(ForestSpectraError):
    """Bad user input (maps to CLI exit code 1)."""

    kind = "input_error"


class ComputationError(ForestSpectraError):
    """A valid request that cannot be evaluated (maps to CLI exit code 2)."""

    kind = "computation_error"


class InvalidQuery(InputError):
    kind = "invalid_query"


class InvalidIndex(InputError):
    kind = "invalid_index"


class MissingArc(ComputationError):
    kind = "missing_arc"


class ZeroDenominator(ComputationError):
    kind = "zero_denominator"


class TooLarge(InputError):
    kind = "too_large"


class ConvergenceFailure(ComputationError):
    kind = "convergence_failure"


class NegationAttempted(ComputationError):
    kind = "negation_attempted"


class DegenerateSlopes(ComputationError):
    """Eigenvalue prefactors are undefined; ``segments`` holds (exponent, multiplicity) pairs."""

    kind = "degenerate_slopes"

    def __init__(self, message, segments=()):
        super().__init__(message)
        self.segments = list(segments)


class ParseError(InputError):
    kind = "parse_error"

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)
        self.line = line
        self.column = column


class DimensionMismatch(InputError):
    kind = "dimension_mismatch"


class NonRationalInExactMode(InputError):
    kind = "non_rational_in_exact_mode"


class UnderflowWarning(RuntimeWarning):
    """An entry m*exp(-V/eps) rounded to zero in double precision."""
