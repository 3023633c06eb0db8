"""Exception hierarchy.

Every error raised by the package derives from :class:`InterAreaError`.  The
three direct subclasses map onto command-line exit codes (2, 3 and 4).
"""


class InterAreaError(Exception):
    exit_code = 1


class ValidationError(InterAreaError, ValueError):
    """Invalid model data or an unresolvable reference."""

    exit_code = 2


class NumericalError(InterAreaError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy result."""

    exit_code = 3


class IoError(InterAreaError, OSError):
    exit_code = 4


class UnknownBus(ValidationError):
    pass


class DuplicateId(ValidationError):
    pass


class IslandedAreaInterior(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class UnknownArea(ValidationError):
    pass


class UnknownParameterPath(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class SchemaError(ValidationError):
    """One or more schema violations; ``problems`` holds ``(field_path, message)`` pairs."""

    def __init__(self, problems):
        self.problems = list(problems)
        lines = [f"{path}: {msg}" for path, msg in self.problems]
        super().__init__("invalid scenario:\n  " + "\n  ".join(lines))


class SingularReduction(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class DefectiveMode(NumericalError):
    pass


class AmbiguousMatch(NumericalError):
    pass


class StepTooLarge(NumericalError):
    pass
