"""Exception types raised across rqnet."""


class RqnetError(Exception):
    """Base class for all rqnet errors."""


class EmptySeries(RqnetError, ValueError):
    pass


class LeadingGap(RqnetError, ValueError):
    pass


class InsufficientData(RqnetError, ValueError):
    pass


class InvalidInput(RqnetError, ValueError):
    pass


class DegenerateVariance(RqnetError, ValueError):
    pass


class DegenerateSeries(RqnetError, ValueError):
    pass


class NoCrossing(RqnetError, ValueError):
    pass


class UndefinedMeasure(RqnetError, ArithmeticError):
    pass


class ConfigMismatch(RqnetError, ValueError):
    pass


class ConfigError(RqnetError, ValueError):
    """Invalid run configuration (CLI exit code 2)."""


class CSVFormatError(RqnetError, ValueError):
    """Malformed input file; the message carries path and line number."""

    def __init__(self, path, line, reason):
        self.path = str(path)
        self.line = line
        self.reason = reason
        super().__init__(f"{self.path}:{line}: {reason}")
