EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


class OilForestError(Exception):
    """Base class for every error raised by the toolkit."""
    exit_code: int = EXIT_NUMERICAL


class ConfigError(OilForestError):
    exit_code = EXIT_CONFIG


class DataError(OilForestError):
    exit_code = EXIT_DATA


class ParseError(DataError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(DataError):
    pass


class CoverageError(DataError):
    def __init__(self, message: str, dates: list | None = None):
        self.dates = list(dates or [])
        if self.dates:
            shown = ", ".join(str(d) for d in self.dates[:10])
            more = f" (+{len(self.dates) - 10} more)" if len(self.dates) > 10 else ""
            message = f"{message}: {shown}{more}"
        super().__init__(message)


class DomainError(DataError):
    pass


class EmptyRangeError(DataError):
    pass


class NumericalError(OilForestError):
    exit_code = EXIT_NUMERICAL


class SingularityError(NumericalError):
    def __init__(self, message: str, columns: list[str] | None = None):
        self.columns = list(columns or [])
        if self.columns:
            message = f"{message}: {', '.join(self.columns)}"
        super().__init__(message)


class ContractViolation(OilForestError, ValueError):
    exit_code = EXIT_NUMERICAL


class StageError(OilForestError):
    """Wraps a failure with the name of the experiment stage it happened in."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", EXIT_NUMERICAL)
        super().__init__(f"stage '{stage}' failed: {cause}")
