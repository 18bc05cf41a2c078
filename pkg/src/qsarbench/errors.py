"""Exception types shared across the package."""


class QsarBenchError(Exception):
    """Base class for all package errors."""


class ParseError(QsarBenchError, ValueError):
    def __init__(self, message: str, offset: int = -1, text: str = ""):
        self.offset = offset
        self.text = text
        where = f" at offset {offset}" if offset >= 0 else ""
        super().__init__(f"{message}{where}" + (f" in {text!r}" if text else ""))


class PatternError(QsarBenchError, ValueError):
    pass


class MismatchError(QsarBenchError, ValueError):
    pass


class EmptyDatasetError(QsarBenchError):
    def __init__(self, message: str, counts: dict | None = None):
        self.counts = dict(counts or {})
        super().__init__(message)


class DegenerateError(QsarBenchError):
    pass


class ShapeError(QsarBenchError, ValueError):
    pass


class FeatureMismatchError(QsarBenchError, ValueError):
    pass


class UndefinedMetricError(QsarBenchError, ValueError):
    pass


class PackError(QsarBenchError):
    def __init__(self, message: str, rule_ids: list[str] | None = None):
        self.rule_ids = list(rule_ids or [])
        super().__init__(message)


class SchemaError(QsarBenchError, ValueError):
    pass


class ConfigError(QsarBenchError, ValueError):
    pass


class UnmappedModelError(QsarBenchError, KeyError):
    pass


class AllFoldsUndefinedError(QsarBenchError):
    pass
