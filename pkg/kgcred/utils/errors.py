"""Exception types raised across kgcred."""

from typing import List, Optional


class KGCredError(ValueError):
    """Base class for every data or domain error raised by kgcred."""


class UsageError(KGCredError):
    """Invalid command-line usage."""


class InvalidLabelError(KGCredError):
    """A subject, predicate or object label is empty or not storable."""

    def __init__(self, message: str, slot: Optional[str] = None, line: Optional[int] = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if slot is not None:
            location.append(slot)
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")
        self.slot = slot
        self.line = line


class UnknownIdError(KGCredError):
    """An entity or relation id (or label) is outside the dictionary."""


class ParseError(KGCredError):
    """A file could not be parsed; carries the offending position."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        where = path or '<input>'
        if line is not None:
            where = f"{where}:{line}"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


class RecordValidationError(ParseError):
    """A user record violates a field constraint."""

    def __init__(self, message: str, field_path: str, path: Optional[str] = None, line: Optional[int] = None):
        super().__init__(f"{field_path}: {message}", path=path, line=line)
        self.field_path = field_path
        self.reason = message


class MappingError(KGCredError):
    """A mapping rule is malformed or references a missing column."""


class CheckpointError(KGCredError):
    """A checkpoint is missing, malformed or belongs to other dictionaries."""


class TrainingDivergedError(KGCredError):
    """Training produced a non-finite loss or gradient."""

    def __init__(self, message: str, loss_trace: Optional[List[float]] = None):
        super().__init__(message)
        self.loss_trace = list(loss_trace or [])


class CalibrationError(KGCredError):
    """Platt calibration cannot be fitted on the given data."""
