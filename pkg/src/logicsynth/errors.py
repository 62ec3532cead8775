"""Exception types shared across the package."""


class LogicSynthError(Exception):
    """Base class for all package errors."""


class ContractError(LogicSynthError, ValueError):
    """A precondition or domain contract was violated by the caller."""


class DatasetError(LogicSynthError, ValueError):
    """Malformed input data (CSV cells, schema, labels).

    ``row`` and ``column`` are 0-based positions in the data table when
    known, ``None`` otherwise.
    """

    def __init__(self, message, row=None, column=None):
        pos = []
        if row is not None:
            pos.append(f"row {row}")
        if column is not None:
            pos.append(f"column {column}")
        if pos:
            message = f"{message} ({', '.join(pos)})"
        super().__init__(message)
        self.row = row
        self.column = column


class ModelFileError(LogicSynthError, ValueError):
    """A model file failed version, digest, or structural validation."""
