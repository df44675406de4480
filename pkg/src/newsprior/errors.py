"""Exception hierarchy.

Everything raised on bad *data* derives from :class:`DataError`, which the CLI
maps to exit code 2.
"""

from __future__ import annotations


class NewsPriorError(Exception):
    pass


class DataError(NewsPriorError, ValueError):
    pass


class IngestError(DataError):
    """A record failed to parse or validate.

    ``line`` is 1-based when the record came from a line-delimited stream.
    """

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class DomainError(DataError):
    pass


class InsufficientEvidenceError(DataError):
    pass


class TrainingError(DataError):
    pass


class DivergenceError(TrainingError):
    def __init__(self, epoch: int, loss: float):
        self.epoch = epoch
        self.loss = loss
        super().__init__(f"training diverged at epoch {epoch} (loss={loss!r})")


class MissingProfileError(DataError):
    def __init__(self, domain: str):
        self.domain = domain
        super().__init__(f"no media profile for domain {domain!r}")


class StoreError(NewsPriorError):
    pass


class StoreCorruptError(StoreError, DataError):
    def __init__(self, path, reason: str):
        self.path = path
        super().__init__(f"corrupt snapshot file {path}: {reason}")


class ConfigError(DataError):
    pass
