"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class FnnlintError(Exception):
    """Base class for all errors raised by fnnlint."""


class EmptyModel(FnnlintError):
    def __init__(self) -> None:
        super().__init__("model has no layers")


class SchemaError(FnnlintError):
    def __init__(self, path: str, reason: str) -> None:
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class VersionError(FnnlintError):
    def __init__(self, found: object) -> None:
        self.found = found
        super().__init__(f"unsupported format_version {found!r} (expected 1)")


class SourceError(FnnlintError):
    """An error tied to a position in analyzed source text."""

    def __init__(self, line: int, col: int, message: str) -> None:
        self.line = line
        self.col = col
        self.message = message
        super().__init__(f"{line}:{col}: {message}")


class LexError(SourceError):
    pass


class ParseError(SourceError):
    def __init__(self, line: int, col: int, expected: str, found: str = "") -> None:
        self.expected = expected
        msg = f"expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(line, col, msg)


class NoModelFound(FnnlintError):
    def __init__(self, detail: str = "") -> None:
        msg = "no Sequential model construction or .add() calls found"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class UnsupportedExtension(FnnlintError):
    def __init__(self, path: str) -> None:
        self.path = path
        super().__init__(f"unsupported input file type: {path}")


class IoError(FnnlintError):
    pass


class StaleMatch(FnnlintError):
    pass


class UnknownCode(FnnlintError):
    def __init__(self, code: str) -> None:
        self.code = code
        super().__init__(f"unknown smell code {code!r}")


class UsageError(FnnlintError):
    pass
