"""Diagnostics raised by the MiniC frontend."""

from __future__ import annotations


class MiniCError(Exception):
    """A source-level diagnostic with a location.

    Formats as ``file:line:col: message``, matching what the CLI prints
    to standard error.
    """

    def __init__(self, message: str, line: int = 0, col: int = 0, filename: str = "<input>"):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col
        self.filename = filename

    def __str__(self) -> str:
        return f"{self.filename}:{self.line}:{self.col}: {self.message}"


class SyntaxErrorMC(MiniCError):
    pass


class TypeErrorMC(MiniCError):
    pass
