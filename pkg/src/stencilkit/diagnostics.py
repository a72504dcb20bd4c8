"""Diagnostics shared by the frontend and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True, order=True)
class Diagnostic:
    """A single compiler message, ordered by source position."""

    line: int
    col: int
    severity: str  # "error" or "warning"
    message: str
    file: str = field(default="<input>", compare=False)

    def render(self) -> str:
        return f"{self.file}:{self.line}:{self.col}: {self.severity}: {self.message}"


class DslError(Exception):
    """Raised when a source unit cannot be parsed or used.

    Carries the full diagnostic list; the CLI prints them and exits 1.
    """

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = sorted(diagnostics)
        super().__init__("; ".join(d.render() for d in self.diagnostics))


def error(line: int, col: int, message: str, file: str = "<input>") -> Diagnostic:
    return Diagnostic(line, col, "error", message, file)


def warning(line: int, col: int, message: str, file: str = "<input>") -> Diagnostic:
    return Diagnostic(line, col, "warning", message, file)
