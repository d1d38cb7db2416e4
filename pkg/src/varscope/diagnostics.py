"""Analysis diagnostics: warnings that never abort a run."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "warning" | "info"
    code: str
    message: str
    file: str | None = None
    line: int | None = None

    def format(self) -> str:
        loc = ""
        if self.file is not None:
            loc = f"{self.file}:{self.line}: " if self.line is not None else f"{self.file}: "
        return f"{loc}{self.severity}: [{self.code}] {self.message}"


@dataclass
class DiagnosticSink:
    """Collects diagnostics during analysis; order of emission is preserved."""

    items: list[Diagnostic] = field(default_factory=list)

    def warn(self, code: str, message: str, file: str | None = None, line: int | None = None) -> None:
        self.items.append(Diagnostic("warning", code, message, file, line))

    def info(self, code: str, message: str, file: str | None = None, line: int | None = None) -> None:
        self.items.append(Diagnostic("info", code, message, file, line))

    def extend(self, other: "DiagnosticSink") -> None:
        self.items.extend(other.items)
