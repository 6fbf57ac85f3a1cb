"""Structured diagnostics shared by every checker."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional


@dataclass(frozen=True)
class Span:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    """A single failure with a stable machine-readable ``code``.

    ``rule`` names the inference rule whose premise failed, when there is one.
    """

    code: str
    message: str
    rule: Optional[str] = None
    axiom: Optional[str] = None
    index: Optional[int] = None
    span: Optional[Span] = None
    extra: dict = field(default_factory=dict, compare=False)

    def with_span(self, span: Optional[Span]) -> "Diagnostic":
        return self if span is None or self.span is not None else replace(self, span=span)

    def to_json(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.rule:
            out["rule"] = self.rule
        if self.axiom is not None:
            out["axiom"] = self.axiom
        if self.index is not None:
            out["index"] = self.index
        if self.span is not None:
            out["file"] = self.span.file
            out["line"] = self.span.line
            out["column"] = self.span.column
        return out

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        loc = ""
        if self.axiom is not None:
            loc = f" [axiom {self.axiom}" + (f", equation {self.index}]" if self.index is not None else "]")
        rule = f" ({self.rule})" if self.rule else ""
        return f"{where}{self.code}{rule}: {self.message}{loc}"


class CheckError(Exception):
    """Raised by judgments that fail; carries one or more diagnostics."""

    def __init__(self, *diags: Diagnostic):
        super().__init__("; ".join(str(d) for d in diags))
        self.diagnostics = list(diags)

    @property
    def diagnostic(self) -> Diagnostic:
        return self.diagnostics[0]

    @property
    def code(self) -> str:
        return self.diagnostics[0].code


def fail(code: str, message: str, rule: Optional[str] = None, **kw) -> CheckError:
    return CheckError(Diagnostic(code, message, rule, **kw))


class PreconditionError(ValueError):
    """A caller broke an operation's documented precondition."""
