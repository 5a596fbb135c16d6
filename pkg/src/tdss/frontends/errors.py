from __future__ import annotations


class ParseError(Exception):
    """Syntax error with a 1-based source position."""

    def __init__(
        self,
        message: str,
        source_path: str = "<input>",
        line: int = 1,
        column: int = 1,
        snippet: str = "",
    ) -> None:
        self.message = message
        self.source_path = source_path
        self.line = line
        self.column = column
        self.snippet = snippet
        super().__init__(str(self))

    def __str__(self) -> str:
        where = f"{self.source_path}:{self.line}:{self.column}"
        if self.snippet:
            return f"{where}: {self.message} (at {self.snippet!r})"
        return f"{where}: {self.message}"


class UnsupportedConstruct(ParseError):
    """A Gherkin construct outside the supported subset."""

    def __init__(self, construct: str, source_path: str, line: int, column: int, snippet: str):
        self.construct = construct
        super().__init__(
            f"unsupported Gherkin construct: {construct}", source_path, line, column, snippet
        )


class DuplicatePattern(ParseError):
    def __init__(self, pattern: str, source_path: str, first_line: int, line: int):
        self.pattern = pattern
        self.lines = (first_line, line)
        super().__init__(
            f"duplicate step pattern {pattern!r} on lines {first_line} and {line}",
            source_path,
            line,
            1,
            pattern,
        )
