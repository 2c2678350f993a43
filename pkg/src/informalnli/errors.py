"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all operational errors raised by this package."""


class MalformedRecord(ToolkitError):
    """A JSONL line could not be parsed or is missing required fields."""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


class UnknownLabel(ToolkitError):
    """A record carries a label outside the three NLI classes (and not '-')."""

    def __init__(self, line_no: int, value: str):
        self.line_no = line_no
        self.value = value
        super().__init__(f"line {line_no}: unknown label {value!r}")


class AlignmentError(ToolkitError):
    """Two example/prediction sequences do not cover the same ID set."""

    def __init__(self, message: str, missing: list[str] | None = None,
                 extra: list[str] | None = None):
        self.missing = missing or []
        self.extra = extra or []
        super().__init__(message)


class DuplicateIdError(ToolkitError):
    """An ID appears more than once where uniqueness is required."""

    def __init__(self, ids: list[str]):
        self.ids = ids
        shown = ", ".join(ids[:5])
        more = f" (+{len(ids) - 5} more)" if len(ids) > 5 else ""
        super().__init__(f"duplicate ids: {shown}{more}")


class LengthMismatch(ToolkitError):
    """Paired vectors have different lengths."""


class EmptyInput(ToolkitError):
    """An operation that needs at least one element received none."""


class MissingCell(ToolkitError):
    """An (approach, variant) cell of the accuracy table has no prediction file."""

    def __init__(self, cells: list[tuple[str, str]]):
        self.cells = cells
        listing = ", ".join(f"({a}, {v})" for a, v in cells)
        super().__init__(f"missing prediction files for: {listing}")


class NetworkError(ToolkitError):
    """An HTTP request failed after the configured retries."""


class AuthError(ToolkitError):
    """No API credential is available for a request that needs one."""


class RateLimited(ToolkitError):
    """The server kept rejecting requests with 429 past the retry budget."""
