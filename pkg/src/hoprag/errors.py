"""Exception types shared across the package."""

from __future__ import annotations


class HopragError(Exception):
    """Base class for all package errors."""


class IngestError(HopragError):
    """A record stream could not be ingested."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class DuplicateIdError(IngestError):
    def __init__(self, passage_id: str, line_number: int | None = None):
        super().__init__(
            f"duplicate passage id {passage_id!r}"
            + (f" on line {line_number}" if line_number else ""),
            line_number,
        )
        self.passage_id = passage_id


class PassageNotFoundError(HopragError):
    def __init__(self, passage_id: str):
        super().__init__(f"passage not found: {passage_id!r}")
        self.passage_id = passage_id


class PromptError(HopragError):
    """Unknown template id or missing slot binding."""


class BackendError(HopragError):
    """Transport-level failure talking to a completion backend."""


class OracleMissError(HopragError):
    """Scripted backend has no entry and no default for a key."""

    def __init__(self, kind: str, key: str):
        super().__init__(f"scripted oracle miss: kind={kind!r} key={key!r}")
        self.kind = kind
        self.key = key


class ParseError(HopragError):
    """Backend output did not match the expected grammar."""


class RoutingParseError(ParseError):
    pass


class DecompositionParseError(ParseError):
    pass


class RefinementError(ParseError):
    pass


class RelevanceParseError(ParseError):
    pass


class EndingParseError(ParseError):
    pass


class DatasetError(HopragError):
    """Malformed evaluation dataset or empty input."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class GenerationError(HopragError):
    """Benchmark synthesis could not satisfy the request."""
