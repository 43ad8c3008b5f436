"""Exception hierarchy shared across the engine.

Two broad families matter to callers: ``QueryError`` (malformed or
disallowed query expressions; maps to HTTP 400 and CLI usage failures)
and ``DataError`` (the data cannot answer the request; maps to CLI exit
code 2).
"""

from __future__ import annotations


class AkError(Exception):
    """Base class for all engine errors."""


# ---------------------------------------------------------------------------
# Query-expression errors
# ---------------------------------------------------------------------------

class QueryError(AkError):
    """A query expression or attribute list was rejected."""

    code = "QueryError"


class QuerySyntaxError(QueryError):
    code = "SyntaxError"

    def __init__(self, position: int, expected: tuple[str, ...], message: str | None = None):
        self.position = position
        self.expected = tuple(expected)
        detail = message or f"expected {' or '.join(self.expected)}"
        super().__init__(f"syntax error at position {position}: {detail}")


class UnknownAttributeError(QueryError):
    code = "UnknownAttribute"

    def __init__(self, path: str):
        self.path = path
        super().__init__(f"unknown attribute {path!r}")


class NonQueryableAttributeError(QueryError):
    """Extended attributes are response-only unless the extended-query flag is on."""

    code = "NonQueryableAttribute"

    def __init__(self, path: str, message: str | None = None):
        self.path = path
        super().__init__(message or f"attribute {path!r} cannot be used in this position")


class TypeMismatchError(QueryError):
    code = "TypeMismatch"

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


# ---------------------------------------------------------------------------
# Data errors
# ---------------------------------------------------------------------------

class DataError(AkError):
    """The loaded data cannot satisfy the request."""

    code = "DataError"


class NotFound(DataError):
    code = "NotFound"

    def __init__(self, entity_id: int, kind: str = "paper"):
        self.entity_id = entity_id
        self.kind = kind
        super().__init__(f"{kind} {entity_id} not found")


class UnknownJournal(DataError):
    code = "UnknownJournal"

    def __init__(self, key):
        self.key = key
        super().__init__(f"journal {key!r} not found in snapshot")


class EmptyReferenceSet(DataError):
    code = "EmptyReferenceSet"

    def __init__(self, journal_id: int, years):
        self.journal_id = journal_id
        self.years = years
        if years is None:
            detail = f"journal {journal_id} has no dated publications"
        else:
            detail = (f"journal {journal_id} has no publications in years "
                      f"{years[0]}-{years[-1]}")
        super().__init__(detail)


class EmptyCell(DataError):
    code = "EmptyCell"

    def __init__(self, year: int):
        self.year = year
        super().__init__(f"reference set has no publications for year {year}")


class EmptyDistribution(DataError):
    code = "EmptyDistribution"

    def __init__(self):
        super().__init__("citation distribution is empty")


class AllExcluded(DataError):
    code = "AllExcluded"

    def __init__(self, subject: str, detail: str = ""):
        self.subject = subject
        super().__init__(
            f"no scorable publications remain for {subject}" + (f": {detail}" if detail else "")
        )


class EmptyPairs(DataError):
    code = "EmptyPairs"

    def __init__(self):
        super().__init__("no matched publication pairs")


class CapExceeded(DataError):
    code = "CapExceeded"

    def __init__(self, num_entities: int, cap: int):
        self.num_entities = num_entities
        self.cap = cap
        super().__init__(f"query matched {num_entities} entities, exceeding the cap of {cap}")


# ---------------------------------------------------------------------------
# Snapshot-loading errors
# ---------------------------------------------------------------------------

class LoadError(DataError):
    code = "LoadError"


class MissingFile(LoadError):
    code = "MissingFile"

    def __init__(self, path):
        self.path = path
        super().__init__(f"required snapshot file missing: {path}")


class MalformedRow(LoadError):
    code = "MalformedRow"

    def __init__(self, filename: str, line: int, detail: str):
        self.filename = filename
        self.line = line
        super().__init__(f"{filename}:{line}: {detail}")


class DuplicateId(LoadError):
    code = "DuplicateId"

    def __init__(self, filename: str, entity_id: int):
        self.filename = filename
        self.entity_id = entity_id
        super().__init__(f"{filename}: duplicate entity id {entity_id}")
