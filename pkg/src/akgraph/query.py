"""Query-expression language: parsing, printing, and evaluation.

The wire syntax understood by the CLI and the HTTP service::

    Y=2014                          numeric equality
    CC>=10                          numeric comparison (=, <, <=, >, >=)
    Y=[2010,2014]                   inclusive range
    Y=[2010,2015)                   half-open range (either bound may be open)
    D=['2014-01-01','2014-12-31']   date range, ISO-8601 literals
    Ti='der streit der fakultaten'  normalized-text equality
    And(e1,e2)  Or(e1,e2)           boolean composition (2+ arguments fold left)
    Composite(AA.AuN='x')           embedded-entity scope: all conditions inside
                                    must hold on the same embedded record

String literals are normalized before matching, so queries written with
diacritics or punctuation find the normalized stored values. Parsing is
position-aware: syntax errors carry the offending offset and the expected
token set. ``parse(pretty_print(ast)) == ast`` for every valid AST.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date as _date
from typing import Iterable, Optional, Union

from .attributes import (
    COMPOSITE_PREFIXES,
    AttrType,
    AttributeSpec,
    lookup,
    lookup_queryable,
)
from .errors import (
    QuerySyntaxError,
    TypeMismatchError,
)
from .graph import AcademicGraph, PaperRecord
from .normalize import normalize_text

# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

Literal = Union[int, str]


@dataclass(frozen=True)
class Compare:
    attr: str
    op: str  # one of = < <= > >=
    value: Literal


@dataclass(frozen=True)
class Range:
    """Bounded interval on a numeric or date attribute."""

    attr: str
    low: Literal
    high: Literal
    low_inclusive: bool = True
    high_inclusive: bool = True


@dataclass(frozen=True)
class And:
    left: "QueryExpr"
    right: "QueryExpr"


@dataclass(frozen=True)
class Or:
    left: "QueryExpr"
    right: "QueryExpr"


@dataclass(frozen=True)
class Composite:
    prefix: str  # AA, F, J or C
    expr: "QueryExpr"


QueryExpr = Union[Compare, Range, And, Or, Composite]

_OPS = ("<=", ">=", "=", "<", ">")
_KEYWORDS = ("And", "Or", "Composite")


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, extended_query: bool):
        self.text = text
        self.pos = 0
        self.extended_query = extended_query

    # -- low-level helpers ---------------------------------------------------

    def _ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _fail(self, expected: tuple[str, ...], message: str | None = None):
        raise QuerySyntaxError(self.pos, expected, message)

    def _eat(self, token: str, expected_name: str | None = None) -> None:
        self._ws()
        if not self.text.startswith(token, self.pos):
            self._fail((expected_name or repr(token),))
        self.pos += len(token)

    def _peek(self) -> str:
        self._ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _ident(self) -> str:
        self._ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalpha() or self.text[self.pos] == "."):
            self.pos += 1
        return self.text[start:self.pos]

    def _number(self) -> int:
        self._ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self._fail(("number",))
        return int(self.text[start:self.pos])

    def _string(self) -> str:
        self._ws()
        if self._peek() != "'":
            self._fail(("quoted string",))
        self.pos += 1
        end = self.text.find("'", self.pos)
        if end < 0:
            self.pos = len(self.text)
            self._fail(("'",), "unterminated string literal")
        value = self.text[self.pos:end]
        self.pos = end + 1
        return value

    # -- grammar --------------------------------------------------------------

    def parse(self) -> QueryExpr:
        expr = self.expr()
        self._ws()
        if self.pos != len(self.text):
            self._fail(("end of input",))
        return expr

    def expr(self) -> QueryExpr:
        self._ws()
        if self.pos >= len(self.text):
            self._fail(("expression",))
        mark = self.pos
        ident = self._ident()
        if not ident:
            self._fail(("expression",))
        if ident in ("And", "Or") and self._peek() == "(":
            return self._boolean(ident)
        if ident == "Composite" and self._peek() == "(":
            return self._composite(mark)
        return self._comparison(ident, mark)

    def _boolean(self, kind: str) -> QueryExpr:
        self._eat("(")
        parts = [self.expr()]
        self._eat(",", "','")
        parts.append(self.expr())
        while self._peek() == ",":
            self._eat(",")
            parts.append(self.expr())
        self._eat(")", "')'")
        node = And if kind == "And" else Or
        out = parts[0]
        for nxt in parts[1:]:
            out = node(out, nxt)
        return out

    def _composite(self, mark: int) -> Composite:
        self._eat("(")
        sub = self.expr()
        self._eat(")", "')'")
        prefixes = {a.split(".", 1)[0] for a in _attrs_of(sub)}
        bad = prefixes - set(COMPOSITE_PREFIXES)
        if bad or len(prefixes) != 1:
            raise QuerySyntaxError(
                mark, ("embedded-entity attributes",),
                "Composite requires all conditions on a single embedded entity "
                f"(one of {', '.join(sorted(COMPOSITE_PREFIXES))})")
        if _has_composite(sub):
            raise QuerySyntaxError(mark, ("simple expression",), "Composite cannot be nested")
        return Composite(prefixes.pop(), sub)

    def _comparison(self, attr: str, mark: int) -> QueryExpr:
        spec = lookup_queryable(attr, self.extended_query)
        self._ws()
        op = next((o for o in _OPS if self.text.startswith(o, self.pos)), None)
        if op is None:
            self._fail(tuple(_OPS))
        self.pos += len(op)
        if op == "=" and self._peek() in "[(":
            return self._range(spec, mark)
        return Compare(attr, op, self._literal(spec, op, mark))

    def _range(self, spec: AttributeSpec, mark: int) -> Range:
        if spec.type not in (AttrType.NUMERIC, AttrType.DATE):
            raise TypeMismatchError(spec.path, "ranges apply to numeric and date attributes only")
        low_inclusive = self._peek() == "["
        self.pos += 1
        low = self._bound(spec)
        self._eat(",", "','")
        high = self._bound(spec)
        self._ws()
        closer = self._peek()
        if closer not in "])":
            self._fail(("']'", "')'"))
        self.pos += 1
        return Range(spec.path, low, high, low_inclusive, closer == "]")

    def _bound(self, spec: AttributeSpec) -> Literal:
        if spec.type is AttrType.NUMERIC:
            return self._number()
        return self._iso_date(spec, self._string())

    def _literal(self, spec: AttributeSpec, op: str, mark: int) -> Literal:
        quoted = self._peek() == "'"
        if spec.type in (AttrType.TEXT, AttrType.RAW):
            if op != "=":
                raise TypeMismatchError(spec.path, "string comparisons support '=' only")
            if not quoted:
                raise TypeMismatchError(spec.path, "expected a quoted string literal")
            raw = self._string()
            return normalize_text(raw) if spec.type is AttrType.TEXT else raw
        if spec.type is AttrType.DATE:
            if not quoted:
                raise TypeMismatchError(spec.path, "expected a quoted ISO-8601 date literal")
            return self._iso_date(spec, self._string())
        # numeric / id
        if quoted:
            raise TypeMismatchError(spec.path, "expected an unquoted numeric literal")
        if spec.type is AttrType.ID and op != "=":
            raise TypeMismatchError(spec.path, "id attributes support '=' only")
        return self._number()

    def _iso_date(self, spec: AttributeSpec, raw: str) -> str:
        try:
            _date.fromisoformat(raw)
        except ValueError:
            raise TypeMismatchError(spec.path, f"invalid ISO-8601 date literal {raw!r}") from None
        return raw


def _attrs_of(expr: QueryExpr) -> Iterable[str]:
    if isinstance(expr, (Compare, Range)):
        yield expr.attr
    elif isinstance(expr, (And, Or)):
        yield from _attrs_of(expr.left)
        yield from _attrs_of(expr.right)
    elif isinstance(expr, Composite):
        yield from _attrs_of(expr.expr)


def _has_composite(expr: QueryExpr) -> bool:
    if isinstance(expr, Composite):
        return True
    if isinstance(expr, (And, Or)):
        return _has_composite(expr.left) or _has_composite(expr.right)
    return False


def parse(text: str, extended_query: bool = False) -> QueryExpr:
    """Parse a query-expression string into its AST.

    Raises :class:`QuerySyntaxError`, :class:`UnknownAttributeError`,
    :class:`NonQueryableAttributeError` or :class:`TypeMismatchError`.
    """
    return _Parser(text, extended_query).parse()


# ---------------------------------------------------------------------------
# Pretty-printer
# ---------------------------------------------------------------------------

def pretty_print(expr: QueryExpr) -> str:
    """Render an AST in canonical wire syntax (inverse of :func:`parse`)."""
    if isinstance(expr, Compare):
        spec = lookup(expr.attr)
        if spec.type in (AttrType.TEXT, AttrType.RAW, AttrType.DATE):
            return f"{expr.attr}{expr.op}'{expr.value}'"
        return f"{expr.attr}{expr.op}{expr.value}"
    if isinstance(expr, Range):
        spec = lookup(expr.attr)
        lo, hi = expr.low, expr.high
        if spec.type is AttrType.DATE:
            lo, hi = f"'{lo}'", f"'{hi}'"
        open_b = "[" if expr.low_inclusive else "("
        close_b = "]" if expr.high_inclusive else ")"
        return f"{expr.attr}={open_b}{lo},{hi}{close_b}"
    if isinstance(expr, And):
        return f"And({pretty_print(expr.left)},{pretty_print(expr.right)})"
    if isinstance(expr, Or):
        return f"Or({pretty_print(expr.left)},{pretty_print(expr.right)})"
    if isinstance(expr, Composite):
        return f"Composite({pretty_print(expr.expr)})"
    raise TypeError(f"not a query expression: {expr!r}")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _scalar_matches(spec: AttributeSpec, stored, op: str, value: Literal) -> bool:
    if stored is None:
        return False
    if spec.type is AttrType.RAW and spec.path == "E.DOI":
        # DOIs compare case-insensitively.
        return op == "=" and str(stored).upper() == str(value).upper()
    if op == "=":
        return stored == value
    if op == "<":
        return stored < value
    if op == "<=":
        return stored <= value
    if op == ">":
        return stored > value
    return stored >= value


def _match_compare(graph: AcademicGraph, paper: PaperRecord, expr: Compare) -> bool:
    spec = lookup(expr.attr)
    stored = spec.getter(graph, paper)
    if spec.multi:
        # Multi-valued attributes match existentially.
        return any(_scalar_matches(spec, v, expr.op, expr.value) for v in stored)
    return _scalar_matches(spec, stored, expr.op, expr.value)


def _match_range(graph: AcademicGraph, paper: PaperRecord, expr: Range) -> bool:
    spec = lookup(expr.attr)
    stored = spec.getter(graph, paper)
    if stored is None:
        return False
    low_ok = stored >= expr.low if expr.low_inclusive else stored > expr.low
    high_ok = stored <= expr.high if expr.high_inclusive else stored < expr.high
    return low_ok and high_ok


def _match_embedded(graph: AcademicGraph, record, getters, expr: QueryExpr) -> bool:
    if isinstance(expr, Compare):
        stored = getters[expr.attr](graph, record)
        return _scalar_matches(lookup(expr.attr), stored, expr.op, expr.value)
    if isinstance(expr, And):
        return (_match_embedded(graph, record, getters, expr.left)
                and _match_embedded(graph, record, getters, expr.right))
    if isinstance(expr, Or):
        return (_match_embedded(graph, record, getters, expr.left)
                or _match_embedded(graph, record, getters, expr.right))
    raise TypeError(f"unsupported expression inside Composite: {expr!r}")


def matches(graph: AcademicGraph, paper: PaperRecord, expr: QueryExpr) -> bool:
    """Does ``paper`` satisfy ``expr``?"""
    if isinstance(expr, Compare):
        return _match_compare(graph, paper, expr)
    if isinstance(expr, Range):
        return _match_range(graph, paper, expr)
    if isinstance(expr, And):
        return matches(graph, paper, expr.left) and matches(graph, paper, expr.right)
    if isinstance(expr, Or):
        return matches(graph, paper, expr.left) or matches(graph, paper, expr.right)
    if isinstance(expr, Composite):
        iter_records, getters = COMPOSITE_PREFIXES[expr.prefix]
        return any(
            _match_embedded(graph, record, getters, expr.expr)
            for record in iter_records(graph, paper)
        )
    raise TypeError(f"not a query expression: {expr!r}")


def match_ids(graph: AcademicGraph, expr: QueryExpr) -> list[int]:
    """All matching paper ids in canonical order (ascending static rank)."""
    rank = graph.ecc_rank
    found = [p.id for p in graph.papers.values() if matches(graph, p, expr)]
    found.sort(key=lambda pid: rank[pid])
    return found


@dataclass(frozen=True)
class EvaluateEntity:
    logprob: float
    values: dict[str, object]  # keyed by attribute path, in requested order


@dataclass(frozen=True)
class EvaluateResponse:
    expr_echo: str
    entities: tuple[EvaluateEntity, ...]


def render_value(value):
    """Make an attribute value JSON-friendly (tuples to lists)."""
    if isinstance(value, tuple):
        return [render_value(v) for v in value]
    return value


def evaluate(
    graph: AcademicGraph,
    expr: QueryExpr,
    count: int = 10,
    offset: int = 0,
    attributes: Iterable[str] = ("Id", "Ti"),
    expr_text: Optional[str] = None,
) -> EvaluateResponse:
    """Run a parsed expression and return one window of matching entities.

    Entities come back in canonical order: descending match quality, ties by
    ascending id. Match quality is ``-ln(1 + rank)`` where ``rank`` is the
    paper's 0-based position among all papers sorted by descending estimated
    citation count, then ascending id. A window beyond the result set yields
    an empty entity list. Requested attributes may include extended ones;
    attributes without a value are omitted from the entity.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if offset < 0:
        raise ValueError("offset must be non-negative")
    specs = [lookup(a) for a in attributes]
    ids = match_ids(graph, expr)
    window = ids[offset:offset + count]
    entities = []
    for pid in window:
        paper = graph.papers[pid]
        rank = graph.ecc_rank[pid]
        logprob = -math.log1p(rank) if rank else 0.0
        values: dict[str, object] = {}
        for spec in specs:
            value = spec.getter(graph, paper)
            if value is None:
                continue
            values[spec.path] = render_value(value)
        entities.append(EvaluateEntity(logprob, values))
    echo = expr_text if expr_text is not None else pretty_print(expr)
    return EvaluateResponse(echo, tuple(entities))
