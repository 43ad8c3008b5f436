"""Attribute-value distributions over query matches.

Mirrors the evaluate pipeline but aggregates instead of listing: run the
expression, then for each requested attribute count how often each value
occurs among the matching papers. Multi-valued attributes contribute one
count per value held; papers missing the attribute contribute nothing to
that attribute's buckets (they still count toward ``num_entities``).

Requests touching more matches than the configured cap are refused with
:class:`CapExceeded` so a single expression cannot monopolise the engine.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from .attributes import lookup_histogrammable
from .errors import CapExceeded
from .graph import AcademicGraph
from .query import QueryExpr, match_ids, pretty_print

# Largest number of matching entities a single histogram request may process.
DEFAULT_CAP = 2_400_000


@dataclass(frozen=True)
class HistogramBucket:
    value: object
    count: int


@dataclass(frozen=True)
class AttributeHistogram:
    attribute: str
    distinct_count: int   # distinct values across all matches (pre-window)
    total_count: int      # value occurrences across all matches (pre-window)
    buckets: tuple[HistogramBucket, ...]


@dataclass(frozen=True)
class HistogramResponse:
    expr_echo: str
    num_entities: int
    histograms: tuple[AttributeHistogram, ...]


def calc_histogram(
    graph: AcademicGraph,
    expr: QueryExpr,
    attributes: Iterable[str],
    count: int = 10,
    offset: int = 0,
    expr_text: Optional[str] = None,
    cap: Optional[int] = DEFAULT_CAP,
) -> HistogramResponse:
    """Compute value distributions for ``attributes`` over matches of ``expr``.

    Buckets come back sorted by descending count, ties by ascending value,
    with the ``offset``/``count`` window applied per attribute. Counts in
    ``distinct_count`` and ``total_count`` describe the full distribution,
    not the window.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if offset < 0:
        raise ValueError("offset must be non-negative")
    specs = [lookup_histogrammable(a) for a in attributes]
    ids = match_ids(graph, expr)
    if cap is not None and len(ids) > cap:
        raise CapExceeded(len(ids), cap)

    histograms = []
    for spec in specs:
        counter: Counter = Counter()
        for pid in ids:
            value = spec.getter(graph, graph.papers[pid])
            if value is None:
                continue
            if spec.multi:
                counter.update(value)
            else:
                counter[value] += 1
        ordered = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))
        window = ordered[offset:offset + count]
        histograms.append(AttributeHistogram(
            attribute=spec.path,
            distinct_count=len(counter),
            total_count=sum(counter.values()),
            buckets=tuple(HistogramBucket(v, c) for v, c in window),
        ))
    echo = expr_text if expr_text is not None else pretty_print(expr)
    return HistogramResponse(echo, len(ids), tuple(histograms))
