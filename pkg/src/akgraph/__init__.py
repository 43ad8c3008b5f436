"""Academic-graph analytics: query engine, citation indicators, audits.

The package answers three kinds of questions over loadable snapshots of a
publication graph:

* retrieval: which papers match an expression, and how are attribute
  values distributed over the matches (``query``, ``histogram``);
* assessment: how does an author's citation impact compare to the journal
  they publish in (``indicators``), including across two different
  database snapshots of the same literature (``compare``);
* trust: where do two snapshots disagree on publication years and author
  attribution (``audit``).

Snapshots load from TSV directories or JSON bundles (``ingest``) into an
immutable in-memory graph (``graph``). The same engine is reachable as a
library, through the ``akgraph`` CLI (``cli``), or over HTTP
(``service``).
"""

from .graph import AcademicGraph, GraphBuilder
from .histogram import calc_histogram
from .indicators import (
    build_reference_set,
    compute_percentiles,
    jncs,
    pr_distribution,
)
from .ingest import load_snapshot
from .normalize import normalize_text
from .query import evaluate, parse, pretty_print

__version__ = "0.1.0"

__all__ = [
    "AcademicGraph",
    "GraphBuilder",
    "build_reference_set",
    "calc_histogram",
    "compute_percentiles",
    "evaluate",
    "jncs",
    "load_snapshot",
    "normalize_text",
    "parse",
    "pr_distribution",
    "pretty_print",
    "__version__",
]
