"""Normalized citation indicators over journal reference sets.

Everything here normalizes a publication's citation count against a
*reference set*: the citation counts of all papers one journal published
inside an inclusive year window, kept both per year and pooled.

* **Journal-normalized citation score.** Each publication's citation
  count is divided by the mean of its own journal-year cell; a set of
  publications (typically one author's output) is summarised by the mean
  of those ratios. A score of 1.0 reads "cited exactly at journal
  average".

* **Percentile-rank classes.** Each publication's citation count is
  placed on the reference distribution (pooled across years by default,
  or its own year's cell) via a percentile, then binned into ordered
  classes by fixed percentile boundaries. With the default boundaries
  (50, 80, 90) class 4 holds the top decile and class 1 everything below
  the median.

Publications that cannot be normalized (their year's cell is empty, or
the cell mean is zero) are excluded rather than silently scored; every
result carries its exclusions with machine-readable reasons.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .errors import (
    AllExcluded,
    EmptyCell,
    EmptyDistribution,
    EmptyReferenceSet,
    UnknownJournal,
)
from .graph import AcademicGraph
from .histogram import calc_histogram
from .query import And, Compare

# Exclusion reasons, stable identifiers for reports and tests.
EMPTY_CELL = "empty-cell"
ZERO_MEAN_CELL = "zero-mean-cell"


@dataclass(frozen=True)
class Exclusion:
    index: int  # position in the publication list as passed in
    year: int
    reason: str


# ---------------------------------------------------------------------------
# Reference sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReferenceSet:
    """Citation-count distributions of one journal over a year window.

    ``cells`` holds one ascending-sorted citation-count multiset per year
    of the window (possibly empty); ``pooled`` is their concatenation,
    re-sorted. The pooled size always equals the sum of the cell sizes.
    """

    journal_id: int
    years: tuple[int, int]  # inclusive on both ends
    cells: Mapping[int, tuple[int, ...]]
    pooled: tuple[int, ...]

    def cell(self, year: int) -> tuple[int, ...]:
        got = self.cells.get(year, ())
        if not got:
            raise EmptyCell(year)
        return got


def build_reference_set(
    graph: AcademicGraph, journal_id: int, years: tuple[int, int]
) -> ReferenceSet:
    """Collect one journal's citation counts per year via the histogram engine.

    ``years`` is inclusive on both ends. Raises :class:`UnknownJournal`
    for an id the graph does not hold and :class:`EmptyReferenceSet` when
    the whole window contains no publications.
    """
    if journal_id not in graph.journals:
        raise UnknownJournal(journal_id)
    lo, hi = int(years[0]), int(years[1])
    if lo > hi:
        raise ValueError(f"year window [{lo}, {hi}] is reversed")
    # One bucket per distinct citation count; a cell can never hold more
    # distinct values than the graph holds papers.
    width = max(1, len(graph.papers))
    cells: dict[int, tuple[int, ...]] = {}
    for year in range(lo, hi + 1):
        expr = And(Compare("J.JId", "=", journal_id), Compare("Y", "=", year))
        response = calc_histogram(graph, expr, ["CC"], count=width, cap=None)
        counts: list[int] = []
        for bucket in response.histograms[0].buckets:
            counts.extend([bucket.value] * bucket.count)
        counts.sort()
        cells[year] = tuple(counts)
    pooled = sorted(c for cell in cells.values() for c in cell)
    if not pooled:
        raise EmptyReferenceSet(journal_id, (lo, hi))
    return ReferenceSet(journal_id, (lo, hi), cells, tuple(pooled))


def journal_year_span(graph: AcademicGraph, journal_id: int) -> tuple[int, int]:
    """Smallest inclusive year window covering a journal's dated papers."""
    if journal_id not in graph.journals:
        raise UnknownJournal(journal_id)
    years = [
        y for (jid, y) in graph.index_journal_year if jid == journal_id
    ]
    if not years:
        raise EmptyReferenceSet(journal_id, None)
    return (min(years), max(years))


def journal_year_mean(refset: ReferenceSet, year: int) -> float:
    """Mean citation count of one year's cell; 0.0 for an all-zero cell."""
    cell = refset.cell(year)
    return sum(cell) / len(cell)


# ---------------------------------------------------------------------------
# Journal-normalized citation score
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScoredPub:
    index: int
    citation_count: int
    year: int
    cell_mean: float
    score: float  # citation_count / cell_mean


@dataclass(frozen=True)
class JncsResult:
    value: float
    scores: tuple[ScoredPub, ...]
    excluded: tuple[Exclusion, ...]


def jncs(
    pubs: Sequence[tuple[int, int]], refset: ReferenceSet
) -> JncsResult:
    """Mean of citation counts over their journal-year cell means.

    ``pubs`` is a list of ``(citation_count, year)`` pairs. Publications
    whose year has no cell in the reference set, or whose cell mean is
    zero, are excluded and reported. Raises :class:`AllExcluded` when
    nothing survives.
    """
    scores: list[ScoredPub] = []
    excluded: list[Exclusion] = []
    for i, (cc, year) in enumerate(pubs):
        cell = refset.cells.get(year, ())
        if not cell:
            excluded.append(Exclusion(i, year, EMPTY_CELL))
            continue
        cell_mean = sum(cell) / len(cell)
        if cell_mean == 0:
            excluded.append(Exclusion(i, year, ZERO_MEAN_CELL))
            continue
        scores.append(ScoredPub(i, cc, year, cell_mean, cc / cell_mean))
    if not scores:
        raise AllExcluded(
            "normalized citation score",
            f"all {len(excluded)} publications excluded",
        )
    value = sum(s.score for s in scores) / len(scores)
    return JncsResult(value, tuple(scores), tuple(excluded))


# ---------------------------------------------------------------------------
# Percentiles
# ---------------------------------------------------------------------------

# A strategy maps (citation pool, one citation count) to a percentile in
# [0, 100]. Swappable so alternative conventions can be plugged in.
PercentileStrategy = Callable[[Sequence[int], int], float]


def strictly_fewer_percentile(pool: Sequence[int], value: int) -> float:
    """Share of the pool cited strictly less than ``value``, as a percent.

    ``percentile(0)`` is pinned to 0: nothing can be cited strictly less
    than an uncited paper. The maximum is reached only by values
    exceeding everything else in the pool.
    """
    if not pool:
        raise EmptyDistribution()
    if value == 0:
        return 0.0
    below = sum(1 for x in pool if x < value)
    return 100.0 * below / len(pool)


@dataclass(frozen=True)
class PercentileMap:
    """Percentile lookups over one frozen citation-count distribution."""

    distribution: tuple[int, ...]  # sorted ascending
    strategy: PercentileStrategy = strictly_fewer_percentile
    _fast: bool = field(default=False, repr=False, compare=False)

    def of(self, value: int) -> float:
        if self._fast:
            # bisect_left on the sorted pool counts exactly the elements
            # strictly below, so this stays bit-identical to the naive scan
            if value == 0:
                return 0.0
            below = bisect_left(self.distribution, value)
            return 100.0 * below / len(self.distribution)
        return self.strategy(self.distribution, value)

    @property
    def mapping(self) -> dict[int, float]:
        return {v: self.of(v) for v in sorted(set(self.distribution))}


def compute_percentiles(
    distribution: Sequence[int],
    strategy: PercentileStrategy = strictly_fewer_percentile,
) -> PercentileMap:
    """Freeze a distribution into a reusable percentile lookup."""
    if not distribution:
        raise EmptyDistribution()
    return PercentileMap(
        tuple(sorted(distribution)),
        strategy,
        _fast=strategy is strictly_fewer_percentile,
    )


# ---------------------------------------------------------------------------
# Percentile-rank classes
# ---------------------------------------------------------------------------

DEFAULT_BOUNDARIES = (50.0, 80.0, 90.0)


def validate_boundaries(boundaries: Sequence[float]) -> tuple[float, ...]:
    out = tuple(float(b) for b in boundaries)
    if not out:
        raise ValueError("at least one class boundary is required")
    if any(not 0.0 < b < 100.0 for b in out):
        raise ValueError("class boundaries must lie strictly between 0 and 100")
    if any(a >= b for a, b in zip(out, out[1:])):
        raise ValueError("class boundaries must be strictly increasing")
    return out


def assign_pr_class(
    percentile: float, scheme: Sequence[float] = DEFAULT_BOUNDARIES
) -> int:
    """Map a percentile to its 1-based class; boundary values go upward.

    With the default scheme (50, 80, 90): class 1 below 50, class 2 in
    [50, 80), class 3 in [80, 90), class 4 at and above 90.
    """
    return bisect_right(list(scheme), percentile) + 1


@dataclass(frozen=True)
class ClassifiedPub:
    index: int
    citation_count: int
    year: int
    percentile: float
    pr_class: int


@dataclass(frozen=True)
class ClassDistribution:
    pubs: tuple[ClassifiedPub, ...]
    excluded: tuple[Exclusion, ...]
    shares: tuple[float, ...]  # percentage of classed pubs per class 1..k

    def share_of(self, pr_class: int) -> float:
        return self.shares[pr_class - 1]


def pr_distribution(
    pubs: Sequence[tuple[int, int]],
    refset: ReferenceSet,
    scheme: Sequence[float] = DEFAULT_BOUNDARIES,
    pool: str = "pooled",
    strategy: PercentileStrategy = strictly_fewer_percentile,
) -> ClassDistribution:
    """Bin ``(citation_count, year)`` pairs into percentile-rank classes.

    ``pool="pooled"`` ranks every publication against the whole window's
    distribution; ``pool="per-year"`` ranks against the publication's own
    year cell (publications whose cell is empty are excluded). Shares are
    percentages of the classed publications, one entry per class, summing
    to 100 up to float rounding.
    """
    bounds = validate_boundaries(scheme)
    if pool not in ("pooled", "per-year"):
        raise ValueError(f"unknown percentile pool {pool!r}")
    maps: dict[Optional[int], PercentileMap] = {}

    def map_for(year: int) -> Optional[PercentileMap]:
        # publications from years outside the window have no standing in
        # the reference distribution, pooled or not
        if not refset.cells.get(year):
            return None
        key = None if pool == "pooled" else year
        if key not in maps:
            dist = refset.pooled if key is None else refset.cells[year]
            maps[key] = compute_percentiles(dist, strategy)
        return maps[key]

    classed: list[ClassifiedPub] = []
    excluded: list[Exclusion] = []
    for i, (cc, year) in enumerate(pubs):
        pmap = map_for(year)
        if pmap is None:
            excluded.append(Exclusion(i, year, EMPTY_CELL))
            continue
        pct = pmap.of(cc)
        classed.append(ClassifiedPub(i, cc, year, pct, assign_pr_class(pct, bounds)))
    if not classed:
        raise AllExcluded(
            "percentile-rank classes",
            f"all {len(excluded)} publications excluded",
        )
    counts = [0] * (len(bounds) + 1)
    for p in classed:
        counts[p.pr_class - 1] += 1
    shares = tuple(100.0 * c / len(classed) for c in counts)
    return ClassDistribution(tuple(classed), tuple(excluded), shares)


# ---------------------------------------------------------------------------
# Author helpers and ranking
# ---------------------------------------------------------------------------

def author_papers(
    graph: AcademicGraph,
    author_name_norm: str,
    journal_id: Optional[int] = None,
    years: Optional[tuple[int, int]] = None,
) -> list[int]:
    """Paper ids authored under a normalized name, optionally filtered.

    ``journal_id`` restricts to one journal, ``years`` to an inclusive
    year window. Results come back in ascending id order.
    """
    ids = graph.index_author_name.get(author_name_norm, frozenset())
    out = []
    for pid in ids:
        paper = graph.papers[pid]
        if journal_id is not None and paper.journal_id != journal_id:
            continue
        if years is not None:
            if paper.year is None or not years[0] <= paper.year <= years[1]:
                continue
        out.append(pid)
    out.sort()
    return out


def pubs_of(graph: AcademicGraph, paper_ids: Iterable[int]) -> list[tuple[int, int]]:
    """Project papers to the ``(citation_count, year)`` pairs indicators eat.

    Papers without a year are dropped here; they could never be placed in
    a journal-year cell anyway.
    """
    out = []
    for pid in paper_ids:
        paper = graph.papers[pid]
        if paper.year is not None:
            out.append((paper.citation_count, paper.year))
    return out


def rank_by_jncs(values: Mapping[str, float]) -> dict[str, int]:
    """Dense descending ranking: best value gets 1, exact ties share a rank."""
    distinct = sorted(set(values.values()), reverse=True)
    position = {v: i + 1 for i, v in enumerate(distinct)}
    return {name: position[v] for name, v in values.items()}
